"""Command-line entry point: ``squeezelase <command> [options]``.

Errors are reported as one line on stderr,
``squeezelase: error kind=<kind> code=<n>: <message>``, and the process exits
with the matching status (2 config, 3 parse, 4 domain, 5 threshold singularity).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .commands import (
    FIT_MODELS,
    cmd_comb,
    cmd_fit,
    cmd_linewidth,
    cmd_spectrum,
    cmd_sweep,
    cmd_threshold,
)
from .config import Axis, Descriptor
from .errors import ConfigError, SqueezeLaseError
from .fitting import read_points
from .output import dumps, format_value
from .spectrum import MODES

DEFAULT_DESCRIPTOR = "paper-opo2"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _common():
    p = _Parser(add_help=False)
    p.add_argument("--descriptor", help="descriptor JSON path or bundled preset name")
    p.add_argument("--mode", choices=MODES, help="spectrum evaluation mode")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="squeezelase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="output quadrature variances vs omega")
    p.add_argument("--omega", type=float, action="append", help="sideband frequency, rad/s (repeatable)")
    p.add_argument("--omega-range", nargs=3, metavar=("LO", "HI", "COUNT"), help="log grid, rad/s")
    p.add_argument("--r", type=float, help="override the injected squeezing parameter")

    p = sub.add_parser("sweep", parents=[common], help="tabulate the descriptor sweep axis")
    p.add_argument("--fit-data", help="x,y[,sigma] points for the power-model overlay")

    p = sub.add_parser("threshold", parents=[common], help="threshold and reduced threshold")
    p.add_argument("--r", type=float, help="injected squeezing parameter")
    p.add_argument("--pump", type=float, help="pump power in W for the classical gain")

    p = sub.add_parser("comb", parents=[common], help="two-cavity co-resonance table")
    p.add_argument("--tol", type=float, help="co-resonance tolerance, Hz")
    p.add_argument("--fsr1", type=float, help="override cavity-1 FSR, Hz")
    p.add_argument("--fsr2", type=float, help="override cavity-2 FSR, Hz")
    p.add_argument("--bandwidth", type=float, help="acceptance bandwidth, Hz")

    p = sub.add_parser("linewidth", parents=[common], help="linewidth from a PSD trace")
    p.add_argument("trace", help="trace CSV path")
    p.add_argument("--fmin", type=float, help="lower integration bound, Hz")

    p = sub.add_parser("fit", parents=[common], help="fit a model to x,y[,sigma] data")
    p.add_argument("data", help="data CSV path")
    p.add_argument("--model", choices=FIT_MODELS, default="alpha")
    p.add_argument("--r-p", type=float, help="pump-process squeezing parameter (alpha model)")
    p.add_argument("--alpha-bounds", nargs=2, type=float, default=(0.0, 5.0), metavar=("LO", "HI"))
    return parser


def _render(result, fmt):
    if isinstance(result, dict):
        if fmt == "csv":
            rows = (f"{k},{format_value(v)}\n" for k, v in _flatten(result))
            return "key,value\n" + "".join(rows)
        return dumps(result)
    return result.render(fmt)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def run(args):
    descriptor = args.descriptor
    if args.command in ("spectrum", "sweep", "threshold", "comb"):
        descriptor = Descriptor.load(descriptor or DEFAULT_DESCRIPTOR)
    elif descriptor is not None:
        descriptor = Descriptor.load(descriptor)

    extra = None
    if args.command == "spectrum":
        omegas = args.omega
        if args.omega_range:
            lo, hi, count = args.omega_range
            omegas = Axis(float(lo), float(hi), int(count), "log").values()
        result = cmd_spectrum(descriptor, omegas, args.mode, r=args.r)
    elif args.command == "sweep":
        points = read_points(Path(args.fit_data).read_text(encoding="utf-8")) if args.fit_data else None
        result, extra = cmd_sweep(descriptor, args.mode, points)
    elif args.command == "threshold":
        result = cmd_threshold(descriptor, args.r, args.pump)
    elif args.command == "comb":
        result = cmd_comb(descriptor, args.tol, args.fsr1, args.fsr2, args.bandwidth)
    elif args.command == "linewidth":
        result = cmd_linewidth(args.trace, args.fmin)
    else:
        result = cmd_fit(args.data, args.model, descriptor, args.mode, args.r_p, tuple(args.alpha_bounds))

    if extra is not None:
        result.provenance.update((f"fit.{k}", v) for k, v in _flatten(extra))
    default_fmt = "json" if isinstance(result, dict) else "csv"
    _emit(_render(result, args.format or default_fmt), args.out)
    if extra is not None and args.out is not None:
        _emit(dumps(extra), f"{args.out}.fit.json")
    return 0


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return run(args)
    except SqueezeLaseError as exc:
        message = " ".join(str(exc).split())
        sys.stderr.write(f"squeezelase: error kind={exc.kind} code={exc.exit_code}: {message}\n")
        return exc.exit_code
    except OSError as exc:
        message = " ".join(str(exc).split())
        sys.stderr.write(f"squeezelase: error kind=config code=2: {message}\n")
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
