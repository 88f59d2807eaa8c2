"""Laser linewidth from a frequency-noise PSD via the beta-separation line.

Only the part of S(f) lying above ``8 ln2 f / pi^2`` contributes to the
linewidth: ``Gamma = sqrt(8 ln2 * D)`` with ``D`` the area under S(f) where
it exceeds the line. Integration is trapezoidal on the sample grid; segments
that cross the line are split at the linearly interpolated crossing, so the
result is exact for piecewise-linear traces.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DomainError, TraceParseError

DBM_RAW = "dbm_raw"
FREQ_NOISE = "freq_noise"
KINDS = (DBM_RAW, FREQ_NOISE)

BETA_SLOPE = 8.0 * math.log(2.0) / math.pi**2


@dataclass(frozen=True)
class PsdTrace:
    """Sampled PSD. ``values`` are dBm readings or Hz^2/Hz depending on ``value_kind``."""

    frequencies: np.ndarray
    values: np.ndarray
    value_kind: str = FREQ_NOISE
    rbw: float | None = None
    slope_k0: float | None = None
    z0: float = 50.0
    f_min: float = 0.0

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if f.ndim != 1 or f.shape != v.shape:
            raise DomainError("frequencies and values must be 1-D arrays of equal length")
        if np.any(f <= 0) or np.any(np.diff(f) <= 0):
            raise DomainError("frequencies must be positive and strictly increasing")
        if self.value_kind not in KINDS:
            raise DomainError(f"value_kind must be one of {KINDS}, got {self.value_kind!r}")
        f.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SurfaceResult:
    surface_d: float
    crossover_freqs: list
    f_lower: float
    f_upper: float


@dataclass(frozen=True)
class LinewidthResult:
    gamma: float
    surface_d: float
    crossover_freqs: list = field(default_factory=list)
    f_lower: float = 0.0
    truncation_freq: float = math.inf

    def to_dict(self):
        return {
            "gamma_hz": self.gamma,
            "surface_d_hz2": self.surface_d,
            "crossover_freqs_hz": list(self.crossover_freqs),
            "f_lower_hz": self.f_lower,
            "truncation_freq_hz": self.truncation_freq,
        }


def convert_psd(trace):
    """Calibrate spectrum-analyzer dBm readings into frequency noise, Hz^2/Hz.

    The reading is power into ``z0`` referenced to 1 mW; the PDH slope ``k0``
    (V/Hz) turns volts into hertz and ``rbw`` normalizes per hertz.
    """
    if trace.value_kind == FREQ_NOISE:
        return trace
    missing = [name for name in ("rbw", "slope_k0", "z0") if getattr(trace, name) is None]
    if missing:
        raise ConfigError(f"dBm trace is missing calibration: {', '.join(missing)}")
    if not (trace.rbw > 0 and trace.slope_k0 != 0 and trace.z0 > 0):
        raise ConfigError("calibration needs rbw > 0, k0 != 0 and z0 > 0")
    watts = 10.0 ** (trace.values / 10.0) / 1000.0
    s = watts / (trace.slope_k0**2 / trace.z0) / trace.rbw
    return replace(trace, values=s, value_kind=FREQ_NOISE)


def beta_line(f):
    """The separation line 8 ln2 f / pi^2, Hz^2/Hz."""
    out = BETA_SLOPE * np.asarray(f, dtype=float)
    return float(out) if out.ndim == 0 else out


def _interp_at(f, s, x):
    return float(np.interp(x, f, s))


def high_index_surface(trace):
    """Area of S(f) above the beta line over [max(f_min, f_first), f_last]."""
    if trace.value_kind != FREQ_NOISE:
        raise DomainError("convert the trace to frequency noise before integrating")
    f = trace.frequencies
    s = trace.values
    if f.size < 2:
        raise DomainError("need at least two samples to integrate")

    f_lo = max(trace.f_min, float(f[0]))
    f_hi = float(f[-1])
    if f_lo >= f_hi:
        return SurfaceResult(0.0, [], f_lo, f_hi)
    start = int(np.searchsorted(f, f_lo, side="right"))
    grid_f = np.concatenate(([f_lo], f[start:]))
    grid_s = np.concatenate(([_interp_at(f, s, f_lo)], s[start:]))
    if grid_f.size > 1 and grid_f[1] == grid_f[0]:
        grid_f, grid_s = grid_f[1:], grid_s[1:]

    excess = grid_s - BETA_SLOPE * grid_f
    above = excess >= 0.0
    total = 0.0
    crossings = []
    for i in range(grid_f.size - 1):
        f0, f1 = grid_f[i], grid_f[i + 1]
        s0, s1 = grid_s[i], grid_s[i + 1]
        if above[i] and above[i + 1]:
            total += 0.5 * (s0 + s1) * (f1 - f0)
        elif above[i] != above[i + 1]:
            e0, e1 = excess[i], excess[i + 1]
            frac = e0 / (e0 - e1)
            fc = f0 + frac * (f1 - f0)
            sc = s0 + frac * (s1 - s0)
            crossings.append(float(fc))
            if above[i]:
                total += 0.5 * (s0 + sc) * (fc - f0)
            else:
                total += 0.5 * (sc + s1) * (f1 - fc)
    return SurfaceResult(float(total), crossings, f_lo, f_hi)


def linewidth(surface_d):
    if surface_d < 0:
        raise DomainError(f"surface must be >= 0, got {surface_d!r}")
    return math.sqrt(8.0 * math.log(2.0) * surface_d)


def estimate_linewidth(trace, f_min=None):
    """Convert (if needed), integrate and return the linewidth with diagnostics."""
    trace = convert_psd(trace)
    if f_min is not None:
        trace = replace(trace, f_min=f_min)
    surf = high_index_surface(trace)
    return LinewidthResult(
        gamma=linewidth(surf.surface_d),
        surface_d=surf.surface_d,
        crossover_freqs=surf.crossover_freqs,
        f_lower=surf.f_lower,
        truncation_freq=surf.f_upper,
    )


_META_KEYS = {"kind", "rbw", "k0", "z0", "fmin"}


def _parse_metadata(text, lineno, meta):
    for chunk in text.replace("#", " ").replace(",", " ").split():
        if "=" not in chunk:
            continue
        key, _, value = chunk.partition("=")
        key = key.strip().lower()
        if key not in _META_KEYS:
            continue
        if key == "kind":
            if value not in KINDS:
                raise TraceParseError(f"unknown trace kind {value!r}", lineno)
            meta[key] = value
        else:
            try:
                meta[key] = float(value)
            except ValueError:
                raise TraceParseError(f"metadata {key} is not a number: {value!r}", lineno) from None


def ingest_trace(source):
    """Parse a PSD trace from a text stream, bytes, or str.

    Metadata lines start with ``#`` and carry ``key=value`` pairs
    (kind, rbw, k0, z0, fmin); data lines are ``frequency_hz,value``.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    meta = {}
    freqs, values = [], []
    last_line = 0
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            _parse_metadata(line, lineno, meta)
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise TraceParseError(f"expected 'frequency,value', got {line!r}", lineno)
        try:
            fv, vv = float(parts[0]), float(parts[1])
        except ValueError:
            raise TraceParseError(f"non-numeric field in {line!r}", lineno) from None
        if not (math.isfinite(fv) and math.isfinite(vv)):
            raise TraceParseError("non-finite value", lineno)
        if fv <= 0:
            raise TraceParseError(f"frequency must be > 0, got {fv!r}", lineno)
        if freqs and fv <= freqs[-1]:
            what = "duplicate" if fv == freqs[-1] else "non-increasing"
            raise TraceParseError(f"{what} frequency {fv!r}", lineno)
        freqs.append(fv)
        values.append(vv)
        last_line = lineno
    if len(freqs) < 2:
        raise TraceParseError("trace needs at least two data rows", last_line or None)

    kind = meta.get("kind", FREQ_NOISE)
    if kind == DBM_RAW:
        missing = [k for k in ("rbw", "k0") if k not in meta]
        if missing:
            raise TraceParseError(f"dbm_raw trace is missing metadata: {', '.join(missing)}")
    return PsdTrace(
        frequencies=np.array(freqs),
        values=np.array(values),
        value_kind=kind,
        rbw=meta.get("rbw"),
        slope_k0=meta.get("k0"),
        z0=meta.get("z0", 50.0),
        f_min=meta.get("fmin", 0.0),
    )


def read_trace(path):
    with open(path, encoding="utf-8") as fh:
        return ingest_trace(fh)


def format_trace(trace, comment=None):
    """Serialize a trace in the ingestible CSV format (shortest round-trip floats)."""
    lines = []
    if comment:
        lines.append(f"# {comment}")
    meta = [f"kind={trace.value_kind}"]
    if trace.rbw is not None:
        meta.append(f"rbw={trace.rbw!r}")
    if trace.slope_k0 is not None:
        meta.append(f"k0={trace.slope_k0!r}")
    if trace.value_kind == DBM_RAW:
        meta.append(f"z0={trace.z0!r}")
    meta.append(f"fmin={trace.f_min!r}")
    lines.append("# " + " # ".join(meta))
    for fv, vv in zip(trace.frequencies.tolist(), trace.values.tolist()):
        lines.append(f"{fv!r},{vv!r}")
    return "\n".join(lines) + "\n"
