"""Command implementations behind the CLI.

Each command reads only the inputs it is given and returns a ResultTable or a
plain dict; rendering and writing happen in the CLI layer.
"""

from __future__ import annotations

import hashlib
import math
from pathlib import Path

from . import __version__
from .comb import comb_detunings, default_tolerance, fsr
from .config import Descriptor
from .core import apply_loss, variance_to_db
from .errors import ConfigError, DomainError, ThresholdSingularityError
from .fitting import damped_model_db, fit_alpha, fit_cosh_scale, fit_linear, read_points
from .linewidth import estimate_linewidth, read_trace
from .output import DB, MW, Column, ResultTable
from .spectrum import (
    CANONICAL,
    damping_efficiency,
    principal_variances,
    quadrature_variance,
    select_quadrature,
)
from .threshold import (
    MEASURED_REDUCED_THRESHOLD,
    classical_gain,
    nonlinear_coefficient,
    reduced_threshold,
    threshold_power,
)

FLAG_OK = "ok"
FLAG_THRESHOLD = "threshold"
NAN = math.nan


def _as_descriptor(descriptor):
    return descriptor if isinstance(descriptor, Descriptor) else Descriptor.load(descriptor)


def _provenance(command, descriptor=None, mode=None, **extra):
    out = {"command": command, "version": __version__}
    if descriptor is not None:
        out["descriptor"] = descriptor.name
        out["descriptor_sha256"] = descriptor.sha256()
    if mode is not None:
        out["mode"] = mode
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def _file_sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _damping_eta(cfg):
    if cfg.damping is None:
        return 1.0
    return damping_efficiency(cfg.damping.alpha, cfg.reservoir.r, cfg.damping.r_p)[0]


def _db(v):
    return variance_to_db(v) if v > 0 else NAN


# -- spectrum -----------------------------------------------------------------

SPECTRUM_COLUMNS = [
    Column("omega", "rad/s"),
    Column("var_x"),
    Column("var_p"),
    Column("db_x", "dB", DB),
    Column("db_p", "dB", DB),
    Column("var_sq"),
    Column("db_sq", "dB", DB),
    Column("flag"),
]


def _spectrum_row(cfg, omega):
    """(var_x, var_p, var_sq, flag) with damping folded in; singular points are flagged."""
    try:
        v = quadrature_variance(cfg, omega)
        sq = principal_variances(cfg, omega).var_x if cfg.mode == CANONICAL else NAN
    except ThresholdSingularityError:
        return NAN, NAN, NAN, FLAG_THRESHOLD
    eta = _damping_eta(cfg)
    var_sq = apply_loss(sq, eta) if math.isfinite(sq) else NAN
    return apply_loss(v.var_x, eta), apply_loss(v.var_p, eta), var_sq, FLAG_OK


def cmd_spectrum(descriptor, omegas=None, mode=None, r=None):
    """Output variances on an omega grid (explicit, the descriptor grid, or its single omega)."""
    d = _as_descriptor(descriptor)
    cfg = d.spectrum_config(mode, r=r)
    if omegas is None:
        omegas = d.grid().values() if d.has("grid") else [d.omega()]
    table = ResultTable(list(SPECTRUM_COLUMNS), provenance=_provenance("spectrum", d, cfg.mode))
    for w in omegas:
        w = float(w)
        vx, vp, vsq, flag = _spectrum_row(cfg, w)
        table.add(w, vx, vp, _db(vx), _db(vp), vsq, _db(vsq), flag)
    return table


# -- sweep --------------------------------------------------------------------


def _selected_variance(cfg, omega, quadrature):
    try:
        v = select_quadrature(cfg, omega, quadrature)
    except ThresholdSingularityError:
        return NAN, FLAG_THRESHOLD
    return apply_loss(v, _damping_eta(cfg)), FLAG_OK


def cmd_sweep(descriptor, mode=None, fit_points=None):
    """Tabulate power and selected-quadrature noise over the descriptor's sweep axis.

    Returns ``(table, fit)``. With ``fit_points`` the power model is fitted to
    them (linear for pump ratio, cosh 2r scale for r) and ``fit`` holds the result.
    """
    d = _as_descriptor(descriptor)
    axis = d.sweep()
    if axis.variable == "omega":
        if fit_points is not None:
            raise ConfigError("an omega sweep has no power model to fit")
        table = cmd_spectrum(d, axis.values(), mode)
        table.provenance["command"] = "sweep"
        return table, None

    power = dict(d.data.get("power_model", {}))
    fit = None
    if fit_points is not None:
        if axis.variable == "pump_ratio":
            res = fit_linear(fit_points)
            power["slope_w"], power["intercept_w"] = res.estimate
            fit = res.to_dict(["slope_w", "intercept_w"])
        else:
            res = fit_cosh_scale(fit_points)
            power["cosh_scale_w"] = res.estimate[0]
            fit = res.to_dict(["cosh_scale_w"])

    omega = d.omega()
    quadrature = d.quadrature()
    columns = [
        Column(axis.variable),
        Column("g_over_kappa"),
        Column("power_mw", "mW", MW),
        Column(f"var_{quadrature}"),
        Column(f"db_{quadrature}", "dB", DB),
        Column("flag"),
    ]
    cfg0 = d.spectrum_config(mode)
    table = ResultTable(
        columns,
        provenance=_provenance("sweep", d, cfg0.mode, omega=repr(omega), quadrature=quadrature),
    )
    for x in axis.values():
        x = float(x)
        if axis.variable == "pump_ratio":
            cfg = d.spectrum_config(mode, pump_ratio=x)
            p = NAN
            if "slope_w" in power and "intercept_w" in power:
                p = power["slope_w"] * x + power["intercept_w"]
        else:
            cfg = d.spectrum_config(mode, r=x)
            p = power["cosh_scale_w"] * math.cosh(2.0 * x) if "cosh_scale_w" in power else NAN
        v, flag = _selected_variance(cfg, omega, quadrature)
        table.add(x, cfg.params.g / cfg.params.kappa, 1e3 * p, v, _db(v), flag)
    return table, fit


# -- threshold ----------------------------------------------------------------


THRESHOLD_COLUMNS = [
    Column("e_per_w", "1/W"),
    Column("p_th_mw", "mW", MW),
    Column("r"),
    Column("p_th_reduced_mw", "mW", MW),
    Column("measured_mw", "mW", MW),
    Column("delta_mw", "mW", MW),
    Column("delta_rel"),
    Column("pump_mw", "mW", MW),
    Column("g0"),
    Column("above_threshold"),
]


def cmd_threshold(descriptor, r=None, pump_w=None):
    """Threshold, squeezing-reduced threshold with its measured delta, and classical gain."""
    d = _as_descriptor(descriptor)
    params = d.doubly_resonant()
    block = d.data.get("threshold", {})
    r = block.get("r", 0.0) if r is None else r
    pump_w = block.get("pump_w") if pump_w is None else pump_w

    e = nonlinear_coefficient(params)
    p_th = threshold_power(params)
    p_red = reduced_threshold(p_th, r)
    measured = block.get("measured_w") if r == block.get("r") else None
    if measured is None:
        measured = MEASURED_REDUCED_THRESHOLD.get(r)
    if measured is None:
        delta = rel = None
    else:
        delta, rel = p_red - measured, (p_red - measured) / measured
    g0 = above = None
    if pump_w is not None:
        gain = classical_gain(pump_w, p_th)
        g0, above = gain.value, gain.above_threshold

    def mw(v):
        return None if v is None else 1e3 * v

    table = ResultTable(list(THRESHOLD_COLUMNS), provenance=_provenance("threshold", d))
    table.add(e, mw(p_th), float(r), mw(p_red), mw(measured), mw(delta), rel, mw(pump_w), g0, above)
    return table


# -- comb ---------------------------------------------------------------------


COMB_COLUMNS = [
    Column("mode_index"),
    Column("offset_hz", "Hz"),
    Column("detuning_hz", "Hz"),
    Column("co_resonant"),
]


def cmd_comb(descriptor=None, tol=None, fsr1=None, fsr2=None, bandwidth=None):
    """Detuning of every cavity-2 comb line from cavity 1 inside the acceptance bandwidth."""
    d = None if descriptor is None else _as_descriptor(descriptor)
    geoms = d.geometries() if d is not None and d.has("geometry") else None
    if geoms is None and (fsr1 is None or fsr2 is None or tol is None):
        raise ConfigError("comb needs a geometry block, or explicit FSRs and a tolerance")
    f1 = fsr(geoms[0]) if fsr1 is None else fsr1
    f2 = fsr(geoms[1]) if fsr2 is None else fsr2
    if tol is None:
        tol = d.tolerance()
    if tol is None:
        tol = default_tolerance(*geoms)
    if bandwidth is None:
        bandwidth = d.bandwidth() if d is not None and d.has("geometry") else 2e12
    report = comb_detunings(f1, f2, bandwidth, tol)
    table = ResultTable(
        list(COMB_COLUMNS),
        provenance=_provenance(
            "comb",
            d,
            fsr1_hz=repr(f1),
            fsr2_hz=repr(f2),
            tolerance_hz=repr(float(tol)),
            bandwidth_hz=repr(float(bandwidth)),
            co_resonant_count=len(report.co_resonant_modes()),
        ),
    )
    for e in report.entries:
        table.add(e.mode_index, e.offset_hz, e.detuning_hz, e.co_resonant)
    return table


# -- linewidth ----------------------------------------------------------------


def cmd_linewidth(trace_path, fmin=None):
    result = estimate_linewidth(read_trace(trace_path), f_min=fmin)
    out = result.to_dict()
    out["provenance"] = _provenance("linewidth", trace_sha256=_file_sha256(trace_path))
    return out


# -- fit ----------------------------------------------------------------------

FIT_MODELS = ("alpha", "linear", "cosh")


def cmd_fit(data_path, model="alpha", descriptor=None, mode=None, r_p=None, bounds=(0.0, 5.0)):
    points = read_points(Path(data_path).read_text(encoding="utf-8"))
    d = None if descriptor is None else _as_descriptor(descriptor)
    extra = {"data_sha256": _file_sha256(data_path), "model": model}
    if model == "linear":
        out = fit_linear(points).to_dict(["slope", "intercept"])
    elif model == "cosh":
        out = fit_cosh_scale(points).to_dict(["scale"])
    elif model == "alpha":
        if d is None:
            raise ConfigError("the alpha model needs a descriptor for the spectrum system")
        if r_p is None:
            if not d.has("damping"):
                raise ConfigError("give --r-p or a damping block with r_p")
            r_p = d.data["damping"]["r_p"]
        mode = mode or d.mode

        def system(r):
            return d.spectrum_config(mode, r=r).replace(damping=None)

        omega, quadrature = d.omega(), d.quadrature()
        res = fit_alpha(points, system, omega, r_p, bounds=bounds, quadrature=quadrature)
        out = res.to_dict(["alpha"])
        pred = damped_model_db(system, [p.x for p in points], omega, res.estimate[0], r_p, quadrature)
        out["points"] = [
            {"x": p.x, "y": p.y, "model": float(m), "residual": float(m) - p.y}
            for p, m in zip(points, pred)
        ]
        extra.update(mode=mode, r_p=r_p, quadrature=quadrature)
    else:
        raise DomainError(f"model must be one of {FIT_MODELS}, got {model!r}")
    out["provenance"] = _provenance("fit", d, **extra)
    return out
