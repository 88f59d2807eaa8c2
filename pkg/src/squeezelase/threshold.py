"""Threshold, classical gain and output-power models of the doubly resonant OPO."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError

MU_0 = 4.0e-7 * math.pi  # vacuum permeability, H/m
C_LIGHT = 299_792_458.0  # m/s

# measured reduced thresholds (W) keyed by injected squeezing parameter
MEASURED_REDUCED_THRESHOLD = {0.8: 0.037, 0.99: 0.0114}


@dataclass(frozen=True)
class DoublyResonantParams:
    t_p: float
    v_p: float
    t_s: float
    l_s: float
    d_eff: float
    omega_s: float
    omega_i: float
    omega_p: float
    n_p: float
    crystal_len: float
    h_focus: float = 1.0

    def __post_init__(self):
        for name in ("t_p", "v_p", "t_s", "l_s"):
            value = getattr(self, name)
            if not (0.0 <= value < 1.0):
                raise DomainError(f"{name} must lie in [0, 1), got {value!r}")
        for name in ("omega_s", "omega_i", "omega_p", "n_p", "crystal_len", "h_focus"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)!r}")
        mismatch = abs(self.omega_p - self.omega_s - self.omega_i) / self.omega_p
        if mismatch > 1e-6:
            raise DomainError(
                f"omega_p must equal omega_s + omega_i (relative mismatch {mismatch:.2e})"
            )


def nonlinear_coefficient(p):
    """Parametric conversion coefficient E in 1/W."""
    return (
        4.0 * MU_0 * p.d_eff**2 * p.omega_s**2 * p.omega_i**2 * p.crystal_len * p.h_focus
        / (math.pi * C_LIGHT**2 * p.n_p**2 * p.omega_p)
    )


def threshold_power(p):
    """Oscillation threshold in W: (T_p + V_p)^2 (T_s + l)^2 / (2 T_p E)."""
    if p.t_p <= 0.0:
        raise DomainError("pump transmittance must be > 0")
    e = nonlinear_coefficient(p)
    if e <= 0.0:
        raise DomainError("nonlinear coefficient is zero (d_eff = 0)")
    return (p.t_p + p.v_p) ** 2 * (p.t_s + p.l_s) ** 2 / (2.0 * p.t_p * e)


class ClassicalGain(NamedTuple):
    value: float
    above_threshold: bool


def classical_gain(pump_power, p_th):
    """1 / (1 - sqrt(P/P_th))^2, flagged rather than rejected above threshold."""
    if pump_power < 0 or not p_th > 0:
        raise DomainError(f"need pump_power >= 0 and p_th > 0, got ({pump_power!r}, {p_th!r})")
    x = math.sqrt(pump_power / p_th)
    if x == 1.0:
        raise DomainError("classical gain diverges at P = P_th")
    return ClassicalGain(1.0 / (1.0 - x) ** 2, x > 1.0)


def reduced_threshold(p_th, r):
    """Threshold lowered by the cosh 2r gain enhancement."""
    if not p_th > 0 or r < 0:
        raise DomainError(f"need p_th > 0 and r >= 0, got ({p_th!r}, {r!r})")
    return p_th / math.cosh(2.0 * r)


class ThresholdDelta(NamedTuple):
    model: float
    measured: float
    delta: float
    relative: float


def reduced_threshold_delta(p_th, r, measured=None):
    """Model reduced threshold against a measured value (default: shipped data for ``r``)."""
    if measured is None:
        try:
            measured = MEASURED_REDUCED_THRESHOLD[r]
        except KeyError:
            raise DomainError(f"no measured reduced threshold on record for r = {r}") from None
    model = reduced_threshold(p_th, r)
    return ThresholdDelta(model, measured, model - measured, (model - measured) / measured)


def gain_comparison(r_p, r):
    """(spontaneous gain e^{r_p}, stimulated gain cosh 2r)."""
    if r_p < 0 or r < 0:
        raise DomainError(f"squeezing parameters must be >= 0, got ({r_p!r}, {r!r})")
    return math.exp(r_p), math.cosh(2.0 * r)


def power_model_eval(slope, intercept, pump_ratio):
    return slope * pump_ratio + intercept


def power_vs_r(r, r0):
    """Output power at squeezing ``r`` relative to ``r0``: cosh 2r / cosh 2r0."""
    return math.cosh(2.0 * r) / math.cosh(2.0 * r0)


def coupling_from_pump(kappa, pump_ratio, r=0.0):
    """Coupling g for a pump ratio measured against the reduced threshold.

    The bare linear OPO oscillates at g = kappa/2 with g ~ sqrt(P), and the
    ratio is normalized to P_th / cosh 2r, hence g = (kappa/2) sqrt(ratio / cosh 2r).
    """
    if pump_ratio < 0:
        raise DomainError(f"pump ratio must be >= 0, got {pump_ratio!r}")
    return 0.5 * kappa * math.sqrt(pump_ratio / math.cosh(2.0 * r))
