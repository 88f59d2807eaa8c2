"""Noise-variance bookkeeping shared by every other module.

Variances are normalized to shot noise (vacuum = 1). Decibel values follow the
noise-power convention used when reporting squeezing: ``10*log10(V)``, so a
squeezed variance gives a negative number (0.0912 -> -10.40 dB).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


def wrap_phase(angle):
    """Map an angle onto [0, 2*pi)."""
    wrapped = math.fmod(angle, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def _positive(v, name="variance"):
    arr = np.asarray(v, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError(f"{name} must be positive, got {v!r}")
    return arr


def _scalar_or_array(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


@dataclass(frozen=True)
class QuadVariance:
    """Amplitude (x) and phase (p) quadrature variances, shot noise = 1."""

    var_x: float
    var_p: float

    def __post_init__(self):
        if not (self.var_x > 0.0 and self.var_p > 0.0):
            raise DomainError(
                f"quadrature variances must be positive, got ({self.var_x!r}, {self.var_p!r})"
            )

    @property
    def product(self):
        return self.var_x * self.var_p

    def to_db(self):
        return variance_to_db(self.var_x), variance_to_db(self.var_p)


@dataclass(frozen=True)
class SqueezedState:
    """Gaussian squeezed vacuum with parameter ``r`` and angle ``theta``.

    ``theta`` is normalized to [0, 2*pi) on construction. At ``theta = 0`` the
    state is phase squeezed: var_x = exp(2r), var_p = exp(-2r).
    """

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not (self.r >= 0.0) or not math.isfinite(self.r):
            raise DomainError(f"squeezing parameter must be finite and >= 0, got {self.r!r}")
        if not math.isfinite(self.theta):
            raise DomainError(f"squeezing angle must be finite, got {self.theta!r}")
        object.__setattr__(self, "theta", wrap_phase(self.theta))

    @property
    def mean_photons(self):
        """<b^dag b> = sinh^2 r."""
        return math.sinh(self.r) ** 2

    @property
    def anomalous_moment(self):
        """<b b> = exp(-i theta) cosh r sinh r."""
        return complex(math.cos(self.theta), -math.sin(self.theta)) * (
            math.cosh(self.r) * math.sinh(self.r)
        )

    def covariance(self):
        """Symmetrized (x, p) covariance matrix with x = b + b^dag, p = -i(b - b^dag)."""
        n = self.mean_photons
        m = self.anomalous_moment
        return np.array(
            [
                [1.0 + 2.0 * n + 2.0 * m.real, 2.0 * m.imag],
                [2.0 * m.imag, 1.0 + 2.0 * n - 2.0 * m.real],
            ]
        )

    def variances(self):
        cov = self.covariance()
        return QuadVariance(float(cov[0, 0]), float(cov[1, 1]))


@dataclass(frozen=True)
class LossBudget:
    """Detection-chain efficiencies of one OPO plus its phase jitter."""

    eta_esc: float
    eta_pro: float = 1.0
    eta_vis: float = 1.0
    eta_qe: float = 1.0
    theta_tot: float = 0.0
    t_coupler: float | None = None
    l_roundtrip: float | None = None

    def __post_init__(self):
        for name in ("eta_esc", "eta_pro", "eta_vis", "eta_qe"):
            value = getattr(self, name)
            if not (0.0 < value <= 1.0):
                raise DomainError(f"{name} must lie in (0, 1], got {value!r}")
        if not (self.theta_tot >= 0.0):
            raise DomainError(f"theta_tot must be >= 0, got {self.theta_tot!r}")
        if self.t_coupler is not None and not (0.0 < self.t_coupler < 1.0):
            raise DomainError(f"t_coupler must lie in (0, 1), got {self.t_coupler!r}")
        if self.l_roundtrip is not None and not (0.0 <= self.l_roundtrip < 1.0):
            raise DomainError(f"l_roundtrip must lie in [0, 1), got {self.l_roundtrip!r}")

    @classmethod
    def from_cavity(cls, t_coupler, l_roundtrip, **kwargs):
        """Build a budget whose escape efficiency is derived from T and l."""
        return cls(
            eta_esc=escape_efficiency(t_coupler, l_roundtrip),
            t_coupler=t_coupler,
            l_roundtrip=l_roundtrip,
            **kwargs,
        )

    @property
    def eta_tot(self):
        return total_efficiency(self)


def escape_efficiency(t_coupler, l_roundtrip):
    """T / (T + l)."""
    if not (0.0 < t_coupler < 1.0) or not (0.0 <= l_roundtrip < 1.0):
        raise DomainError(f"invalid coupler/loss pair ({t_coupler!r}, {l_roundtrip!r})")
    return t_coupler / (t_coupler + l_roundtrip)


def total_efficiency(budget):
    return budget.eta_esc * budget.eta_pro * budget.eta_vis * budget.eta_qe


def variance_to_db(v):
    """Noise power relative to shot noise in dB; squeezing is negative."""
    return _scalar_or_array(10.0 * np.log10(_positive(v)))


def db_to_variance(d):
    d = np.asarray(d, dtype=float)
    if np.any(~np.isfinite(d)):
        raise DomainError(f"decibel value must be finite, got {d!r}")
    return _scalar_or_array(10.0 ** (d / 10.0))


def squeezing_degree(v):
    """Positive squeezing magnitude, -10*log10(V)."""
    return _scalar_or_array(-10.0 * np.log10(_positive(v)))


def variance_to_r(v):
    """-ln(V)/2. Negative for anti-squeezed input (V > 1)."""
    return _scalar_or_array(-0.5 * np.log(_positive(v)))


def r_to_variance(r):
    """Squeezed-quadrature variance exp(-2r) of a pure state."""
    return _scalar_or_array(np.exp(-2.0 * np.asarray(r, dtype=float)))


def apply_loss(v, eta):
    """Beam-splitter loss: eta*V + (1 - eta)."""
    v = _positive(v)
    eta_arr = np.asarray(eta, dtype=float)
    if np.any(~((eta_arr >= 0.0) & (eta_arr <= 1.0))):
        raise DomainError(f"efficiency must lie in [0, 1], got {eta!r}")
    return _scalar_or_array(eta_arr * v + (1.0 - eta_arr))


def effective_reservoir(source, eta):
    """Squeezed state seen after propagation loss ``eta``.

    The lossy state is mixed; like the experimental bookkeeping, it is
    summarized by the ``r`` of its squeezed quadrature.
    """
    return SqueezedState(variance_to_r(apply_loss(r_to_variance(source.r), eta)), source.theta)
