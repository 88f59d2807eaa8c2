"""Frequency-domain linear response of the reservoir-engineered OPO.

Two evaluation modes are available:

``canonical``
    Langevin equations with kappa/2 half-widths, the full ``-|B|^2``
    determinant and the standard boundary ``a_out = sqrt(kappa) a_s - b_in``.
    Operators at sideband ``omega`` are paired as ``(b(omega), b(-omega)^dag)``,
    so the quadrature map is real in the time domain and the symmetrized
    spectrum is ``Q V Q^H``.

``verbatim``
    A literal closed form: a beam-splitter boundary
    ``sqrt(kappa) a_s + sqrt(1 - kappa) b_in`` with kappa read as a
    dimensionless transmissivity, and the amplitude variance with
    ``sqrt(kappa)`` widths and signed (not modulus) squares. Kept so reference
    fit curves can be regenerated; it does not satisfy the shot-noise or
    unitarity checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import BareOpoParams
from .core import QuadVariance, SqueezedState, apply_loss
from .errors import DomainError, ThresholdSingularityError

CANONICAL = "canonical"
VERBATIM = "verbatim"
MODES = (CANONICAL, VERBATIM)

# |denominator| below this multiple of kappa^2 counts as the threshold pole
SINGULARITY_FLOOR = 1e-12
# relative size of the imaginary part tolerated in the verbatim variance
VERBATIM_IMAG_TOL = 1e-9


class DampingClampWarning(UserWarning):
    """The two-photon-damping efficiency fell outside [0, 1] and was clamped."""


@dataclass(frozen=True)
class ResponseCoefficients:
    a_coef: complex
    b_coef: complex


@dataclass(frozen=True)
class TransferMatrix:
    """Map from (b_in, b_in^dag) to an output pair at one sideband frequency."""

    t_bb: complex
    t_bd: complex
    t_db: complex
    t_dd: complex

    def as_array(self):
        return np.array([[self.t_bb, self.t_bd], [self.t_db, self.t_dd]], dtype=complex)


@dataclass(frozen=True)
class TwoPhotonDamping:
    alpha: float
    r_p: float

    def __post_init__(self):
        if not (self.alpha >= 0.0):
            raise DomainError(f"alpha must be >= 0, got {self.alpha!r}")
        if not (self.r_p >= 0.0):
            raise DomainError(f"r_p must be >= 0, got {self.r_p!r}")


@dataclass(frozen=True)
class SpectrumConfig:
    params: BareOpoParams
    reservoir: SqueezedState
    mode: str = CANONICAL
    damping: TwoPhotonDamping | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == VERBATIM and self.params.kappa > 1.0:
            raise DomainError(
                "verbatim mode reads kappa as a transmissivity and needs kappa <= 1, "
                f"got {self.params.kappa!r}"
            )

    def replace(self, **changes):
        fields = dict(params=self.params, reservoir=self.reservoir, mode=self.mode, damping=self.damping)
        fields.update(changes)
        return SpectrumConfig(**fields)


@dataclass(frozen=True)
class SpectrumPoint:
    omega: float
    vars: QuadVariance


def response_coefficients(params, reservoir):
    """Drift coefficients of the squeezed-basis Langevin equation.

    Assumes the pump phase is locked opposite the squeezing angle.
    """
    c2, s2 = math.cosh(2.0 * reservoir.r), math.sinh(2.0 * reservoir.r)
    d, g = params.delta_c, params.g
    a_coef = complex(0.0, -(d * c2 + g * s2))
    b_coef = complex(0.0, d * s2 + g * c2) * complex(
        math.cos(reservoir.theta), -math.sin(reservoir.theta)
    )
    return ResponseCoefficients(a_coef, b_coef)


def _check_denominator(den, kappa):
    if not abs(den) >= SINGULARITY_FLOOR * kappa**2:
        raise ThresholdSingularityError(
            f"at-threshold singularity: |denominator| = {abs(den):.3e} "
            f"(floor {SINGULARITY_FLOOR * kappa**2:.3e})"
        )


def intracavity_transfer(coef, kappa, omega):
    """Intracavity map (b(w), b(-w)^dag) -> (a_s(w), a_s(-w)^dag)."""
    a, b = coef.a_coef, coef.b_coef
    p = 0.5 * kappa - a - 1j * omega
    q = 0.5 * kappa - a.conjugate() - 1j * omega
    den = p * q - abs(b) ** 2
    _check_denominator(den, kappa)
    scale = math.sqrt(kappa) / den
    return TransferMatrix(scale * q, scale * b, scale * b.conjugate(), scale * p)


def stability_margin(config):
    """Zero-frequency determinant; positive means below threshold."""
    coef = response_coefficients(config.params, config.reservoir)
    a, b = coef.a_coef, coef.b_coef
    k2 = 0.5 * config.params.kappa
    return (k2 - a) * (k2 - a.conjugate()) - abs(b) ** 2


def is_below_threshold(config):
    return stability_margin(config).real > SINGULARITY_FLOOR * config.params.kappa**2


def _verbatim_output(coef, kappa, omega):
    a, b = coef.a_coef, coef.b_coef
    u = 1j * omega - a + 0.5 * kappa
    v = -1j * omega - a.conjugate() + 0.5 * kappa
    den = u * v - abs(b) ** 2
    _check_denominator(den, kappa)
    leak = math.sqrt(1.0 - kappa)
    return TransferMatrix(
        kappa * v / den + leak,
        kappa * b / den,
        kappa * b.conjugate() / den,
        kappa * u / den + leak,
    )


def output_transfer(config, omega):
    """Output map (b_in, b_in^dag) -> (a_out, a_out^dag) at sideband ``omega``."""
    coef = response_coefficients(config.params, config.reservoir)
    kappa = config.params.kappa
    if config.mode == VERBATIM:
        return _verbatim_output(coef, kappa, omega)
    if not is_below_threshold(config):
        raise ThresholdSingularityError(
            "at-threshold singularity: the linearized OPO is at or above threshold "
            f"(zero-frequency determinant {stability_margin(config).real:.3e})"
        )
    inner = intracavity_transfer(coef, kappa, omega)
    root = math.sqrt(kappa)
    return TransferMatrix(
        root * inner.t_bb - 1.0,
        root * inner.t_bd,
        root * inner.t_db,
        root * inner.t_dd - 1.0,
    )


def quadrature_map(t):
    """Complex 2x2 map from input (x, p) to output (x, p) quadratures.

    x = b + b^dag, p = -i (b - b^dag).
    """
    s_plus = t.t_bb + t.t_db
    d_plus = t.t_bd + t.t_dd
    s_minus = t.t_bb - t.t_db
    d_minus = t.t_bd - t.t_dd
    return np.array(
        [
            [0.5 * (s_plus + d_plus), 0.5j * (s_plus - d_plus)],
            [-0.5j * (s_minus + d_minus), 0.5 * (s_minus - d_minus)],
        ],
        dtype=complex,
    )


def output_covariance(config, omega):
    """Symmetrized (x, p) output covariance at ``omega`` (canonical mode)."""
    if config.mode != CANONICAL:
        raise DomainError("the full output covariance is only defined in canonical mode")
    q = quadrature_map(output_transfer(config, omega))
    out = q @ config.reservoir.covariance() @ q.conj().T
    # the imaginary part is antisymmetric and drops out of every real quadrature
    return out.real


def _canonical_variance(config, omega):
    cov = output_covariance(config, omega)
    return QuadVariance(float(cov[0, 0]), float(cov[1, 1]))


def principal_variances(config, omega):
    """Variances of the most squeezed and most anti-squeezed output quadratures."""
    cov = output_covariance(config, omega)
    lo, hi = np.linalg.eigvalsh(0.5 * (cov + cov.T))
    return QuadVariance(float(lo), float(hi))


def verbatim_coefficients(config, omega):
    """The two bracketed factors of the literal amplitude-variance formula."""
    coef = response_coefficients(config.params, config.reservoir)
    a, b = coef.a_coef, coef.b_coef
    kappa = config.params.kappa
    root = math.sqrt(kappa)
    m = (1j * omega - a + root) * (-1j * omega - a.conjugate() + root)
    _check_denominator(m, kappa)
    first = kappa**2 / (2.0 * m) + math.sqrt(1.0 - kappa)
    second = kappa / m * (-1j * omega + a - b)
    return first, second


def _verbatim_variance(config, omega):
    first, second = verbatim_coefficients(config, omega)
    r = config.reservoir.r
    anti, sq = math.exp(2.0 * r), math.exp(-2.0 * r)
    var_x = first**2 * anti - second**2 * sq
    # conjugate quadrature: the same expression with the input variances exchanged
    var_p = first**2 * sq - second**2 * anti
    for value in (var_x, var_p):
        if abs(value.imag) > VERBATIM_IMAG_TOL * max(abs(value.real), 1.0):
            raise DomainError(
                f"verbatim variance is complex ({value!r}); the literal formula "
                "only yields real values for a real pump/squeezing phase pair"
            )
    return QuadVariance(var_x.real, var_p.real)


def quadrature_variance(config, omega):
    """Output quadrature variances at ``omega`` (no two-photon damping)."""
    if omega < 0:
        raise DomainError(f"sideband frequency must be >= 0, got {omega!r}")
    if config.mode == VERBATIM:
        return _verbatim_variance(config, omega)
    return _canonical_variance(config, omega)


def damping_efficiency(alpha, r, r_p):
    """Effective transmission 1 - alpha|r - r_p| clamped to [0, 1].

    Returns ``(eta, clamped)``.
    """
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha!r}")
    eta = 1.0 - alpha * abs(r - r_p)
    clamped = min(max(eta, 0.0), 1.0)
    return clamped, clamped != eta


def damping_corrected_variance(v, alpha, r, r_p):
    """Fold two-photon damping in as an equivalent beam-splitter loss."""
    eta, clamped = damping_efficiency(alpha, r, r_p)
    if clamped:
        warnings.warn(
            f"damping efficiency 1 - {alpha}*|{r} - {r_p}| clamped to {eta}",
            DampingClampWarning,
            stacklevel=2,
        )
    return apply_loss(v, eta)


def output_variance(config, omega):
    """Quadrature variances including two-photon damping when configured."""
    vars_ = quadrature_variance(config, omega)
    if config.damping is None:
        return vars_
    eta, _ = damping_efficiency(config.damping.alpha, config.reservoir.r, config.damping.r_p)
    return QuadVariance(apply_loss(vars_.var_x, eta), apply_loss(vars_.var_p, eta))


QUADRATURES = ("x", "p", "squeezed", "antisqueezed")


def select_quadrature(config, omega, quadrature="x"):
    """Undamped variance of one named quadrature."""
    if quadrature in ("x", "p"):
        v = quadrature_variance(config, omega)
        return v.var_x if quadrature == "x" else v.var_p
    if quadrature in ("squeezed", "antisqueezed"):
        v = principal_variances(config, omega)
        return v.var_x if quadrature == "squeezed" else v.var_p
    raise DomainError(f"quadrature must be one of {QUADRATURES}, got {quadrature!r}")


def spectrum(config, omegas, damped=True):
    """Evaluate a caller-supplied sideband grid, in grid order."""
    evaluate = output_variance if damped else quadrature_variance
    return [SpectrumPoint(float(w), evaluate(config, float(w))) for w in omegas]


def mean_photon_number(config, omega):
    """Output photon-number density <a_out^dag a_out> at sideband ``omega``.

    Input moments are those of the squeezed-vacuum reservoir:
    <b^dag b> = sinh^2 r and <b b> = exp(-i theta) cosh r sinh r.
    """
    t = output_transfer(config, omega)
    n = config.reservoir.mean_photons
    m = config.reservoir.anomalous_moment
    value = (
        abs(t.t_bb) ** 2 * n
        + abs(t.t_bd) ** 2 * (n + 1.0)
        + 2.0 * (t.t_bb.conjugate() * t.t_bd * m.conjugate()).real
    )
    return float(value)


@dataclass(frozen=True)
class SubthresholdVariance:
    v_minus: float
    v_plus: float


def subthreshold_variance(pump_ratio, f, gamma, eta_tot, theta_tot=0.0):
    """Squeezed and anti-squeezed variances of a sub-threshold OPO.

    Includes the phase-jitter mixing of the two quadratures through
    ``cos^2``/``sin^2`` of ``theta_tot``. ``f`` and ``gamma`` share units.
    """
    if pump_ratio < 0:
        raise DomainError(f"pump ratio must be >= 0, got {pump_ratio!r}")
    if not gamma > 0:
        raise DomainError(f"linewidth must be > 0, got {gamma!r}")
    if not (0.0 <= eta_tot <= 1.0):
        raise DomainError(f"total efficiency must lie in [0, 1], got {eta_tot!r}")
    x = math.sqrt(pump_ratio)
    lorentz = 4.0 * (f / gamma) ** 2
    den_sq = (1.0 + x) ** 2 + lorentz
    den_anti = (1.0 - x) ** 2 + lorentz
    if den_anti == 0.0:
        raise DomainError("subthreshold variance is singular at P = P_th and f = 0")
    squeeze = 1.0 - 4.0 * eta_tot * x / den_sq
    anti = 1.0 + 4.0 * eta_tot * x / den_anti
    c2, s2 = math.cos(theta_tot) ** 2, math.sin(theta_tot) ** 2
    return SubthresholdVariance(squeeze * c2 + anti * s2, anti * c2 + squeeze * s2)
