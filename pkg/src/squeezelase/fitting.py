"""Scalar least-squares fits for the damping coefficient and power models."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import SqueezedState, apply_loss, variance_to_db
from .errors import DomainError, TraceParseError
from .spectrum import damping_efficiency, select_quadrature

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DataPoint:
    x: float
    y: float
    sigma: float | None = None

    def __post_init__(self):
        if self.sigma is not None and not self.sigma > 0:
            raise DomainError(f"sigma must be > 0 when given, got {self.sigma!r}")

    @property
    def weight(self):
        return 1.0 if self.sigma is None else 1.0 / self.sigma**2


@dataclass(frozen=True)
class FitResult:
    estimate: tuple
    residual_sse: float
    iterations: int
    converged: bool
    history: tuple = field(default=(), repr=False)

    def to_dict(self, names=None):
        names = names or [f"p{i}" for i in range(len(self.estimate))]
        return {
            "estimate": dict(zip(names, self.estimate)),
            "residual_sse": self.residual_sse,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def golden_section(f, a, b, tol=1e-6, max_iter=200):
    """Minimize a unimodal ``f`` on [a, b].

    Returns ``(x, fx, iterations, history)``; ``history`` holds the bracket
    and best value after every step so callers can audit the contraction.
    """
    if b < a:
        a, b = b, a
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = min((fc, c), (fd, d))
    history = [(a, b, best[0])]
    it = 0
    while b - a > tol and it < max_iter:
        # ties move toward the smaller abscissa
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            cand = (fc, c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            cand = (fd, d)
        if cand[0] < best[0]:
            best = cand
        it += 1
        history.append((a, b, best[0]))
    return best[1], best[0], it, tuple(history)


def _validate(data, minimum):
    if len(data) < minimum:
        raise DomainError(f"need at least {minimum} data point(s), got {len(data)}")


def fixed_system(config):
    """Model factory that only swaps the reservoir r into ``config``."""

    def build(r):
        return config.replace(reservoir=SqueezedState(r, config.reservoir.theta))

    return build


def undamped_variances(model, r_values, omega, quadrature="x"):
    """Undamped variance at each r, computed once and reused for every trial alpha."""
    return np.array([select_quadrature(model(r), omega, quadrature) for r in r_values])


def damped_model_db(model, r_values, omega, alpha, r_p, quadrature="x"):
    base = undamped_variances(model, r_values, omega, quadrature)
    eta = np.array([damping_efficiency(alpha, r, r_p)[0] for r in r_values])
    return variance_to_db(apply_loss(base, eta))


def fit_alpha(data, model, omega, r_p, bounds=(0.0, 5.0), cells=64, tol=1e-6, quadrature="x"):
    """Fit the two-photon-damping coefficient to (r, dB) data.

    ``model`` is a SpectrumConfig (only its reservoir r is varied) or a
    callable mapping r to a SpectrumConfig. Damping enters as the loss
    ``1 - alpha |r - r_p|``. A grid scan locates the basin, golden-section
    search refines it.
    """
    _validate(data, 2)
    lo, hi = bounds
    if not (0.0 <= lo < hi):
        raise DomainError(f"need 0 <= alpha_lo < alpha_hi, got {bounds!r}")
    if cells < 64:
        raise DomainError("the coarse scan needs at least 64 cells")

    r = np.array([p.x for p in data], dtype=float)
    y = np.array([p.y for p in data], dtype=float)
    w = np.array([p.weight for p in data], dtype=float)
    if not callable(model):
        model = fixed_system(model)
    base = undamped_variances(model, r, omega, quadrature)

    def predict(alpha):
        eta = np.array([damping_efficiency(alpha, ri, r_p)[0] for ri in r])
        return variance_to_db(apply_loss(base, eta))

    def objective(alpha):
        pred = predict(alpha)
        if not np.all(np.isfinite(pred)):
            raise DomainError(f"model output is not finite at alpha = {float(alpha)!r}")
        return float(np.sum(w * (pred - y) ** 2))

    grid = np.linspace(lo, hi, cells + 1)
    values = [objective(a) for a in grid]
    k = int(np.argmin(values))  # first minimum: ties go to the smaller alpha
    left, right = grid[max(k - 1, 0)], grid[min(k + 1, cells)]
    alpha, sse, iters, history = golden_section(objective, left, right, tol=tol)
    if values[k] < sse:
        alpha, sse = float(grid[k]), values[k]
    converged = bool(history[-1][1] - history[-1][0] <= tol)
    return FitResult((float(alpha),), float(sse), iters, converged, history)


def fit_linear(data):
    """Weighted least-squares line; returns (slope, intercept)."""
    _validate(data, 2)
    x = np.array([p.x for p in data], dtype=float)
    y = np.array([p.y for p in data], dtype=float)
    w = np.array([p.weight for p in data], dtype=float)
    sw = w.sum()
    xm = (w * x).sum() / sw
    ym = (w * y).sum() / sw
    sxx = (w * (x - xm) ** 2).sum()
    if sxx <= 0.0 or np.ptp(x[w > 0]) == 0.0:
        raise DomainError("degenerate design: all x values are identical")
    slope = (w * (x - xm) * (y - ym)).sum() / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    return FitResult((float(slope), float(intercept)), float((w * resid**2).sum()), 1, True)


def fit_cosh_scale(data):
    """Single scale s for P = s cosh 2r."""
    _validate(data, 1)
    x = np.array([p.x for p in data], dtype=float)
    y = np.array([p.y for p in data], dtype=float)
    w = np.array([p.weight for p in data], dtype=float)
    c = np.cosh(2.0 * x)
    s = (w * y * c).sum() / (w * c**2).sum()
    resid = y - s * c
    return FitResult((float(s),), float((w * resid**2).sum()), 1, True)


def read_points(source):
    """Parse ``x,y[,sigma]`` rows; '#' lines and a non-numeric header row are skipped."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    points = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) not in (2, 3):
            raise TraceParseError(f"expected 'x,y[,sigma]', got {line!r}", lineno)
        try:
            nums = [float(p) for p in parts]
        except ValueError:
            if not points and not any(_isnum(p) for p in parts):
                continue  # header row
            raise TraceParseError(f"non-numeric field in {line!r}", lineno) from None
        try:
            points.append(DataPoint(*nums))
        except DomainError as exc:
            raise TraceParseError(str(exc), lineno) from None
    return points


def _isnum(text):
    try:
        float(text)
    except ValueError:
        return False
    return True
