import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squeezelase.basis import BareOpoParams
from squeezelase.core import SqueezedState
from squeezelase.errors import DomainError, TraceParseError
from squeezelase.fitting import (
    DataPoint,
    damped_model_db,
    fit_alpha,
    fit_cosh_scale,
    fit_linear,
    golden_section,
    read_points,
)
from squeezelase.spectrum import SpectrumConfig
from squeezelase.threshold import coupling_from_pump

KAPPA = 2 * math.pi * 97e6
OMEGA = 2 * math.pi * 18e6
R_VALUES = [0.8, 0.85, 0.89, 0.94, 0.97, 0.99]


def system(r):
    g = coupling_from_pump(KAPPA, 1.75, r)
    return SpectrumConfig(BareOpoParams(g, 0.0, math.pi, KAPPA), SqueezedState(r, 0.0))


def synthetic(alpha, r_p=1.15, quadrature="squeezed"):
    ys = damped_model_db(system, R_VALUES, OMEGA, alpha, r_p, quadrature)
    return [DataPoint(r, float(y)) for r, y in zip(R_VALUES, ys)]


def test_golden_section_quadratic():
    x, fx, iters, history = golden_section(lambda t: (t - 0.3) ** 2, 0.0, 1.0, tol=1e-9)
    assert x == pytest.approx(0.3, abs=1e-8)
    widths = [b - a for a, b, _ in history]
    best = [v for _, _, v in history]
    assert all(w1 <= w0 for w0, w1 in zip(widths, widths[1:]))
    assert all(v1 <= v0 for v0, v1 in zip(best, best[1:]))


def test_recovers_reference_alpha():
    res = fit_alpha(synthetic(2.1), system, OMEGA, 1.15, quadrature="squeezed")
    assert res.estimate[0] == pytest.approx(2.1, abs=1e-3)
    assert res.converged


def test_no_damping_data():
    res = fit_alpha(synthetic(0.0), system, OMEGA, 1.15, quadrature="squeezed")
    assert res.estimate[0] <= 1e-3


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 2.8))
def test_oracle_recovery(alpha):
    res = fit_alpha(synthetic(alpha), system, OMEGA, 1.15, quadrature="squeezed")
    assert res.estimate[0] == pytest.approx(alpha, abs=1e-3)


def test_permutation_invariance():
    data = synthetic(1.3)
    a = fit_alpha(data, system, OMEGA, 1.15, quadrature="squeezed").estimate[0]
    b = fit_alpha(data[::-1], system, OMEGA, 1.15, quadrature="squeezed").estimate[0]
    assert a == pytest.approx(b, abs=1e-9)


def test_fixed_config_model():
    cfg = system(0.9)

    def swap(r):
        return cfg.replace(reservoir=SqueezedState(r))

    ys = damped_model_db(swap, R_VALUES, OMEGA, 0.7, 1.15, "x")
    data = [DataPoint(r, float(y)) for r, y in zip(R_VALUES, ys)]
    assert fit_alpha(data, cfg, OMEGA, 1.15).estimate[0] == pytest.approx(0.7, abs=1e-3)


@pytest.mark.parametrize(
    "data, bounds",
    [([], (0, 5)), ([DataPoint(0.8, -3.0)], (0, 5)), ([DataPoint(0.8, -3), DataPoint(0.9, -4)], (3, 1))],
)
def test_fit_alpha_errors(data, bounds):
    with pytest.raises(DomainError):
        fit_alpha(data, system, OMEGA, 1.15, bounds=bounds)


def test_fit_alpha_non_finite_names_alpha(monkeypatch):
    import squeezelase.fitting as fitting

    monkeypatch.setattr(fitting, "undamped_variances", lambda *a, **k: np.array([np.inf, 0.5]))
    data = [DataPoint(0.8, -3.0), DataPoint(0.99, -5.0)]
    with pytest.raises(DomainError, match="alpha = 0.0"):
        fit_alpha(data, system, OMEGA, 1.15)


def test_fit_linear_exact():
    res = fit_linear([DataPoint(1.0, 0.5), DataPoint(1.75, 2.6)])
    slope, intercept = res.estimate
    assert slope == pytest.approx(2.8)
    assert intercept == pytest.approx(-2.3)
    assert res.residual_sse == pytest.approx(0.0, abs=1e-20)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fit_linear_normal_equations(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=8), rng.normal(size=8)
    res = fit_linear([DataPoint(a, b) for a, b in zip(x, y)])
    design = np.column_stack([x, np.ones_like(x)])
    ref = np.linalg.solve(design.T @ design, design.T @ y)
    np.testing.assert_allclose(res.estimate, ref, rtol=1e-12, atol=1e-12)


def test_fit_linear_huge_sigma_drops_point():
    base = [DataPoint(0, 1.0), DataPoint(1, 2.5), DataPoint(2, 3.1)]
    with_outlier = base + [DataPoint(3, 100.0, sigma=1e12)]
    np.testing.assert_allclose(fit_linear(with_outlier).estimate, fit_linear(base).estimate, rtol=1e-9)


def test_fit_linear_degenerate():
    with pytest.raises(DomainError):
        fit_linear([DataPoint(1, 1), DataPoint(1, 2)])


def test_fit_cosh_scale():
    assert fit_cosh_scale([DataPoint(0.99, 2.6)]).estimate[0] == pytest.approx(2.6 / math.cosh(1.98))
    exact = [DataPoint(r, 0.7 * math.cosh(2 * r)) for r in (0.1, 0.5, 0.9)]
    res = fit_cosh_scale(exact)
    assert res.estimate[0] == pytest.approx(0.7)
    assert res.residual_sse == pytest.approx(0.0, abs=1e-20)
    assert fit_cosh_scale([DataPoint(0, 1.0), DataPoint(0, 2.0)]).estimate[0] == pytest.approx(1.5)
    with pytest.raises(DomainError):
        fit_cosh_scale([])


def test_read_points():
    pts = read_points("# comment\nr,db\n0.8,-3.2\n0.99,-5.4,0.2\n")
    assert pts == [DataPoint(0.8, -3.2), DataPoint(0.99, -5.4, 0.2)]
    with pytest.raises(TraceParseError) as err:
        read_points("0.8,-3.2\nx,y\n")
    assert err.value.line == 2
    with pytest.raises(TraceParseError):
        read_points("0.8,-3.2,-1\n")
