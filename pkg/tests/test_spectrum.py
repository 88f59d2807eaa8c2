import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_variances, literal_amplitude_variance
from squeezelase.basis import BareOpoParams
from squeezelase.core import SqueezedState
from squeezelase.errors import DomainError, ThresholdSingularityError
from squeezelase.spectrum import (
    CANONICAL,
    VERBATIM,
    DampingClampWarning,
    SpectrumConfig,
    TwoPhotonDamping,
    damping_corrected_variance,
    damping_efficiency,
    intracavity_transfer,
    is_below_threshold,
    mean_photon_number,
    output_transfer,
    output_variance,
    principal_variances,
    quadrature_variance,
    response_coefficients,
    select_quadrature,
    spectrum,
    subthreshold_variance,
)


def config(g=0.0, delta=0.0, r=0.0, theta=0.0, kappa=1.0, mode=CANONICAL, damping=None):
    params = BareOpoParams(g, delta, theta + math.pi, kappa)
    return SpectrumConfig(params, SqueezedState(r, theta), mode, damping)


def random_below_threshold(rng):
    while True:
        kappa = rng.uniform(0.2, 5.0)
        cfg = config(
            g=rng.uniform(0.0, 0.6) * kappa,
            delta=rng.uniform(-0.5, 0.5) * kappa,
            r=rng.uniform(0.0, 1.5),
            theta=rng.uniform(0.0, 2 * math.pi),
            kappa=kappa,
        )
        if is_below_threshold(cfg) and cfg.params.g < 0.499 * kappa:
            return cfg, rng.uniform(0.0, 4.0) * kappa


class TestCoefficients:
    def test_bare_opo(self):
        c = response_coefficients(BareOpoParams(0.3, 0.0), SqueezedState(0.0, 0.4))
        assert c.a_coef == 0
        assert c.b_coef == pytest.approx(1j * 0.3 * np.exp(-0.4j))

    def test_empty_detuned_cavity(self):
        c = response_coefficients(BareOpoParams(0.0, 0.7), SqueezedState(0.0))
        assert c.a_coef == pytest.approx(-0.7j)
        assert c.b_coef == 0

    def test_squeezed_basis_enhancement(self):
        c = response_coefficients(BareOpoParams(1.0, 0.0), SqueezedState(0.99, 0.0))
        assert c.a_coef == pytest.approx(-1j * math.sinh(1.98))
        assert c.b_coef == pytest.approx(1j * math.cosh(1.98))


class TestTransfer:
    def test_empty_cavity_intracavity(self):
        c = response_coefficients(BareOpoParams(0.0), SqueezedState(0.0))
        t = intracavity_transfer(c, 2.0, 0.5)
        assert t.t_bb == pytest.approx(math.sqrt(2.0) / (1.0 - 0.5j))
        assert t.t_bd == 0 and t.t_db == 0

    def test_rolloff(self):
        c = response_coefficients(BareOpoParams(0.3), SqueezedState(0.2))
        t = intracavity_transfer(c, 1.0, 1e9)
        assert max(abs(x) for x in (t.t_bb, t.t_bd, t.t_db, t.t_dd)) < 1e-8

    def test_threshold_singularity(self):
        c = response_coefficients(BareOpoParams(0.5), SqueezedState(0.0))
        with pytest.raises(ThresholdSingularityError):
            intracavity_transfer(c, 1.0, 0.0)

    def test_empty_cavity_is_all_pass(self):
        for w in (0.0, 0.3, 7.0):
            t = output_transfer(config(kappa=1.3), w)
            assert abs(t.t_bb) == pytest.approx(1.0)

    def test_conjugate_symmetry_pairs_opposite_sidebands(self):
        cfg = config(g=0.2, delta=0.1, r=0.4, theta=0.3)
        plus, minus = output_transfer(cfg, 0.7), output_transfer(cfg, -0.7)
        assert plus.t_dd == pytest.approx(minus.t_bb.conjugate())
        assert plus.t_db == pytest.approx(minus.t_bd.conjugate())

    def test_symplectic_output(self):
        cfg = config(g=0.3, delta=0.2, r=0.5, theta=1.0)
        t = output_transfer(cfg, 0.4)
        assert abs(t.t_bb) ** 2 - abs(t.t_bd) ** 2 == pytest.approx(1.0)

    def test_verbatim_is_not_unitary(self):
        t = output_transfer(config(kappa=0.15, mode=VERBATIM), 0.0)
        assert abs(abs(t.t_bb) - 1.0) > 1e-3

    def test_verbatim_same_frequency_conjugates(self):
        t = output_transfer(config(g=0.05, r=0.3, kappa=0.2, mode=VERBATIM), 0.1)
        assert t.t_db == pytest.approx(t.t_bd.conjugate())

    def test_canonical_above_threshold_raises(self):
        with pytest.raises(ThresholdSingularityError):
            output_transfer(config(g=0.8), 0.3)


class TestVariance:
    @pytest.mark.parametrize("omega", [0.0, 0.01, 1.0, 100.0])
    def test_shot_noise(self, omega):
        v = quadrature_variance(config(), omega)
        assert v.var_x == pytest.approx(1.0, abs=1e-12)
        assert v.var_p == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("omega", [0.0, 0.5, 30.0])
    def test_all_pass_keeps_input(self, omega):
        v = quadrature_variance(config(r=0.6), omega)
        assert v.var_x == pytest.approx(math.exp(1.2))
        assert v.var_p == pytest.approx(math.exp(-1.2))

    def test_matches_classic_opo_formula(self):
        # bare OPO at half threshold amplitude, zero frequency: squeezed quadrature
        # variance ((1 - x) / (1 + x))^2 with x = 2 g / kappa
        v = principal_variances(config(g=0.25), 0.0)
        assert v.var_x == pytest.approx((0.5 / 1.5) ** 2)
        assert v.var_p == pytest.approx((1.5 / 0.5) ** 2)

    def test_oracle_agreement(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            cfg, w = random_below_threshold(rng)
            p, res = cfg.params, cfg.reservoir
            vx, vp = brute_force_variances(p.g, p.delta_c, res.r, res.theta, p.kappa, w)
            v = quadrature_variance(cfg, w)
            assert v.var_x == pytest.approx(vx, rel=1e-10)
            assert v.var_p == pytest.approx(vp, rel=1e-10)

    def test_verbatim_literal(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            kappa, g, d = rng.uniform(0.01, 1.0), rng.uniform(0, 1), rng.uniform(-1, 1)
            r, w = rng.uniform(0, 1.5), rng.uniform(0, 3)
            v = quadrature_variance(config(g, d, r, kappa=kappa, mode=VERBATIM), w)
            ref = literal_amplitude_variance(g, d, r, 0.0, kappa, w)
            assert v.var_x == pytest.approx(ref.real, rel=1e-12)

    def test_verbatim_complex_is_rejected(self):
        with pytest.raises(DomainError):
            quadrature_variance(config(0.3, 0.1, 0.5, theta=0.9, kappa=0.5, mode=VERBATIM), 0.2)

    def test_verbatim_needs_transmissivity(self):
        with pytest.raises(DomainError):
            config(kappa=2.0, mode=VERBATIM)

    def test_negative_omega_rejected(self):
        with pytest.raises(DomainError):
            quadrature_variance(config(), -1.0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_uncertainty(self, seed):
        cfg, w = random_below_threshold(np.random.default_rng(seed))
        assert quadrature_variance(cfg, w).product >= 1.0 - 1e-9
        lo, hi = principal_variances(cfg, w).var_x, principal_variances(cfg, w).var_p
        assert lo * hi >= 1.0 - 1e-9

    def test_select_quadrature(self):
        cfg = config(g=0.2, r=0.3)
        v = quadrature_variance(cfg, 0.1)
        assert select_quadrature(cfg, 0.1, "x") == v.var_x
        assert select_quadrature(cfg, 0.1, "p") == v.var_p
        assert select_quadrature(cfg, 0.1, "squeezed") <= min(v.var_x, v.var_p) + 1e-12
        with pytest.raises(DomainError):
            select_quadrature(cfg, 0.1, "q")

    def test_spectrum_keeps_grid_order(self):
        grid = [3.0, 0.1, 1.0]
        pts = spectrum(config(g=0.1), grid)
        assert [p.omega for p in pts] == grid


class TestDamping:
    def test_efficiency(self):
        eta, clamped = damping_efficiency(2.1, 0.8, 1.15)
        assert eta == pytest.approx(0.265)
        assert not clamped

    def test_identity_cases(self):
        assert damping_corrected_variance(0.3, 2.0, 1.1, 1.1) == pytest.approx(0.3)
        assert damping_corrected_variance(0.3, 0.0, 0.2, 1.1) == pytest.approx(0.3)

    def test_clamp_warns(self):
        with pytest.warns(DampingClampWarning):
            assert damping_corrected_variance(0.3, 5.0, 0.0, 1.0) == 1.0

    def test_output_variance_applies_damping(self):
        cfg = config(g=0.2, r=0.8, damping=TwoPhotonDamping(2.1, 1.15))
        raw = quadrature_variance(cfg, 0.1)
        out = output_variance(cfg, 0.1)
        assert out.var_x == pytest.approx(0.265 * raw.var_x + 0.735)

    def test_no_warning_when_unclamped(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            damping_corrected_variance(0.3, 1.0, 1.0, 1.1)


class TestPhotonNumber:
    def test_vacuum(self):
        assert mean_photon_number(config(), 0.3) == pytest.approx(0.0, abs=1e-15)

    def test_pass_through(self):
        assert mean_photon_number(config(r=0.7), 0.3) == pytest.approx(math.sinh(0.7) ** 2)

    def test_quadratic_in_g(self):
        n1 = mean_photon_number(config(g=0.001, r=0.0), 0.2)
        n2 = mean_photon_number(config(g=0.002, r=0.0), 0.2)
        assert n2 / n1 == pytest.approx(4.0, rel=1e-3)


class TestSubthreshold:
    def test_no_pump(self):
        v = subthreshold_variance(0.0, 1e6, 1e7, 0.9, 0.02)
        assert v.v_minus == pytest.approx(1.0)
        assert v.v_plus == pytest.approx(1.0)

    def test_opo1_row(self):
        v = subthreshold_variance(70 / 90, 18e6, 68e6, 0.97, 0.030)
        assert 10 * math.log10(v.v_minus) == pytest.approx(-9.36, abs=0.01)

    def test_ideal_limit(self):
        v = subthreshold_variance(1 - 1e-12, 0.0, 1.0, 1.0, 0.0)
        assert v.v_minus < 1e-5

    def test_singular(self):
        with pytest.raises(DomainError):
            subthreshold_variance(1.0, 0.0, 1.0, 1.0, 0.0)


@given(st.floats(0.0, 0.98), st.floats(0.001, 0.01))
def test_subthreshold_monotone_in_pump(ratio, step):
    lo = subthreshold_variance(ratio, 1e6, 1e7, 0.95, 0.0).v_minus
    hi = subthreshold_variance(min(ratio + step, 0.999), 1e6, 1e7, 0.95, 0.0).v_minus
    assert hi < lo


def test_damping_kink_at_pump_squeezing():
    rs = np.linspace(0.5, 1.8, 131)
    out = np.array([damping_corrected_variance(0.2, 0.5, r, 1.15) for r in rs])
    slopes = np.diff(out) / np.diff(rs)
    left, right = slopes[rs[1:] <= 1.15], slopes[rs[:-1] >= 1.15]
    np.testing.assert_allclose(left, left[0], rtol=1e-9)
    np.testing.assert_allclose(right, right[0], rtol=1e-9)
    assert left[0] == pytest.approx(-right[0])
