import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fold
from squeezelase.comb import (
    CavityGeometry,
    comb_detunings,
    default_tolerance,
    fold_detuning,
    fsr,
    linewidth_fwhm,
    transmission,
)
from squeezelase.errors import DomainError

CAV1 = CavityGeometry.from_losses(0.027, 0.01, 1.83, 0.12, 0.0015)
CAV2 = CavityGeometry.from_losses(0.021, 0.01, 1.83, 0.15, 0.004)


def test_fsr_values():
    assert fsr(CAV1) == pytest.approx(3.309e9, rel=1e-3)
    assert fsr(CAV2) == pytest.approx(3.814e9, rel=1e-3)


def test_transmission_peaks_and_half_max():
    f = fsr(CAV1)
    assert transmission(0.0, f, CAV1.r1, CAV1.r2) == pytest.approx(
        (1 - CAV1.r1**2) * (1 - CAV1.r2**2) / (1 - CAV1.r1 * CAV1.r2) ** 2
    )
    peak = transmission(f, f, CAV1.r1, CAV1.r2)
    half = transmission(0.5 * linewidth_fwhm(CAV1), f, CAV1.r1, CAV1.r2)
    assert half == pytest.approx(0.5 * peak, rel=1e-9)


def test_transmission_is_array_friendly():
    out = transmission(np.array([0.0, 1e8]), 3e9, 0.9, 0.9)
    assert out.shape == (2,)


def test_default_tolerance_is_half_narrower_linewidth():
    assert default_tolerance(CAV1, CAV2) == pytest.approx(0.5 * linewidth_fwhm(CAV1))


@given(st.floats(-1e13, 1e13), st.floats(1e8, 1e10))
def test_fold_matches_rounding_oracle(offset, period):
    assert abs(fold_detuning(offset, period)) == pytest.approx(abs(fold(offset, period)), abs=1e-3)


def test_equal_fsr_all_coresonant():
    report = comb_detunings(3e9, 3e9, 2e12, 1.0)
    assert all(e.co_resonant for e in report.entries)


def test_zero_tolerance_keeps_only_carrier():
    assert comb_detunings(3.309e9, 3.8141e9, 2e12, 0.0).co_resonant_modes() == [0]


def test_brute_force_search():
    f1, f2, tol = fsr(CAV1), fsr(CAV2), default_tolerance(CAV1, CAV2)
    report = comb_detunings(f1, f2, 2e12, tol)
    expected = [
        k for k in range(-400, 401)
        if abs(k * f2) <= 1e12 and (k == 0 or abs(fold(k * f2, f1)) <= tol)
    ]
    assert report.co_resonant_modes() == expected


def test_invalid_inputs():
    with pytest.raises(DomainError):
        comb_detunings(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        comb_detunings(1.0, 1.0, 1.0, -1.0)
    with pytest.raises(DomainError):
        CavityGeometry(0.0)
    with pytest.raises(DomainError):
        linewidth_fwhm(CavityGeometry(0.03))
