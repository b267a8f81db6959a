import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelab.classical import (
    CascadeConvergenceError,
    FilterEquationError,
    cascade_scaling,
    check_classical_eqs,
    cohen_phi_hat_closed_form,
    haar_psi_hat_closed_form,
    high_pass_from_low,
    nonvanishing_on_quarter,
    reference_filters,
    wavelet_hat_classical,
)
from wavelab.filters import PeriodicFilter, SQRT2


@pytest.mark.parametrize("name", ["haar", "shannon", "cohen"])
def test_reference_pairs_satisfy_filter_equations(name):
    res = check_classical_eqs(reference_filters(name))
    assert max(res.values()) < 1e-12


def test_cohen_cascade_matches_closed_form():
    x = np.linspace(-8, 8, 1024)
    err = np.abs(cascade_scaling(reference_filters("cohen"), x) - cohen_phi_hat_closed_form(x))
    assert err.max() < 1e-8


def test_haar_scaling_matches_transform_of_unit_box():
    x = np.linspace(-8, 8, 1001)
    oracle = np.exp(-1j * np.pi * x) * np.sinc(x)
    assert np.abs(cascade_scaling(reference_filters("haar"), x) - oracle).max() < 1e-10


def test_haar_wavelet_matches_direct_integration():
    x = np.linspace(-8, 8, 1000)
    err = np.abs(wavelet_hat_classical(reference_filters("haar"), x) - haar_psi_hat_closed_form(x))
    assert err.max() < 1e-10


def test_shannon_is_an_indicator():
    pair = reference_filters("shannon")
    x = np.array([0.0, 0.1, 0.49, -0.49, 0.51, 0.9, -0.99, 1.01, 3.0])
    phi = cascade_scaling(pair, x)
    psi = wavelet_hat_classical(pair, x)
    assert np.array_equal(phi.real, (np.abs(x) < 0.5).astype(float))
    assert np.array_equal(psi.real, ((np.abs(x) >= 0.5) & (np.abs(x) < 1)).astype(float))


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.5, 0.5, allow_nan=False))
def test_high_pass_from_low_is_orthogonal(y):
    h = reference_filters("cohen").h
    g = high_pass_from_low(h)
    x = np.array([y, y + 0.5])
    hx, gx = h(x), g(x)
    assert abs(np.sum(np.abs(gx) ** 2) - 2) < 1e-12
    assert abs(np.sum(hx * np.conj(gx))) < 1e-12


def test_high_pass_from_low_rejects_non_qmf():
    flat = PeriodicFilter("flat", lambda y: np.full(np.shape(y), SQRT2))
    with pytest.raises(FilterEquationError):
        high_pass_from_low(flat)


def test_cascade_refuses_unreachable_truncation():
    with pytest.raises(CascadeConvergenceError):
        cascade_scaling(reference_filters("haar"), np.array([1e6]))


def test_nonvanishing_on_quarter():
    assert nonvanishing_on_quarter(reference_filters("haar"))
    # cos(3 pi y) vanishes at y = 1/6
    assert not nonvanishing_on_quarter(reference_filters("cohen"), n=4 * 6 * 50 + 1)


def test_unknown_reference():
    with pytest.raises(ValueError):
        reference_filters("daubechies")


@pytest.mark.parametrize("name", ["haar", "shannon", "cohen"])
def test_cascade_self_consistency(name, rng):
    pair = reference_filters(name)
    x = rng.uniform(-20, 20, 500)
    lhs = cascade_scaling(pair, x)
    rhs = pair.h(x / 2) * cascade_scaling(pair, x / 2) / SQRT2
    assert np.abs(lhs - rhs).max() < 1e-12


@pytest.mark.parametrize("name", ["haar", "shannon", "cohen"])
def test_wavelet_vanishes_at_zero(name):
    assert wavelet_hat_classical(reference_filters(name), np.array([0.0]))[0] == 0


def test_shannon_modulus_and_derived_high_pass():
    pair = reference_filters("shannon")
    assert abs(wavelet_hat_classical(pair, np.array([0.75]))[0]) == 1.0
    g = high_pass_from_low(pair.h)
    y = np.array([-0.4, -0.3, -0.1, 0.0, 0.2, 0.3, 0.45])
    band = ((np.abs(y) >= 0.25) & (np.abs(y) < 0.5)).astype(float)
    assert np.abs(g(y) - SQRT2 * np.exp(2j * np.pi * y) * band).max() < 1e-15
