import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelab import analysis as an
from wavelab.classical import haar_psi_hat_closed_form
from wavelab.gmra import journe_multiplicity

# brute-force lattice sums with |2^j (x+k)| <= 4096, frozen from an independent loop
DIMENSION_ORACLE = {0.05: 1.0000441281647006, 0.2: 0.8627144181969341, 0.33: 0.0}


def _brute_dimension(psi, x, R=4096.0):
    total = 0.0
    for j in range(1, 40):
        s = 2.0 ** j
        k = np.arange(math.ceil(-x - R / s), math.floor(-x + R / s) + 1)
        if k.size:
            total += float(np.sum(np.abs(psi(s * (x + k))) ** 2))
    return total


# -- bounds ---------------------------------------------------------------------------

def test_decay_bound_values():
    assert an.decay_bound(1, 1) == pytest.approx(9 / (2 ** 1.5 * 8 ** 3))
    assert an.weighted_decay_bound(1, 0) == pytest.approx(72 / 8 ** 1.5)
    for n in range(1, 6):
        ratio = an.weighted_decay_bound(n + 1, 2) / an.weighted_decay_bound(n, 2)
        assert ratio == pytest.approx(3 / 8 ** 1.5)


def test_per_phi_upper_bound():
    assert an.per_phi_upper_bound(1) == pytest.approx(32 / 3)
    assert an.per_phi_upper_bound(2) == pytest.approx(64 / (1 - 2 / 64))
    assert math.isinf(an.per_phi_upper_bound(0))


# -- grids ----------------------------------------------------------------------------

def test_avoid_breakpoints_moves_sevenths():
    x = np.array([1 / 7, 3 / 7, 0.123456])
    y = an.avoid_breakpoints(x)
    assert np.all(np.abs(y[:2] - x[:2]) > 0) and y[2] == x[2]


def test_jittered_grid_deterministic():
    a = an.jittered_grid(-4, 4, 256, seed=9, exclude=1e-3)
    b = an.jittered_grid(-4, 4, 256, seed=9, exclude=1e-3)
    assert np.array_equal(a, b)
    assert np.all(np.abs(a) >= 1e-3) and a.min() >= -4 - 1e-3 and a.max() < 4 + 1e-3


# -- dimension function ----------------------------------------------------------------

def test_dimension_function_journe_is_multiplicity(j_model):
    x = an.jittered_grid(-0.5, 0.5, 200, seed=4)
    D, trunc = an.dimension_function(j_model, x)
    assert np.array_equal(D, journe_multiplicity()(x).astype(float))
    assert trunc["tail_bound"] == 0.0


def test_dimension_function_journe_examples(j_model):
    D, _ = an.dimension_function(j_model, [0.05, 0.3, -0.45])
    assert list(D) == [2.0, 0.0, 1.0]


@pytest.mark.parametrize("x", sorted(DIMENSION_ORACLE))
def test_dimension_function_example_matches_brute_force(ex_model, ex_psi, x):
    D, trunc = an.dimension_function(ex_model, [x])
    assert D[0] == pytest.approx(DIMENSION_ORACLE[x], rel=1e-9, abs=1e-12)
    assert D[0] == pytest.approx(_brute_dimension(ex_psi, x), rel=1e-9, abs=1e-12)
    assert trunc["tail_bound"] < 1e-10


def test_dimension_function_truncation_overrides(ex_model):
    full, _ = an.dimension_function(ex_model, [0.05])
    part, trunc = an.dimension_function(ex_model, [0.05], j_max=3, k_max=2)
    assert part[0] <= full[0] + 1e-15
    assert trunc["j_range"] == [1, 3] and trunc["k_max"] == 2
    with pytest.raises(ValueError):
        an.dimension_function(ex_model, [0.05], j_max=0)


def test_dimension_integral_equals_wavelet_energy(ex_model):
    # int_{-1/2}^{1/2} D = ||psi||^2, which is 3/7 here (and not int m = 1)
    x = (np.arange(2000) + 0.5) / 2000 - 0.5
    D, _ = an.dimension_function(ex_model, an.avoid_breakpoints(x))
    assert D.mean() == pytest.approx(3 / 7, abs=2e-3)


# -- periodization -------------------------------------------------------------------------

def test_periodization_of_indicator():
    f = lambda y: (np.abs(y) < 0.25).astype(float)  # noqa: E731
    v, trunc = an.periodization(f, [0.0, 0.4, 0.2], k_max=4)
    assert list(v) == [1.0, 0.0, 1.0]
    assert trunc["k_max"] == 4
    with pytest.raises(ValueError):
        an.periodization(f, [0.0], k_max=0)


def test_per_reports_example(ex_model, ex_bank):
    assert an.per_upper_report(ex_model, 1, n=300).passed
    assert an.per_lower_witness_report(ex_model, ex_bank.m, n=300).passed
    assert an.per_support_report(ex_model, ex_bank.m, n=300).passed


def test_per_support_journe(j_model, jb):
    assert an.per_support_report(j_model, jb.m, n=300).passed


# -- Calderón and shift -------------------------------------------------------------------

@pytest.mark.parametrize("name", ["j_model", "ex_model", "haar_model", "shannon_model"])
def test_calderon_is_one(name, request):
    model = request.getfixturevalue(name)
    xi = an.jittered_grid(-4, 4, 64, seed=2, exclude=1e-3)
    vals, trunc = an.calderon_sum(model, xi)
    assert np.abs(vals - 1).max() < 1e-6
    assert trunc["low_tail_bound"] + trunc["high_tail_bound"] < 1e-6


def test_calderon_haar_against_closed_form(haar_model):
    for xi in (0.7, -1.3, 3.1):
        vals, trunc = an.calderon_sum(haar_model, [xi])
        j0, j1 = trunc["j_range"]
        oracle = sum(abs(haar_psi_hat_closed_form(np.array([2.0 ** j * xi]))[0]) ** 2
                     for j in range(j0, j1 + 1))
        assert vals[0] == pytest.approx(oracle, abs=1e-13)


def test_calderon_rejects_zero(ex_model):
    with pytest.raises(ValueError):
        an.calderon_sum(ex_model, [0.0])


@pytest.mark.parametrize("name", ["j_model", "ex_model", "haar_model", "shannon_model"])
def test_shift_vanishes(name, request):
    model = request.getfixturevalue(name)
    xi = an.jittered_grid(-4, 4, 24, seed=6, exclude=1e-3)
    for q in (-5, -3, -1, 1, 3, 5):
        vals, _ = an.shift_sum(model, xi, q)
        assert np.abs(vals).max() < 1e-6


@pytest.mark.parametrize("q", [0, 2, -4, 1.5])
def test_shift_rejects_even_or_fractional_q(ex_model, q):
    with pytest.raises(ValueError):
        an.shift_sum(ex_model, [0.3], q)


# -- decay ------------------------------------------------------------------------------

@pytest.mark.parametrize("r", [0, 1, 2])
def test_decay_profile_below_bound(r):
    from wavelab.bump import build_p
    from wavelab.gmra import ScalingVector, example_bank

    sv = ScalingVector(example_bank(build_p(r)))
    rep = an.decay_report(sv, r)
    assert rep.passed
    assert rep.details["strictly_decreasing"]


def test_decay_profile_rejects_generation_zero(ex_sv):
    with pytest.raises(ValueError):
        an.decay_profile(ex_sv, 0, 1, 0)


# -- time domain -----------------------------------------------------------------------

def test_haar_time_domain_reproduces_box_difference(haar_model):
    t = np.linspace(-0.5, 1.5, 81)
    sf = an.time_domain_samples(haar_model, t, cutoff=512.0, energy_tol=1e-2, panel_width=0.25)
    exact = np.where((t >= 0) & (t < 0.5), 1.0, np.where((t >= 0.5) & (t < 1), -1.0, 0.0))
    # away from the jumps the truncated inverse transform converges
    far = np.min(np.abs(t[:, None] - np.array([0.0, 0.5, 1.0])), axis=1) > 0.05
    assert np.abs(sf.values.real - exact)[far].max() < 0.05
    assert sf.metadata["max_abs_imag"] < 1e-6


@pytest.mark.slow
def test_example_time_domain_real_and_plancherel(ex_model):
    t = np.linspace(-40, 40, 4001)
    sf = an.time_domain_samples(ex_model, t)
    assert sf.metadata["max_abs_imag"] < 1e-6
    energy_t = float(np.sum(np.abs(sf.values) ** 2) * (t[1] - t[0]))
    assert energy_t == pytest.approx(sf.metadata["frequency_energy"], abs=1e-3)
    assert sf.metadata["frequency_energy"] == pytest.approx(3 / 7, abs=1e-4)


def test_cutoff_error(ex_model):
    with pytest.raises(an.CutoffError) as info:
        an.time_domain_samples(ex_model, np.array([0.0]), cutoff=1.0)
    assert info.value.required > 1.0


# -- proof identities -----------------------------------------------------------------------

def test_intertwining_random_pairs(ex_bank, rng):
    x = an.avoid_breakpoints(rng.uniform(-0.5, 0.5, 500))
    for _ in range(5):
        f1 = rng.normal(size=9) + 1j * rng.normal(size=9)
        f2 = rng.normal(size=9) + 1j * rng.normal(size=9)
        assert an.check_intertwining(ex_bank, f1, f2, x).max_residual < 1e-10


def test_intertwining_constant_multiplier(jb):
    x = an.avoid_breakpoints(np.linspace(-0.5, 0.5, 301))
    rep = an.check_intertwining(jb, [1.0], [0.0], x)
    assert rep.max_residual < 1e-14 and rep.details["max_abs_rhs"] > 0


@pytest.mark.parametrize("k", [-3, 0, 1, 7])
def test_SG_base(ex_bank, k):
    x = an.avoid_breakpoints(np.linspace(-0.5, 0.5, 401))
    rep = an.check_SG_base(ex_bank, k, x)
    assert rep.max_residual < 1e-12
    # dropping the sqrt(2) leaves a visible residual
    assert rep.details["residual_without_sqrt2"] > 0.1


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 4.0), st.sampled_from([-1.0, 1.0]))
def test_calderon_property(ex_model, a, sign):
    vals, _ = an.calderon_sum(ex_model, [sign * a])
    assert abs(vals[0] - 1) < 1e-9


# -- reports ----------------------------------------------------------------------------

def test_lemma_cross_check_small(ex_bank):
    rep = an.lemma_cross_check(ex_bank, 1, n_points=5000, seed=1)
    assert rep.passed and rep.details["max_upper_right"] < 1e-15


def test_tiny_tolerance_is_explained(haar_model):
    rep = an.calderon_report(haar_model, n=32, tolerance=1e-20)
    assert not rep.passed
    assert "explanation" in rep.details


# -- worked examples and the direct frame check ------------------------------------------------

def test_calderon_examples(j_model, ex_model, haar_model):
    assert an.calderon_sum(j_model, [0.6])[0][0] == 1.0
    assert an.calderon_sum(ex_model, [0.3])[0][0] == pytest.approx(1.0, abs=1e-6)
    assert an.calderon_sum(haar_model, [0.7])[0][0] == pytest.approx(1.0, abs=1e-6)


def test_shift_journe_example(j_model):
    assert an.shift_sum(j_model, [0.1], 1)[0][0] == 0


def test_decay_profile_generation_three(ex_sv):
    assert an.decay_profile(ex_sv, 0, 1, 3) <= 5184 / 8 ** 4.5
    assert 5184 / 8 ** 4.5 == pytest.approx(an.weighted_decay_bound(3, 1))


def test_intertwining_second_column(ex_bank):
    x = an.avoid_breakpoints(np.linspace(-0.5, 0.5, 301))
    assert an.check_intertwining(ex_bank, [0.0], [1.0], x).max_residual < 1e-12
    assert an.check_intertwining(ex_bank, [1.0], [0.0], x).max_residual < 1e-12


@pytest.mark.slow
def test_direct_frame_energy_band_limited(ex_psi):
    # sum_{j,k} |<f, psi_jk>|^2 = ||f||^2 for a smooth f_hat on [0.3, 2]
    a, b = 0.3, 2.0
    gl, gw = np.polynomial.legendre.leggauss(32)
    edges = np.linspace(a, b, 129)
    mid, half = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2
    xi = (mid[:, None] + half[:, None] * gl).ravel()
    wt = (half[:, None] * gw).ravel()
    f_hat = np.exp(-1 / ((xi - a) * (b - xi)))
    norm = float(np.sum(wt * f_hat ** 2))
    k = np.arange(-1024, 1025)
    total = 0.0
    # psi_hat vanishes on |x| < 1/7, so 2^-j * 2 < 1/7 contributes nothing
    for j in range(-6, 4):
        g = f_hat * np.conj(ex_psi(xi / 2.0 ** j)) * wt
        c = 2.0 ** (-j / 2) * (np.exp(2j * np.pi * np.outer(k, xi) / 2.0 ** j) @ g)
        total += float(np.sum(np.abs(c) ** 2))
    assert total == pytest.approx(norm, rel=1e-2)
