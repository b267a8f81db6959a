import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelab.bump import (
    BREAKPOINTS,
    build_p,
    estimate_margin_derivative,
    make_smooth_step,
    validate_p,
)
from wavelab.filters import SQRT2


@pytest.fixture(scope="module", params=[0, 1, 2])
def p_r(request):
    return request.param, build_p(request.param)


def test_build_validates(p_r):
    r, p = p_r
    assert p.meta["validated"]
    rep = validate_p(p, r)
    assert rep.qmf_residual < 1e-10
    assert rep.flat_zone_max == 0.0
    assert max(rep.derivative_max.values()) < 1.0
    assert rep.passed and rep.derivative_reliable


def test_plateau_and_zero_values(p1):
    x = np.linspace(-1 / 14, 1 / 14, 101)
    assert np.all(p1(x) == SQRT2)
    for a, b in ((1 / 7, 3 / 14), (3 / 7, 0.5)):
        z = np.linspace(a, b, 101)
        assert np.all(p1(z) == 0.0) and np.all(p1(-z) == 0.0)
    # the second plateau is the QMF partner of the first zero zone
    y = np.linspace(2 / 7, 5 / 14, 51)
    assert np.allclose(p1(y), SQRT2, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5, allow_nan=False))
def test_qmf_even_periodic(p1, x):
    v = p1(np.array([x, x + 0.5, -x, x + 1.0]))
    assert abs(v[0] ** 2 + v[1] ** 2 - 2.0) < 1e-12
    assert v[0] == pytest.approx(v[2], abs=1e-14)
    assert v[0] == pytest.approx(v[3], abs=1e-13)
    assert 0.0 <= v[0] <= SQRT2 + 1e-15


def test_monotone_on_half_period(p1):
    x = np.linspace(0, 0.5, 20001)
    v = p1(x)
    # p falls to 0 on [1/14, 1/7], rises on [3/14, 2/7], falls on [5/14, 3/7]
    segments = [(1 / 14, 1 / 7, -1), (3 / 14, 2 / 7, 1), (5 / 14, 3 / 7, -1)]
    for a, b, sign in segments:
        m = (x >= a) & (x <= b)
        assert np.all(sign * np.diff(v[m]) >= -1e-15)


def test_transition_endpoints():
    step = make_smooth_step()
    assert step.evaluate(np.array([0.0]))[0] == 0.0
    assert step.evaluate(np.array([1.0]))[0] == pytest.approx(1.0)
    t = np.linspace(0, 1, 1001)
    assert np.all(np.diff(step.evaluate(t)) >= 0)


def test_finite_grade_step_builds():
    p = build_p(0, make_smooth_step(3))
    assert p.meta["grade"] == 3
    assert validate_p(p, 0).passed


def test_margin_derivative_tracks_r():
    # the transition power needed grows with r; every stage keeps the bound
    powers = [build_p(r).meta["power"] for r in (0, 1, 2)]
    assert powers == sorted(powers)


def test_unflattened_step_fails_margin():
    # power 1 transitions are too steep near 1/7 for r = 2
    from wavelab.bump import _make_p

    p = _make_p(make_smooth_step().with_power(1), 2)
    est, _ = estimate_margin_derivative(p, 2)
    assert max(est.values()) > 1.0


def test_negative_r_rejected():
    with pytest.raises(ValueError):
        build_p(-1)


def test_breakpoints_lie_on_multiples_of_one_28th():
    for q in BREAKPOINTS.values():
        assert (28 * q).denominator == 1
    assert math.isclose(float(BREAKPOINTS["plateau_end"]), 1 / 14)
