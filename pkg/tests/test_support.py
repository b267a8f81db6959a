from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelab.support import (
    IntervalUnion,
    LatticeFamily,
    limit_support,
    set_A,
    set_B,
    set_C,
    support_a,
    support_c,
    support_d,
)

# small rationals keep the unions readable when hypothesis shrinks
fracs = st.fractions(min_value=-4, max_value=4, max_denominator=12)


@st.composite
def unions(draw, max_pieces=4):
    out = IntervalUnion()
    for _ in range(draw(st.integers(0, max_pieces))):
        a, b = sorted((draw(fracs), draw(fracs)))
        kind = draw(st.sampled_from(["closed", "half_open", "open"]))
        if kind == "open" and a == b:
            continue
        out = out | getattr(IntervalUnion, kind)(a, b)
    return out


probe_points = st.lists(fracs, min_size=1, max_size=20)


@settings(max_examples=200, deadline=None)
@given(unions(), unions(), probe_points)
def test_union_and_intersection_agree_with_membership(a, b, xs):
    for x in xs:
        assert ((a | b).contains(x)) == (a.contains(x) or b.contains(x))
        assert ((a & b).contains(x)) == (a.contains(x) and b.contains(x))


@settings(max_examples=200, deadline=None)
@given(unions(), unions(), unions())
def test_set_algebra_laws(a, b, c):
    assert a | b == b | a
    assert a & b == b & a
    assert (a | b) | c == a | (b | c)
    assert (a & b) & c == a & (b & c)
    assert a & (b | c) == (a & b) | (a & c)
    assert a | a == a and a & a == a


@settings(max_examples=200, deadline=None)
@given(unions(), fracs, probe_points)
def test_translate_and_mirror(a, t, xs):
    for x in xs:
        assert a.translate(t).contains(x + t) == a.contains(x)
        assert a.scale(-1).contains(-x) == a.contains(x)


@settings(max_examples=100, deadline=None)
@given(unions())
def test_normal_form_is_sorted_and_disjoint(a):
    ivs = list(a)
    for left, right in zip(ivs, ivs[1:]):
        assert left.hi <= right.lo
        if left.hi == right.lo:
            # a shared endpoint must be missing from both sides
            assert not left.hi_closed and not right.lo_closed
    assert a.measure >= 0


@settings(max_examples=100, deadline=None)
@given(unions(), probe_points)
def test_json_roundtrip(a, xs):
    b = IntervalUnion.from_json(a.to_json_full())
    assert a == b
    for x in xs:
        assert a.contains(x) == b.contains(x)


def test_measure_and_bounds():
    u = IntervalUnion.symmetric(F(1, 7), F(2, 7))
    assert u.measure == F(2, 7)
    assert u.bounds == (F(-2, 7), F(2, 7))
    assert IntervalUnion().is_empty


def test_first_generation_sets():
    s = F(1, 7)
    assert set_A(0) == IntervalUnion.symmetric(F(12, 7), F(13, 7)) | IntervalUnion.symmetric(
        F(15, 7), F(16, 7))
    assert set_C(0) == IntervalUnion.closed(-1 - s, -1 + s) | IntervalUnion.closed(1 - s, 1 + s)
    assert set_B(0) == IntervalUnion.symmetric(F(24, 7), F(25, 7)) | IntervalUnion.symmetric(
        F(31, 7), F(32, 7))


def test_set_A_count_and_measure():
    # 2^(k+1) centres, each carrying two intervals of length 1/7
    for k in range(3):
        A = set_A(k)
        assert len(A) == 2 ** (k + 2)
        assert A.measure == F(2 ** (k + 2), 7)


@pytest.mark.parametrize("k", range(4))
def test_generations_are_separated(k):
    # generation k lives in 8^k/2 < |x| < 8^(k+1) for every family
    for S in (set_A(k), set_B(k), set_C(k)):
        lo = min(abs(iv.lo) for iv in S if iv.lo > 0)
        hi = max(abs(iv.hi) for iv in S)
        assert F(8 ** k, 2) < lo
        assert hi < 8 ** (k + 1)


def test_generation_cap():
    with pytest.raises(ValueError):
        set_A(21)
    with pytest.raises(ValueError):
        set_C(-1)


def test_support_d_first_generation():
    fam = support_d(1)
    assert fam.step == 8
    assert fam.contains(1) and fam.contains(9) and fam.contains(-1 + 8 * 5)
    assert not fam.contains(0) and not fam.contains(4)


def test_support_c_contains_support_d():
    rng = np.random.default_rng(1)
    x = rng.uniform(-200, 200, 5000)
    for n in (1, 2):
        assert np.all(support_c(n).mask(x)[support_d(n).mask(x)])


def test_lattice_family_exact_and_float_membership_agree():
    fam = support_a(2)
    xs = [F(k, 97) for k in range(-97 * 70, 97 * 70, 13)]
    exact = np.array([fam.contains(x) for x in xs])
    floats = fam.mask(np.array([float(x) for x in xs]))
    assert np.array_equal(exact, floats)


def test_lattice_union_period():
    a = LatticeFamily(IntervalUnion.closed(0, F(1, 3)), 2)
    b = LatticeFamily(IntervalUnion.closed(1, F(4, 3)), 3)
    u = a.union(b)
    assert u.step == 6
    for x in (F(1, 6), F(13, 6), 1, 4, F(7, 6) + 3):
        assert u.contains(x) == (a.contains(x) or b.contains(x))


def test_limit_support():
    phi1 = limit_support("phi1", 4)
    assert phi1.contains(0) and phi1.contains(F(1, 2)) and phi1.contains(F(13, 7))
    assert not phi1.contains(F(5, 7))
    phi2 = limit_support("phi2", 2)
    assert phi2 == IntervalUnion.closed(F(-8, 7), F(-6, 7)) | IntervalUnion.closed(F(6, 7), F(8, 7))
    with pytest.raises(ValueError):
        limit_support("phi3")


def test_support_a_examples(ex_sv):
    assert support_a(1).contains(0) and support_a(1).contains(F(2, 7))
    assert support_a(1).contains(F(-1, 5))
    for n in range(1, 7):
        assert not support_a(n).contains(F(3, 10))
    assert abs(ex_sv(np.array([0.3]))[0][0]) < 1e-12


def test_limit_supports_disjoint():
    phi1, phi2 = limit_support("phi1", 64), limit_support("phi2", 64)
    assert phi1.contains(0) and not phi2.contains(0)
    assert (phi1 & phi2).measure == 0
    x = np.random.default_rng(0).uniform(-64, 64, 10_000)
    assert not np.any(phi1.mask(x) & phi2.mask(x))
