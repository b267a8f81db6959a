"""Exact interval-set calculus on the real line.

Sets are finite unions of intervals with :class:`fractions.Fraction`
endpoints.  Lattice families ``step*Z + base`` are stored folded into a
single fundamental window so membership is one reduction plus one lookup.

The support formulas for the smooth example bank (the sets ``A_k``,
``B_k``, ``C_k`` and the lattice families carrying the entries of the
3n-step partial products) are built on top of these two types.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Interval",
    "IntervalUnion",
    "LatticeFamily",
    "as_fraction",
    "set_A",
    "set_B",
    "set_C",
    "support_a",
    "support_c",
    "support_d",
    "limit_support",
    "MAX_GENERATION",
]

MAX_GENERATION = 20

Number = int | Fraction | str


def as_fraction(value: Number | float) -> Fraction:
    """Coerce ``value`` to a Fraction; strings may be ``"p/q"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are only accepted when they are exactly representable
        return Fraction(value)
    return Fraction(value)


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class Interval:
    """A single interval ``lo..hi`` with explicit closedness at each end."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.hi < self.lo:
            raise ValueError(f"empty interval {self.lo} > {self.hi}")

    @property
    def is_empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return not (self.lo_closed and self.hi_closed)

    def contains(self, x: Fraction) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def shifted(self, t: Fraction) -> "Interval":
        return Interval(self.lo + t, self.hi + t, self.lo_closed, self.hi_closed)

    def scaled(self, s: Fraction) -> "Interval":
        if s > 0:
            return Interval(self.lo * s, self.hi * s, self.lo_closed, self.hi_closed)
        if s < 0:
            return Interval(self.hi * s, self.lo * s, self.hi_closed, self.lo_closed)
        raise ValueError("scale factor must be nonzero")

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{_fmt(self.lo)}, {_fmt(self.hi)}{right}"


def _touch(a: Interval, b: Interval) -> bool:
    """True when ``a`` (with a.lo <= b.lo) overlaps or abuts ``b`` with no gap."""
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return a.hi_closed or b.lo_closed
    return False


def _merge(a: Interval, b: Interval) -> Interval:
    if b.hi > a.hi:
        hi, hi_closed = b.hi, b.hi_closed
    elif b.hi < a.hi:
        hi, hi_closed = a.hi, a.hi_closed
    else:
        hi, hi_closed = a.hi, a.hi_closed or b.hi_closed
    lo_closed = a.lo_closed or (b.lo == a.lo and b.lo_closed)
    return Interval(a.lo, hi, lo_closed, hi_closed)


def _start_key(iv: Interval):
    # closed starts sort before open starts at the same point
    return (iv.lo, not iv.lo_closed)


def _normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    items = sorted((iv for iv in intervals if not iv.is_empty), key=_start_key)
    out: list[Interval] = []
    for iv in items:
        if out and _touch(out[-1], iv):
            out[-1] = _merge(out[-1], iv)
        else:
            out.append(iv)
    return tuple(out)


class IntervalUnion:
    """Sorted, disjoint, merged union of intervals with rational endpoints.

    Instances are immutable; every set operation returns a new union.
    """

    __slots__ = ("intervals", "_los", "_lo_f", "_hi_f")

    def __init__(self, intervals: Iterable[Interval] = ()):
        self.intervals: tuple[Interval, ...] = _normalize(intervals)
        self._los = [iv.lo for iv in self.intervals]
        self._lo_f = np.array([float(iv.lo) for iv in self.intervals])
        self._hi_f = np.array([float(iv.hi) for iv in self.intervals])

    # construction helpers -------------------------------------------------

    @classmethod
    def closed(cls, lo: Number, hi: Number) -> "IntervalUnion":
        return cls([Interval(as_fraction(lo), as_fraction(hi), True, True)])

    @classmethod
    def half_open(cls, lo: Number, hi: Number) -> "IntervalUnion":
        return cls([Interval(as_fraction(lo), as_fraction(hi), True, False)])

    @classmethod
    def open(cls, lo: Number, hi: Number) -> "IntervalUnion":
        return cls([Interval(as_fraction(lo), as_fraction(hi), False, False)])

    @classmethod
    def symmetric(cls, lo: Number, hi: Number, closed=(True, True)) -> "IntervalUnion":
        """``±[lo, hi]``: the interval and its mirror image through 0."""
        iv = Interval(as_fraction(lo), as_fraction(hi), *closed)
        return cls([iv, iv.scaled(Fraction(-1))])

    # set algebra ----------------------------------------------------------

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    __or__ = union

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        a, b = self.intervals, other.intervals
        i = j = 0
        while i < len(a) and j < len(b):
            x, y = a[i], b[j]
            if x.lo > y.lo:
                lo, lo_closed = x.lo, x.lo_closed
            elif y.lo > x.lo:
                lo, lo_closed = y.lo, y.lo_closed
            else:
                lo, lo_closed = x.lo, x.lo_closed and y.lo_closed
            if x.hi < y.hi:
                hi, hi_closed = x.hi, x.hi_closed
            elif y.hi < x.hi:
                hi, hi_closed = y.hi, y.hi_closed
            else:
                hi, hi_closed = x.hi, x.hi_closed and y.hi_closed
            if lo < hi or (lo == hi and lo_closed and hi_closed):
                out.append(Interval(lo, hi, lo_closed, hi_closed))
            # advance whichever ends first
            if x.hi < y.hi or (x.hi == y.hi and not x.hi_closed):
                i += 1
            else:
                j += 1
        return IntervalUnion(out)

    __and__ = intersection

    def translate(self, t: Number) -> "IntervalUnion":
        t = as_fraction(t)
        return IntervalUnion(iv.shifted(t) for iv in self.intervals)

    def scale(self, s: Number) -> "IntervalUnion":
        s = as_fraction(s)
        return IntervalUnion(iv.scaled(s) for iv in self.intervals)

    def symmetrize(self) -> "IntervalUnion":
        return self.union(self.scale(-1))

    # queries ---------------------------------------------------------------

    def contains(self, x: Number) -> bool:
        x = as_fraction(x)
        k = bisect.bisect_right(self._los, x) - 1
        # the interval starting exactly at x may be open; check neighbour too
        for idx in (k, k - 1):
            if 0 <= idx < len(self.intervals) and self.intervals[idx].contains(x):
                return True
        return False

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def mask(self, x) -> np.ndarray:
        """Vectorized float membership (closedness is ignored: measure zero)."""
        x = np.asarray(x, dtype=float)
        if not self.intervals:
            return np.zeros(x.shape, dtype=bool)
        k = np.searchsorted(self._lo_f, x, side="right") - 1
        kc = np.clip(k, 0, len(self.intervals) - 1)
        return (k >= 0) & (x <= self._hi_f[kc])

    def distance_to_boundary(self, x) -> np.ndarray:
        """Float distance from each x to the nearest endpoint of the union."""
        x = np.asarray(x, dtype=float)
        if not self.intervals:
            return np.full(x.shape, np.inf)
        ends = np.sort(np.concatenate([self._lo_f, self._hi_f]))
        k = np.searchsorted(ends, x)
        left = ends[np.clip(k - 1, 0, len(ends) - 1)]
        right = ends[np.clip(k, 0, len(ends) - 1)]
        return np.minimum(np.abs(x - left), np.abs(x - right))

    @property
    def endpoints(self) -> list[Fraction]:
        pts = set()
        for iv in self.intervals:
            pts.add(iv.lo)
            pts.add(iv.hi)
        return sorted(pts)

    @property
    def measure(self) -> Fraction:
        return sum((iv.hi - iv.lo for iv in self.intervals), Fraction(0))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def bounds(self) -> tuple[Fraction, Fraction]:
        if not self.intervals:
            raise ValueError("empty union has no bounds")
        return self.intervals[0].lo, self.intervals[-1].hi

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalUnion) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        if not self.intervals:
            return "IntervalUnion(∅)"
        return "IntervalUnion(" + " ∪ ".join(str(iv) for iv in self.intervals) + ")"

    # serialization ---------------------------------------------------------

    def to_json(self) -> list[list[str]]:
        """Arrays of ``["p/q", "r/s"]`` pairs (closedness is dropped)."""
        return [[_fmt(iv.lo), _fmt(iv.hi)] for iv in self.intervals]

    def to_json_full(self) -> list[dict]:
        return [
            {"lo": _fmt(iv.lo), "hi": _fmt(iv.hi),
             "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}
            for iv in self.intervals
        ]

    @classmethod
    def from_json(cls, payload: Sequence) -> "IntervalUnion":
        out = []
        for item in payload:
            if isinstance(item, dict):
                out.append(Interval(Fraction(item["lo"]), Fraction(item["hi"]),
                                    item.get("lo_closed", True),
                                    item.get("hi_closed", False)))
            else:
                lo, hi = item
                out.append(Interval(Fraction(lo), Fraction(hi), True, False))
        return cls(out)


EMPTY = IntervalUnion()


class LatticeFamily:
    """The periodic set ``step*Z + base``, stored folded into one window.

    The window is ``[origin, origin + step)`` with ``origin`` the left end
    of ``base``; membership reduces x into the window and tests the folded
    base.
    """

    def __init__(self, base: IntervalUnion, step: Number):
        step = as_fraction(step)
        if step <= 0:
            raise ValueError("lattice step must be positive")
        self.base = base
        self.step = step
        if base.is_empty:
            self.origin = Fraction(0)
            self.folded = EMPTY
            return
        lo, hi = base.bounds
        self.origin = lo
        window = IntervalUnion.half_open(lo, lo + step)
        pieces = []
        m_max = math.ceil((hi - lo) / step)
        for m in range(0, m_max + 1):
            pieces.append(base.translate(-m * step).intersection(window))
        folded = EMPTY
        for piece in pieces:
            folded = folded.union(piece)
        self.folded = folded

    def reduce(self, x: Fraction) -> Fraction:
        x = as_fraction(x)
        return x - self.step * math.floor((x - self.origin) / self.step)

    def contains(self, x: Number) -> bool:
        x = as_fraction(x)
        y = self.reduce(x)
        if self.folded.contains(y):
            return True
        # closed right ends of base that land exactly on the window boundary
        return self.folded.contains(y + self.step)

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def mask(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        step, origin = float(self.step), float(self.origin)
        y = x - step * np.floor((x - origin) / step)
        return self.folded.mask(y)

    def union(self, other: "LatticeFamily") -> "LatticeFamily":
        """Union of two lattice families over the least common period."""
        period = _rational_lcm(self.step, other.step)
        return LatticeFamily(self._expand(period).union(other._expand(period)), period)

    def _expand(self, period: Fraction) -> IntervalUnion:
        reps = period / self.step
        if reps.denominator != 1:
            raise ValueError("period must be a multiple of the lattice step")
        out = EMPTY
        for m in range(int(reps)):
            out = out.union(self.folded.translate(m * self.step))
        return out

    def distance_to_boundary(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        step, origin = float(self.step), float(self.origin)
        y = x - step * np.floor((x - origin) / step)
        d = self.folded.distance_to_boundary(y)
        d = np.minimum(d, self.folded.distance_to_boundary(y - step))
        return np.minimum(d, self.folded.distance_to_boundary(y + step))

    def to_json(self) -> dict:
        return {"step": _fmt(self.step), "base": self.base.to_json()}

    def __repr__(self) -> str:
        return f"LatticeFamily({_fmt(self.step)}Z + {self.base!r})"


def _rational_lcm(a: Fraction, b: Fraction) -> Fraction:
    den = math.lcm(a.denominator, b.denominator)
    na, nb = int(a * den), int(b * den)
    return Fraction(math.lcm(na, nb), den)


# -- the support sets of the smooth example ---------------------------------

SEVENTH = Fraction(1, 7)
PM_ONE_TWO = IntervalUnion.symmetric(SEVENTH, 2 * SEVENTH)          # ±[1/7, 2/7]
PM_THREE_FOUR = IntervalUnion.symmetric(3 * SEVENTH, 4 * SEVENTH)   # ±[3/7, 4/7]
CENTRAL = IntervalUnion.closed(-SEVENTH, SEVENTH)                   # [-1/7, 1/7]
BASE_WINDOW = IntervalUnion.closed(-2 * SEVENTH, 2 * SEVENTH).union(PM_THREE_FOUR)


def _check_generation(k: int) -> None:
    if k < 0:
        raise ValueError("generation index must be nonnegative")
    if k > MAX_GENERATION:
        raise ValueError(f"generation {k} exceeds the cap {MAX_GENERATION}")


def _signed_sums(k: int, weight: int) -> list[int]:
    powers = [weight * 8 ** j for j in range(k + 1)]
    return sorted({sum(s * p for s, p in zip(signs, powers))
                   for signs in itertools.product((1, -1), repeat=k + 1)})


def _translates(centers: Iterable[int], tile: IntervalUnion) -> IntervalUnion:
    return IntervalUnion(iv.shifted(Fraction(c)) for c in centers for iv in tile)


def set_A(k: int) -> IntervalUnion:
    """Union over sign vectors of ``sum 2 a_j 8^j + ±[1/7, 2/7]``."""
    _check_generation(k)
    return _translates(_signed_sums(k, 2), PM_ONE_TWO)


def set_B(k: int) -> IntervalUnion:
    """Union over sign vectors of ``sum 4 a_j 8^j + ±[3/7, 4/7]``."""
    _check_generation(k)
    return _translates(_signed_sums(k, 4), PM_THREE_FOUR)


def set_C(k: int) -> IntervalUnion:
    """Union over sign vectors of ``sum a_j 8^j + [-1/7, 1/7]``."""
    _check_generation(k)
    return _translates(_signed_sums(k, 1), CENTRAL)


def _union_all(sets: Iterable[IntervalUnion]) -> IntervalUnion:
    return IntervalUnion(iv for s in sets for iv in s)


def support_a(n: int) -> LatticeFamily:
    """Predicted support of the upper-left entry of the 3n-step product.

    The two lattice families are joined as a top-level union.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_generation(n - 1)
    inner = _union_all([BASE_WINDOW]
                       + [set_A(k) for k in range(n - 1)]
                       + [set_B(k) for k in range(n)])
    outer = LatticeFamily(set_A(n - 1), 4 * 8 ** (n - 1))
    return LatticeFamily(inner, 8 ** n).union(outer)


def support_c(n: int) -> LatticeFamily:
    """Predicted support of the lower-left entry of the 3n-step product."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_generation(n - 1)
    return LatticeFamily(_union_all(set_C(k) for k in range(n)), 8 ** n)


def support_d(n: int) -> LatticeFamily:
    """Predicted support of the lower-right entry of the 3n-step product."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_generation(n - 1)
    return LatticeFamily(set_C(n - 1), 8 ** n)


def generations_for_radius(radius: Number) -> int:
    """Number of generations whose components can meet ``[-radius, radius]``."""
    radius = as_fraction(radius)
    k = 0
    # generation k lives in |x| > 8^k / 2
    while Fraction(8 ** k, 2) < radius:
        k += 1
    return k


def limit_support(which: str, radius: Number = 8 ** 4) -> IntervalUnion:
    """Support of the limiting scaling functions inside ``[-radius, radius]``.

    ``which`` is ``"phi1"`` (base window plus all A_k and B_k) or ``"phi2"``
    (all C_k).  Only generations that reach into the window are built.
    """
    radius = as_fraction(radius)
    if radius > 8 ** 7:
        raise ValueError("window radius is capped at 8**7")
    n_gen = generations_for_radius(radius)
    if which == "phi1":
        sets = [BASE_WINDOW] + [set_A(k) for k in range(n_gen)] + [set_B(k) for k in range(n_gen)]
    elif which == "phi2":
        sets = [set_C(k) for k in range(n_gen)]
    else:
        raise ValueError(f"unknown scaling component {which!r}")
    window = IntervalUnion.closed(-radius, radius)
    return _union_all(sets).intersection(window)
