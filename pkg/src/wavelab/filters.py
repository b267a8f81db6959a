"""1-periodic filter functions.

A :class:`PeriodicFilter` wraps a vectorized callable defined on the
fundamental window ``[-1/2, 1/2)`` and enforces periodicity and its declared
support.  :class:`PiecewiseConstantFilter` adds exact evaluation for filters
whose values are rational multiples of a fixed unit (sqrt 2 for the wavelet
set banks), so identities between them can be checked with zero residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .support import IntervalUnion, as_fraction

SQRT2 = math.sqrt(2.0)
HALF = Fraction(1, 2)
FULL_PERIOD = IntervalUnion.half_open(-HALF, HALF)


def reduce_periodic(x) -> np.ndarray:
    """Map x to its representative in ``[-1/2, 1/2)`` modulo 1."""
    x = np.asarray(x, dtype=float)
    return x - np.floor(x + 0.5)


def reduce_exact(x: Fraction) -> Fraction:
    x = as_fraction(x)
    return x - math.floor(x + HALF)


@dataclass(frozen=True)
class PeriodicFilter:
    """A 1-periodic scalar function with declared support and metadata.

    ``func`` receives points already reduced into ``[-1/2, 1/2)``; values at
    reduced points outside ``support`` are forced to zero.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    support: IntervalUnion = FULL_PERIOD
    smoothness: float = math.inf
    is_real: bool = True
    is_even: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, x) -> np.ndarray:
        y = reduce_periodic(x)
        values = np.asarray(self.func(y))
        dtype = float if self.is_real else complex
        values = np.asarray(np.broadcast_to(values, y.shape), dtype=dtype)
        if self.support is not FULL_PERIOD:
            values = np.where(self.support.mask(y), values, 0)
        return values

    evaluate = __call__

    def restricted(self, support: IntervalUnion, name: str | None = None) -> "PeriodicFilter":
        """Same formula, cut down to ``support`` (given inside one period)."""
        return PeriodicFilter(name or self.name, self.func, support,
                              self.smoothness, self.is_real, self.is_even, dict(self.meta))


def zero_filter(name: str = "0") -> "PiecewiseConstantFilter":
    return PiecewiseConstantFilter(name, [])


class PiecewiseConstantFilter(PeriodicFilter):
    """Filter equal to ``coef * unit`` on each of a list of interval unions.

    Pieces are given inside one period, already reduced to ``[-1/2, 1/2)``.
    """

    def __init__(self, name: str, pieces: Sequence[tuple[IntervalUnion, Fraction]],
                 unit: float = SQRT2, is_even: bool = False):
        pieces = [(s, as_fraction(c)) for s, c in pieces]
        support = IntervalUnion(iv for s, _ in pieces for iv in s)

        def func(y, _pieces=pieces, _unit=unit):
            out = np.zeros(np.shape(y))
            for s, c in _pieces:
                out = np.where(s.mask(y), float(c) * _unit, out)
            return out

        super().__init__(name, func, support, 0, True, is_even, {"unit": unit})
        object.__setattr__(self, "pieces", tuple(pieces))
        object.__setattr__(self, "unit", unit)

    def __call__(self, x) -> np.ndarray:
        # closedness matters at measure-zero points only; use float masks
        return np.asarray(self.func(reduce_periodic(x)), dtype=float)

    evaluate = __call__

    def coefficient(self, x: Fraction, reduced: bool = False) -> Fraction:
        """Exact value divided by ``unit`` at a rational point.

        Pass ``reduced=True`` when x already lies in ``[-1/2, 1/2)``.
        """
        y = x if reduced else reduce_exact(x)
        for s, c in self.pieces:
            if s.contains(y):
                return c
        return Fraction(0)

    def piece_json(self) -> list[dict]:
        return [{"coef": f"{c.numerator}/{c.denominator}", "set": s.to_json_full()}
                for s, c in self.pieces]
