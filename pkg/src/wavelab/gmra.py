"""Generalized (2x2) filter banks and the scaling vector / wavelet they generate.

The scaling vector is the first column of the infinite product
``prod_{j>=1} H(x / 2**j) / sqrt(2)``, multiplied in order of increasing j.
Both banks shipped here have an exact plateau: ``H(y)/sqrt(2)`` equals
``[[1, 0], [0, 0]]`` for ``|y| <= 1/14``, so the product is finite at every x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .filters import (
    PeriodicFilter,
    PiecewiseConstantFilter,
    SQRT2,
    reduce_exact,
    reduce_periodic,
    zero_filter,
)
from .reports import VerificationReport, from_residuals, worst_points
from .support import IntervalUnion, as_fraction

__all__ = [
    "MultiplicityFunction",
    "GeneralizedFilterBank",
    "ScalingVector",
    "WaveletHat",
    "journe_multiplicity",
    "consistency_check",
    "journe_bank",
    "example_bank",
    "filter_matrix",
    "partial_product",
    "scaling_vector",
    "wavelet_hat",
    "check_gen_filter_eqs",
    "bank_to_json",
    "bank_from_json",
    "rational_grid",
    "lowpass_condition",
    "JOURNE_PSI_SET",
]

F = Fraction
HALF = F(1, 2)


# -- multiplicity functions --------------------------------------------------------

@dataclass(frozen=True)
class MultiplicityFunction:
    """Integer-valued step function on ``[-1/2, 1/2)`` with rational breakpoints.

    ``pieces`` are half-open ``(lo, hi, value)`` triples that tile the period.
    """

    pieces: tuple[tuple[Fraction, Fraction, int], ...]

    def __post_init__(self):
        pieces = tuple(sorted((as_fraction(a), as_fraction(b), int(v)) for a, b, v in self.pieces))
        object.__setattr__(self, "pieces", pieces)
        if pieces[0][0] != -HALF or pieces[-1][1] != HALF:
            raise ValueError("pieces must cover [-1/2, 1/2)")
        for (a0, b0, _), (a1, _, _) in zip(pieces, pieces[1:]):
            if b0 != a1:
                raise ValueError("pieces must tile [-1/2, 1/2) without gaps or overlaps")
        if any(v < 0 for _, _, v in pieces):
            raise ValueError("multiplicities are nonnegative")

    @property
    def c(self) -> int:
        return max(v for _, _, v in self.pieces)

    @property
    def breakpoints(self) -> list[Fraction]:
        return sorted({a for a, _, _ in self.pieces} | {HALF})

    def exact(self, x) -> int:
        y = reduce_exact(as_fraction(x))
        for a, b, v in self.pieces:
            if a <= y < b:
                return v
        raise AssertionError("unreachable: pieces tile the period")

    def __call__(self, x) -> np.ndarray:
        y = reduce_periodic(x)
        edges = np.array([float(a) for a, _, _ in self.pieces])
        vals = np.array([v for _, _, v in self.pieces])
        idx = np.searchsorted(edges, y, side="right") - 1
        return vals[np.clip(idx, 0, len(vals) - 1)]

    def level_set(self, j: int) -> IntervalUnion:
        """``S_j = {x : m(x) >= j}`` inside one period."""
        return IntervalUnion(iv for a, b, v in self.pieces if v >= j
                             for iv in IntervalUnion.half_open(a, b))

    def to_json(self) -> list:
        return [[f"{a.numerator}/{a.denominator}", f"{b.numerator}/{b.denominator}", v]
                for a, b, v in self.pieces]


def journe_multiplicity() -> MultiplicityFunction:
    s = F(1, 7)
    return MultiplicityFunction((
        (-HALF, -3 * s, 1),
        (-3 * s, -2 * s, 0),
        (-2 * s, -s, 1),
        (-s, s, 2),
        (s, 2 * s, 1),
        (2 * s, 3 * s, 0),
        (3 * s, HALF, 1),
    ))


def rational_grid(n: int, lo: Fraction = -HALF, hi: Fraction = HALF,
                  seed: int | None = None, denominator: int = 99991) -> list[Fraction]:
    """n rational points in ``[lo, hi)``.

    Without a seed the points are cell midpoints with denominator 2n(hi-lo);
    with a seed they are uniform draws with a large prime denominator, so
    they never land on dyadic multiples of 1/28.
    """
    lo, hi = as_fraction(lo), as_fraction(hi)
    if seed is None:
        return [lo + (hi - lo) * F(2 * i + 1, 2 * n) for i in range(n)]
    rng = np.random.default_rng(seed)
    span = (hi - lo) * denominator
    if span.denominator != 1:
        raise ValueError("window must be a whole number of 1/denominator steps")
    ticks = rng.integers(0, int(span), n)
    out = []
    for t in ticks:
        t = int(t)
        if t % denominator == 0:
            t += 1
        out.append(lo + F(t, denominator))
    return out


def consistency_check(m: MultiplicityFunction, n: int = 10_000, seed: int = 0,
                      margin: float = 1e-9) -> VerificationReport:
    """Max of ``|m(x) + 1 - m(x/2) - m((x+1)/2)|`` at rational sample points."""
    xs = rational_grid(n, seed=seed)
    bps = m.breakpoints
    # breakpoints of x, x/2 and (x+1)/2 in terms of x
    danger = sorted({float(reduce_exact(b)) for b in bps}
                    | {float(reduce_exact(2 * b)) for b in bps}
                    | {float(reduce_exact(2 * b - 1)) for b in bps})
    kept, res = [], []
    for x in xs:
        xf = float(x)
        if min(abs(xf - d) for d in danger) < margin:
            continue
        r = m.exact(x) + 1 - m.exact(x / 2) - m.exact((x + 1) / 2)
        kept.append(xf)
        res.append(abs(r))
    report = from_residuals("consistency_equation", kept, res, 0.0,
                            grid={"kind": "rational_random", "n": len(kept), "seed": seed,
                                  "margin": margin},
                            exact=True)
    return report


# -- filter banks -----------------------------------------------------------------------

@dataclass(frozen=True)
class GeneralizedFilterBank:
    """2x2 low-pass array ``h[i][j]`` and high-pass pair ``g[j]`` (0-indexed)."""

    name: str
    m: MultiplicityFunction
    h: tuple[tuple[PeriodicFilter, PeriodicFilter], tuple[PeriodicFilter, PeriodicFilter]]
    g: tuple[PeriodicFilter, PeriodicFilter]
    plateau_radius: Fraction | None = None
    exact: bool = False
    source: dict = field(default_factory=dict, compare=False)
    low_pass_index: tuple[int, int] = (1, 1)

    @property
    def all_real(self) -> bool:
        return all(f.is_real for row in self.h for f in row)

    def matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape + (2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                out[..., i, j] = self.h[i][j](x)
        return out

    def normalized_matrix(self, x) -> np.ndarray:
        # divide rather than multiply so sqrt(2)/sqrt(2) is exactly 1
        return self.matrix(x) / SQRT2

    def exact_normalized(self, x: Fraction) -> list[list[Fraction]]:
        """``H(x)/sqrt(2)`` as exact rationals (piecewise-constant banks only)."""
        if not self.exact:
            raise TypeError(f"bank {self.name!r} has no exact evaluation")
        y = reduce_exact(x)
        return [[self.h[i][j].coefficient(y, True) for j in range(2)] for i in range(2)]

    def exact_high_pass(self, x: Fraction) -> list[Fraction]:
        if not self.exact:
            raise TypeError(f"bank {self.name!r} has no exact evaluation")
        y = reduce_exact(x)
        return [self.g[j].coefficient(y, True) for j in range(2)]


def _pc(name, pieces, **kw) -> PiecewiseConstantFilter:
    return PiecewiseConstantFilter(name, pieces, **kw)


def journe_bank() -> GeneralizedFilterBank:
    """The piecewise-constant bank generating the Journé wavelet."""
    s = F(1, 7)
    q = F(1, 4)
    ho = IntervalUnion.half_open
    h11 = _pc("h11", [(ho(-2 * s, -q) | IntervalUnion.open(-s, s) | ho(q, 2 * s), 1)],
              is_even=True)
    # [-4/7,-1/2) u [1/2,4/7) reduced into one period
    h21 = _pc("h21", [(ho(3 * s, HALF) | ho(-HALF, -3 * s), 1)], is_even=True)
    g1 = _pc("g1", [(ho(-q, -s) | ho(s, q), 1)], is_even=True)
    g2 = _pc("g2", [(ho(-s, s), 1)], is_even=True)
    return GeneralizedFilterBank(
        "journe", journe_multiplicity(),
        ((h11, zero_filter("h12")), (h21, zero_filter("h22"))),
        (g1, g2), plateau_radius=F(1, 14), exact=True, source={"kind": "journe"})


def example_bank(p: PeriodicFilter) -> GeneralizedFilterBank:
    """The smooth bank built from a validated bump ``p``."""
    if not p.meta.get("validated"):
        raise ValueError("bump has not passed validation; build it with build_p")
    s = F(1, 7)
    ho = IntervalUnion.half_open

    def shifted(y, _p=p):
        return _p(y + 0.5)

    h11 = p.restricted(ho(-2 * s, 2 * s), "h11")
    h12 = PeriodicFilter("h12", shifted, ho(-s, s), p.smoothness, True, True)
    h21 = _pc("h21", [(ho(3 * s, HALF) | IntervalUnion.closed(-HALF, -3 * s), 1)], is_even=True)

    def g1f(y, _p=p):
        return np.exp(2j * np.pi * y) * _p(y + 0.5)

    def g2f(y, _p=p):
        return -np.exp(2j * np.pi * y) * _p(y)

    g1 = PeriodicFilter("g1", g1f, ho(-2 * s, 2 * s), p.smoothness, False, False)
    g2 = PeriodicFilter("g2", g2f, ho(-s, s), p.smoothness, False, False)
    source = {"kind": "example", "bump": {k: v for k, v in p.meta.items() if k != "validation"}}
    return GeneralizedFilterBank(
        "example", journe_multiplicity(),
        ((h11, h12), (h21, zero_filter("h22"))),
        (g1, g2), plateau_radius=F(1, 14), exact=False, source=source)


def filter_matrix(bank: GeneralizedFilterBank, x) -> np.ndarray:
    return bank.matrix(x)


def partial_product(bank: GeneralizedFilterBank, x, n: int) -> np.ndarray:
    """``prod_{j=1}^{3n} H(x/2^j)/sqrt(2)``, accumulated left to right."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.asarray(x, dtype=float)
    acc = np.broadcast_to(np.eye(2, dtype=complex), x.shape + (2, 2)).copy()
    for j in range(1, 3 * n + 1):
        acc = acc @ bank.normalized_matrix(x / 2.0 ** j)
    return acc


def _factor_count(xmax: float, radius: Fraction) -> int:
    if xmax <= float(radius):
        return 1
    return max(1, math.ceil(math.log2(xmax / float(radius))))


class ScalingVector:
    """Evaluator for ``(phi1_hat, phi2_hat)``, exact via plateau truncation."""

    def __init__(self, bank: GeneralizedFilterBank):
        if bank.plateau_radius is None:
            raise ValueError("bank has no plateau; exact truncation is unavailable")
        self.bank = bank
        self.plateau_radius = bank.plateau_radius

    def factors(self, x) -> int:
        x = np.asarray(x, dtype=float)
        xmax = float(np.max(np.abs(x))) if x.size else 0.0
        return _factor_count(xmax, self.plateau_radius)

    def __call__(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        J = self.factors(x)
        dtype = float if self.bank.all_real else complex
        v1 = np.ones(x.shape, dtype=dtype)
        v2 = np.zeros(x.shape, dtype=dtype)
        h = self.bank.h
        # right-to-left on the first column; factors beyond J are the plateau
        for j in range(J, 0, -1):
            y = x / 2.0 ** j
            a, b = h[0][0](y) / SQRT2, h[0][1](y) / SQRT2
            c, d = h[1][0](y) / SQRT2, h[1][1](y) / SQRT2
            v1, v2 = a * v1 + b * v2, c * v1 + d * v2
        return v1, v2

    evaluate = __call__

    def exact(self, x) -> tuple[Fraction, Fraction]:
        x = as_fraction(x)
        J = _factor_count(abs(float(x)), self.plateau_radius)
        v1, v2 = F(1), F(0)
        for j in range(J, 0, -1):
            (a, b), (c, d) = self.bank.exact_normalized(x / 2 ** j)
            v1, v2 = a * v1 + b * v2, c * v1 + d * v2
        return v1, v2


class WaveletHat:
    """``psi_hat(x) = (g1(x/2) phi1_hat(x/2) + g2(x/2) phi2_hat(x/2)) / sqrt(2)``."""

    def __init__(self, sv: ScalingVector):
        self.sv = sv
        self.bank = sv.bank

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = x / 2
        p1, p2 = self.sv(y)
        g1, g2 = self.bank.g
        return (g1(y) * p1 + g2(y) * p2) / SQRT2

    evaluate = __call__

    def exact(self, x) -> Fraction:
        """Exact value for piecewise-constant banks (values are then rational)."""
        y = as_fraction(x) / 2
        p1, p2 = self.sv.exact(y)
        c1, c2 = self.bank.exact_high_pass(y)
        return c1 * p1 + c2 * p2


def scaling_vector(bank: GeneralizedFilterBank) -> ScalingVector:
    return ScalingVector(bank)


def wavelet_hat(bank: GeneralizedFilterBank) -> WaveletHat:
    return WaveletHat(ScalingVector(bank))


# the wavelet set of the Journé wavelet
JOURNE_PSI_SET = (IntervalUnion.half_open(F(-16, 7), -2)
                  | IntervalUnion.half_open(-HALF, F(-2, 7))
                  | IntervalUnion.closed(F(2, 7), HALF)
                  | IntervalUnion.half_open(2, F(16, 7)))


# -- generalized filter equations ---------------------------------------------------

def _exact_equations(bank: GeneralizedFilterBank, x: Fraction, S: list[IntervalUnion]):
    """Residual vectors for the three equations at one rational point.

    With ``h = c * sqrt(2)`` every product of two filter values is ``2 c c'``,
    so all residuals are exact rationals.
    """
    a, b = x / 2, (x + 1) / 2
    Ha, Hb = bank.exact_normalized(a), bank.exact_normalized(b)
    Ga, Gb = bank.exact_high_pass(a), bank.exact_high_pass(b)
    xr = reduce_exact(x)
    eq10 = []
    for i in range(2):
        for k in range(2):
            lhs = 2 * sum(Ha[i][j] * Ha[k][j] + Hb[i][j] * Hb[k][j] for j in range(2))
            rhs = 2 * (i == k) * (1 if S[i].contains(xr) else 0)
            eq10.append(lhs - rhs)
    lhs11 = 2 * sum(Ga[j] ** 2 + Gb[j] ** 2 for j in range(2))
    eq11 = lhs11 - 2
    eq11_alt = lhs11 - 2 * (1 if S[0].contains(xr) else 0)
    eq12 = [2 * sum(Ha[i][j] * Ga[j] + Hb[i][j] * Gb[j] for j in range(2)) for i in range(2)]
    return eq10, eq11, eq11_alt, eq12


def check_gen_filter_eqs(bank: GeneralizedFilterBank, n_grid: int = 4096,
                         seed: int | None = None, tolerance: float = 1e-10) -> VerificationReport:
    """Residuals of the generalized orthonormality conditions.

    For exact banks the residuals are computed in rational arithmetic at
    rational points and the check demands exactly zero.  The high-pass
    energy identity is reported against both the constant 2 (used for
    pass/fail) and ``2 * chi_{S_1}``.
    """
    if bank.exact:
        xs = rational_grid(n_grid, seed=seed)
        worst10 = worst11 = worst11_alt = worst12 = F(0)
        per_point = []
        S = [bank.m.level_set(1), bank.m.level_set(2)]
        for x in xs:
            e10, e11, e11a, e12 = _exact_equations(bank, x, S)
            r10 = max(abs(v) for v in e10)
            r12 = max(abs(v) for v in e12)
            worst10 = max(worst10, r10)
            worst11 = max(worst11, abs(e11))
            worst11_alt = max(worst11_alt, abs(e11a))
            worst12 = max(worst12, r12)
            per_point.append(max(r10, abs(e11), r12))
        xf = [float(x) for x in xs]
        max_res = max(worst10, worst11, worst12)
        return VerificationReport(
            "generalized_filter_equations", 0.0, float(max_res),
            worst_points(xf, [float(v) for v in per_point]),
            grid={"kind": "rational", "n": n_grid, "seed": seed},
            details={"lowpass_orthogonality": float(worst10),
                     "highpass_energy_constant_2": float(worst11),
                     "highpass_energy_2chi_S1": float(worst11_alt),
                     "cross_orthogonality": float(worst12),
                     "arithmetic": "rational"},
            exact=True)

    x = (np.arange(n_grid) + 0.5) / n_grid - 0.5
    if seed is not None:
        rng = np.random.default_rng(seed)
        x = x + rng.uniform(-0.25, 0.25, n_grid) / n_grid
    a, b = x / 2, (x + 1) / 2
    Ha, Hb = bank.matrix(a), bank.matrix(b)
    Ga = np.stack([bank.g[0](a), bank.g[1](a)], axis=-1)
    Gb = np.stack([bank.g[0](b), bank.g[1](b)], axis=-1)
    S = [bank.m.level_set(1).mask(x), bank.m.level_set(2).mask(x)]
    r10 = np.zeros(x.shape)
    for i in range(2):
        for k in range(2):
            lhs = np.sum(Ha[:, i, :] * np.conj(Ha[:, k, :]) + Hb[:, i, :] * np.conj(Hb[:, k, :]),
                         axis=-1)
            rhs = 2.0 * (i == k) * S[i]
            r10 = np.maximum(r10, np.abs(lhs - rhs))
    e11 = np.sum(np.abs(Ga) ** 2 + np.abs(Gb) ** 2, axis=-1)
    r11 = np.abs(e11 - 2.0)
    r11_alt = np.abs(e11 - 2.0 * S[0])
    r12 = np.zeros(x.shape)
    for i in range(2):
        v = np.sum(Ha[:, i, :] * np.conj(Ga) + Hb[:, i, :] * np.conj(Gb), axis=-1)
        r12 = np.maximum(r12, np.abs(v))
    total = np.maximum(np.maximum(r10, r11), r12)
    report = from_residuals(
        "generalized_filter_equations", x, total, tolerance,
        grid={"kind": "uniform_jittered" if seed is not None else "uniform", "n": n_grid,
              "seed": seed},
        details={"lowpass_orthogonality": float(r10.max()),
                 "highpass_energy_constant_2": float(r11.max()),
                 "highpass_energy_2chi_S1": float(r11_alt.max()),
                 "cross_orthogonality": float(r12.max()),
                 "arithmetic": "float64"})
    return report


def lowpass_condition(bank: GeneralizedFilterBank) -> float:
    """Max deviation of ``|h_ij(0)|`` from ``sqrt(2) * [i=j=low-pass slot]``."""
    H = bank.matrix(np.array([0.0]))[0]
    target = np.array([[SQRT2, 0.0], [0.0, 0.0]])
    return float(np.max(np.abs(np.abs(H) - target)))


# -- serialization -----------------------------------------------------------------

def _filter_json(f: PeriodicFilter, formula: str | None) -> dict:
    out = {"name": f.name, "support": f.support.to_json_full(), "real": f.is_real}
    if isinstance(f, PiecewiseConstantFilter):
        out["pieces"] = f.piece_json()
        out["unit"] = "sqrt(2)"
    if formula is not None:
        out["formula"] = formula
    return out


_EXAMPLE_FORMULAS = {
    "h11": "p(x)", "h12": "p(x + 1/2)", "h21": "sqrt(2)", "h22": "0",
    "g1": "exp(2 pi i x) * conj(p(x + 1/2))", "g2": "-exp(2 pi i x) * conj(p(x))",
}


def bank_to_json(bank: GeneralizedFilterBank) -> dict:
    formulas = _EXAMPLE_FORMULAS if bank.source.get("kind") == "example" else {}
    filters = {}
    for i in range(2):
        for j in range(2):
            key = f"h{i + 1}{j + 1}"
            filters[key] = _filter_json(bank.h[i][j], formulas.get(key))
    for j in range(2):
        key = f"g{j + 1}"
        filters[key] = _filter_json(bank.g[j], formulas.get(key))
    payload = {
        "name": bank.name,
        "source": bank.source,
        "multiplicity": bank.m.to_json(),
        "plateau_radius": None if bank.plateau_radius is None else
        f"{bank.plateau_radius.numerator}/{bank.plateau_radius.denominator}",
        "low_pass_index": list(bank.low_pass_index),
        "filters": filters,
    }
    if bank.source.get("kind") == "example":
        payload["bump"] = {"name": "p", **bank.source.get("bump", {})}
    return payload


def bank_from_json(payload: dict) -> GeneralizedFilterBank:
    """Rebuild a bank from :func:`bank_to_json` output."""
    kind = payload.get("source", {}).get("kind")
    if kind == "journe":
        return journe_bank()
    if kind == "example":
        from .bump import build_p, make_smooth_step

        bump = payload["bump"]
        grade = math.inf if bump.get("grade", "inf") == "inf" else int(bump["grade"])
        p = build_p(int(bump["r"]), make_smooth_step(grade, int(bump.get("power", 1))))
        return example_bank(p)
    raise ValueError(f"unknown bank kind {kind!r}")
