"""Smooth periodic QMF bump used to build the example filter bank.

The bump ``p`` is real, even, 1-periodic, satisfies
``p(x)**2 + p(x + 1/2)**2 == 2``, vanishes identically on
``[1/7, 3/14]`` and ``[3/7, 1/2]`` and is flat enough near 1/7 and 3/14 that
its derivative of order ``r + 2`` stays below 1 within 1/112 of those points.

Construction: three monotone transitions of width 1/28, each reaching 0 at
its inner end, are defined on ``[3/28, 1/4]`` and ``[11/28, 1/2]``; the
remaining part of ``[0, 1/2]`` is filled by ``sqrt(2 - p(1/2 - x)**2)``,
then the function is extended evenly and periodically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .filters import PeriodicFilter, SQRT2, reduce_periodic
from .support import IntervalUnion

__all__ = [
    "TransitionFunction",
    "ValidationReport",
    "make_smooth_step",
    "build_p",
    "validate_p",
    "BumpConstructionError",
    "BREAKPOINTS",
]

INF = math.inf

# every breakpoint of p inside [0, 1/2]
BREAKPOINTS = {
    "plateau_end": Fraction(1, 14),
    "first_unit": Fraction(3, 28),
    "zero_start": Fraction(1, 7),
    "zero_end": Fraction(3, 14),
    "second_unit": Fraction(1, 4),
    "second_plateau": Fraction(2, 7),
    "second_plateau_end": Fraction(5, 14),
    "third_unit": Fraction(11, 28),
    "last_zero": Fraction(3, 7),
    "half": Fraction(1, 2),
}
WIDTH = Fraction(1, 28)
MARGIN = Fraction(1, 112)
MARGIN_CENTERS = (Fraction(1, 7), Fraction(3, 14))
FLAT_ZONES = IntervalUnion.closed(Fraction(1, 7), Fraction(3, 14)).union(
    IntervalUnion.closed(Fraction(3, 7), Fraction(1, 2))).symmetrize()

MAX_POWER = 12


class BumpConstructionError(RuntimeError):
    """Raised when no flattening power satisfies the derivative margin bound."""


def _exp_flat(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def _poly_step_coeffs(r: int) -> list[int]:
    # S(x) = x^(r+1) * sum_k C(r+k, k) (1-x)^k
    return [math.comb(r + k, k) for k in range(r + 1)]


@dataclass(frozen=True)
class TransitionFunction:
    """Monotone step from 0 at x=0 to 1 at x=1, flat to ``order`` at both ends.

    ``power`` reparameterizes the step as ``s(x**power)``, which pushes
    the steep part toward x = 1 and makes the step flatter near 0.
    """

    order: float
    power: int = 1

    def base(self, t) -> np.ndarray:
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        if self.order == INF:
            a, b = _exp_flat(t), _exp_flat(1.0 - t)
            return a / (a + b)
        r = int(self.order)
        acc = np.zeros_like(t)
        for k, c in enumerate(_poly_step_coeffs(r)):
            acc = acc + c * (1.0 - t) ** k
        return t ** (r + 1) * acc

    def evaluate(self, x) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return self.base(x ** self.power)

    __call__ = evaluate

    def derivative(self, k: int, x, h: float = 1e-3) -> np.ndarray:
        """Central finite-difference estimate of the k-th derivative."""
        return central_derivative(self.evaluate, k, x, h)

    def with_power(self, power: int) -> "TransitionFunction":
        return TransitionFunction(self.order, power)


def make_smooth_step(grade: float | int = INF, power: int = 1) -> TransitionFunction:
    """Transition of the requested smoothness grade.

    Infinite grade uses ``s(x) = f(x) / (f(x) + f(1 - x))`` with
    ``f(x) = exp(-1/x)``; a finite grade r uses the degree ``2r + 1``
    polynomial with r vanishing derivatives at both ends.
    """
    if grade != INF:
        if int(grade) != grade or grade < 1:
            raise ValueError("grade must be a positive integer or infinity")
        grade = int(grade)
    if power < 1:
        raise ValueError("power must be >= 1")
    return TransitionFunction(grade, power)


def central_derivative(f, k: int, x, h: float) -> np.ndarray:
    """k-th derivative by the (k+1)-point central difference of step h."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for i in range(k + 1):
        acc = acc + (-1) ** i * math.comb(k, i) * f(x + (k / 2 - i) * h)
    return acc / h ** k


def _core(step: TransitionFunction, y: np.ndarray) -> np.ndarray:
    """p on [3/28, 1/4] and [11/28, 1/2]; y holds points of [0, 1/2]."""
    w = float(WIDTH)
    out = np.full(y.shape, np.nan)
    b = {key: float(v) for key, v in BREAKPOINTS.items()}
    seg = (y >= b["first_unit"]) & (y <= b["zero_start"])
    out[seg] = step((b["zero_start"] - y[seg]) / w)
    seg = (y > b["zero_start"]) & (y < b["zero_end"])
    out[seg] = 0.0
    seg = (y >= b["zero_end"]) & (y <= b["second_unit"])
    out[seg] = step((y[seg] - b["zero_end"]) / w)
    seg = (y >= b["third_unit"]) & (y <= b["last_zero"])
    out[seg] = step((b["last_zero"] - y[seg]) / w)
    seg = y > b["last_zero"]
    out[seg] = 0.0
    return out


def _bump_values(step: TransitionFunction, x) -> np.ndarray:
    y = np.abs(reduce_periodic(x))
    y = np.minimum(y, 0.5)
    b = {key: float(v) for key, v in BREAKPOINTS.items()}
    direct = ((y >= b["first_unit"]) & (y <= b["second_unit"])) | (y >= b["third_unit"])
    out = np.empty(y.shape)
    out[direct] = _core(step, y[direct])
    mirror = ~direct
    partner = _core(step, 0.5 - y[mirror])
    out[mirror] = np.sqrt(2.0 - partner * partner)
    return out


@dataclass
class ValidationReport:
    """Residuals of the bump conditions, each with a pass flag."""

    r: int
    power: int
    qmf_residual: float
    flat_zone_max: float
    derivative_max: dict
    derivative_reliable: bool
    evenness_residual: float
    periodicity_residual: float
    grid_points: int
    thresholds: dict = field(default_factory=lambda: {
        "qmf": 1e-10, "flat": 1e-12, "derivative": 1.0, "symmetry": 1e-12})

    @property
    def qmf_ok(self) -> bool:
        return self.qmf_residual < self.thresholds["qmf"]

    @property
    def flat_ok(self) -> bool:
        return self.flat_zone_max < self.thresholds["flat"] or self.flat_zone_max == 0.0

    @property
    def derivative_ok(self) -> bool:
        return max(self.derivative_max.values()) < self.thresholds["derivative"]

    @property
    def symmetry_ok(self) -> bool:
        tol = self.thresholds["symmetry"]
        return self.evenness_residual < tol and self.periodicity_residual < tol

    @property
    def passed(self) -> bool:
        return self.qmf_ok and self.flat_ok and self.derivative_ok and self.symmetry_ok

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "power": self.power,
            "qmf_residual": self.qmf_residual,
            "flat_zone_max": self.flat_zone_max,
            "derivative_max": {k: v for k, v in self.derivative_max.items()},
            "derivative_reliable": self.derivative_reliable,
            "evenness_residual": self.evenness_residual,
            "periodicity_residual": self.periodicity_residual,
            "grid_points": self.grid_points,
            "thresholds": dict(self.thresholds),
            "pass": self.passed,
        }


def _margin_points(center: Fraction, n: int) -> np.ndarray:
    c, m = float(center), float(MARGIN)
    # open window: stay a hair inside
    return np.linspace(c - m, c + m, n + 2)[1:-1]


def estimate_margin_derivative(p, r: int, h: float | None = None, n: int = 257):
    """Max |p^(r+2)| on both 1/112 windows, estimated at steps h and h/2.

    Returns ``(estimates, reliable)`` where ``estimates`` maps each window
    center to the Richardson-combined maximum.
    """
    k = r + 2
    if h is None:
        h = 1e-3 / k
    out = {}
    reliable = True
    for center in MARGIN_CENTERS:
        x = _margin_points(center, n)
        d1 = central_derivative(p, k, x, h)
        d2 = central_derivative(p, k, x, h / 2)
        rich = (4.0 * d2 - d1) / 3.0
        big = max(np.max(np.abs(d1)), np.max(np.abs(d2)))
        # disagreement only matters when the estimate is not negligibly small
        if big > 1e-6 and np.max(np.abs(d1 - d2)) > 0.1 * big:
            reliable = False
        out[f"{center.numerator}/{center.denominator}"] = float(
            max(np.max(np.abs(rich)), np.max(np.abs(d2))))
    return out, reliable


def validate_p(p: PeriodicFilter, r: int, n_grid: int = 4096, seed: int = 0,
               h: float | None = None) -> ValidationReport:
    """Check the QMF identity, flat zones, symmetry and derivative margins."""
    rng = np.random.default_rng(seed)
    x = (np.arange(n_grid) + 0.5) / n_grid
    qmf = float(np.max(np.abs(p(x) ** 2 + p(x + 0.5) ** 2 - 2.0)))

    # sample the flat zones (closed, both signs)
    zones = []
    for iv in FLAT_ZONES:
        zones.append(np.linspace(float(iv.lo), float(iv.hi), 257))
    flat = float(np.max(np.abs(p(np.concatenate(zones)))))

    derivs, reliable = estimate_margin_derivative(p, r, h)

    xs = rng.uniform(-3.0, 3.0, 64)
    even = float(np.max(np.abs(p(-xs) - p(xs))))
    periodic = float(np.max(np.abs(p(xs + 1.0) - p(xs))))
    power = p.meta.get("power", 1) if hasattr(p, "meta") else 1
    return ValidationReport(r, power, qmf, flat, derivs, reliable, even, periodic, n_grid)


def _make_p(step: TransitionFunction, r: int) -> PeriodicFilter:
    def func(y, _step=step):
        return _bump_values(_step, y)

    grade = step.order
    return PeriodicFilter(
        name="p",
        func=func,
        smoothness=grade,
        is_real=True,
        is_even=True,
        meta={"r": r, "grade": "inf" if grade == INF else int(grade),
              "power": step.power, "validated": False},
    )


def build_p(r: int, step: TransitionFunction | None = None,
            max_power: int = MAX_POWER) -> PeriodicFilter:
    """Build and validate the bump for smoothness target ``r``.

    The step's power is raised until the derivative bound holds on both
    margins; the returned filter carries its validation report in
    ``meta["validation"]``.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if step is None:
        step = make_smooth_step(INF)
    last = None
    for power in range(step.power, max_power + 1):
        candidate = _make_p(step.with_power(power), r)
        report = validate_p(candidate, r)
        last = report
        if report.passed and report.derivative_reliable:
            candidate.meta["validated"] = True
            candidate.meta["validation"] = report.to_dict()
            return candidate
    raise BumpConstructionError(
        f"no power <= {max_power} satisfies the margin bound for r={r}: "
        f"{last.to_dict() if last else None}")
