"""Classical one-dimensional filter machinery.

Low-pass ``h`` and high-pass ``g`` filters, the infinite-product scaling
function ``phi_hat(x) = prod_j h(x / 2**j) / sqrt(2)`` and the wavelet
``psi_hat(x) = g(x/2) phi_hat(x/2) / sqrt(2)``, plus the Haar, Shannon and
Cohen reference pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .filters import PeriodicFilter, PiecewiseConstantFilter, SQRT2
from .support import IntervalUnion

__all__ = [
    "ClassicalFilterPair",
    "CascadeConvergenceError",
    "FilterEquationError",
    "high_pass_from_low",
    "cascade_scaling",
    "wavelet_hat_classical",
    "reference_filters",
    "check_classical_eqs",
    "nonvanishing_on_quarter",
    "haar_psi_hat_closed_form",
    "cohen_phi_hat_closed_form",
]

J_MAX = 64
TAIL_TOL = 1e-14


class CascadeConvergenceError(RuntimeError):
    pass


class FilterEquationError(ValueError):
    pass


@dataclass(frozen=True)
class ClassicalFilterPair:
    """Low/high-pass pair with what the cascade needs to truncate exactly.

    ``plateau_radius``: ``h/sqrt(2) == 1`` exactly for ``|y| <= radius``.
    ``lipschitz``: bound L with ``|h(y)/sqrt(2) - 1| <= L|y|`` near 0, used
    when there is no plateau.
    """

    name: str
    h: PeriodicFilter
    g: PeriodicFilter
    plateau_radius: Fraction | None = None
    lipschitz: float | None = None


def _qmf_residual(f: PeriodicFilter, x: np.ndarray) -> float:
    return float(np.max(np.abs(np.abs(f(x)) ** 2 + np.abs(f(x + 0.5)) ** 2 - 2.0)))


def _grid(n: int, seed: int | None = None) -> np.ndarray:
    x = (np.arange(n) + 0.5) / n - 0.5
    if seed is not None:
        rng = np.random.default_rng(seed)
        x = x + rng.uniform(-0.25, 0.25, n) / n
    return x


def high_pass_from_low(h: PeriodicFilter, n_check: int = 4096) -> PeriodicFilter:
    """``g(x) = exp(2 pi i x) * conj(h(x + 1/2))``."""
    res = _qmf_residual(h, _grid(n_check, seed=7))
    if res > 1e-8:
        raise FilterEquationError(f"low-pass fails |h(x)|^2+|h(x+1/2)|^2=2 (residual {res:.3g})")

    def func(y, _h=h):
        return np.exp(2j * np.pi * y) * np.conj(_h(y + 0.5))

    support = h.support.translate(Fraction(-1, 2)).union(h.support.translate(Fraction(1, 2)))
    support = support.intersection(IntervalUnion.half_open(Fraction(-1, 2), Fraction(1, 2)))
    return PeriodicFilter(f"g[{h.name}]", func, support, h.smoothness, False, False)


def check_classical_eqs(pair: ClassicalFilterPair, n_grid: int = 4096, seed: int = 0) -> dict:
    """Max residuals of the three orthonormality-like filter conditions."""
    x = _grid(n_grid, seed)
    h, g = pair.h, pair.g
    hx, hx2, gx, gx2 = h(x), h(x + 0.5), g(x), g(x + 0.5)
    return {
        "low_pass": float(np.max(np.abs(np.abs(hx) ** 2 + np.abs(hx2) ** 2 - 2))),
        "high_pass": float(np.max(np.abs(np.abs(gx) ** 2 + np.abs(gx2) ** 2 - 2))),
        "cross": float(np.max(np.abs(hx * np.conj(gx) + hx2 * np.conj(gx2)))),
        "h0": float(abs(abs(complex(h(np.array([0.0]))[0])) - SQRT2)),
    }


def nonvanishing_on_quarter(pair: ClassicalFilterPair, n: int = 4096) -> bool:
    """Whether h has no zero on [-1/4, 1/4] (sampled)."""
    y = np.linspace(-0.25, 0.25, n)
    return bool(np.min(np.abs(pair.h(y))) > 1e-12)


def _factor_count(pair: ClassicalFilterPair, xmax: float) -> int:
    if xmax == 0:
        return 1
    if pair.plateau_radius is not None:
        return max(1, math.ceil(math.log2(xmax / float(pair.plateau_radius))))
    if pair.lipschitz is None:
        raise CascadeConvergenceError(f"{pair.name}: no plateau and no Lipschitz bound")
    # tail sum_{j>J} L|x|/2^j = L|x|/2^J
    return max(1, math.ceil(math.log2(pair.lipschitz * xmax / TAIL_TOL)))


def cascade_scaling(pair: ClassicalFilterPair, x) -> np.ndarray:
    """Infinite product ``prod_{j>=1} h(x/2^j)/sqrt(2)`` at each x.

    Exact (finite) when the pair has a plateau; otherwise truncated once
    the Lipschitz tail bound drops below 1e-14.  Raises
    :class:`CascadeConvergenceError` when that needs more than 64 factors.
    """
    x = np.asarray(x, dtype=float)
    xmax = float(np.max(np.abs(x))) if x.size else 0.0
    J = _factor_count(pair, xmax)
    if J > J_MAX:
        raise CascadeConvergenceError(
            f"{pair.name}: |x|={xmax:.3g} needs {J} factors (> {J_MAX})")
    out = np.ones(x.shape, dtype=complex)
    for j in range(1, J + 1):
        out = out * (pair.h(x / 2.0 ** j) / SQRT2)
    return out


def wavelet_hat_classical(pair: ClassicalFilterPair, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return pair.g(x / 2) * cascade_scaling(pair, x / 2) / SQRT2


# -- reference pairs ------------------------------------------------------------

def _haar() -> ClassicalFilterPair:
    h = PeriodicFilter("h[haar]", lambda y: (1 + np.exp(-2j * np.pi * y)) / SQRT2,
                       is_real=False)
    # the standard Haar choice, which reproduces chi[0,1/2) - chi[1/2,1)
    g = PeriodicFilter("g[haar]", lambda y: (1 - np.exp(-2j * np.pi * y)) / SQRT2,
                       is_real=False)
    return ClassicalFilterPair("haar", h, g, None, math.pi)


def _shannon() -> ClassicalFilterPair:
    quarter = Fraction(1, 4)
    h = PiecewiseConstantFilter("h[shannon]", [(IntervalUnion.half_open(-quarter, quarter), 1)],
                                is_even=True)
    g = PiecewiseConstantFilter(
        "g[shannon]",
        [(IntervalUnion.half_open(Fraction(-1, 2), -quarter)
          .union(IntervalUnion.half_open(quarter, Fraction(1, 2))), 1)],
        is_even=True)
    return ClassicalFilterPair("shannon", h, g, Fraction(1, 8), None)


def _cohen() -> ClassicalFilterPair:
    h = PeriodicFilter("h[cohen]", lambda y: (1 + np.exp(-6j * np.pi * y)) / SQRT2,
                       is_real=False)
    # gives psi = (chi[0,3/2) - chi[3/2,3)) / 3
    g = PeriodicFilter("g[cohen]", lambda y: (1 - np.exp(-6j * np.pi * y)) / SQRT2,
                       is_real=False)
    return ClassicalFilterPair("cohen", h, g, None, 3 * math.pi)


_REFERENCES = {"haar": _haar, "shannon": _shannon, "cohen": _cohen}


def reference_filters(name: str) -> ClassicalFilterPair:
    try:
        return _REFERENCES[name]()
    except KeyError:
        raise ValueError(f"unknown reference pair {name!r}; "
                         f"choose from {sorted(_REFERENCES)}") from None


# -- closed forms used as independent oracles -------------------------------------

def _sinc_pi(z):
    # sin(pi z) / (pi z) with the removable singularity filled in
    return np.sinc(z)


def cohen_phi_hat_closed_form(x) -> np.ndarray:
    """Transform of ``chi[0,3)/3``."""
    x = np.asarray(x, dtype=float)
    return np.exp(-3j * np.pi * x) * _sinc_pi(3 * x)


def haar_psi_hat_closed_form(x) -> np.ndarray:
    """Transform of ``chi[0,1/2) - chi[1/2,1)`` by direct integration."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    nz = x != 0
    z = x[nz]
    e1 = np.exp(-1j * np.pi * z)
    e2 = np.exp(-2j * np.pi * z)
    out[nz] = ((1 - e1) - (e1 - e2)) / (2j * np.pi * z)
    return out
