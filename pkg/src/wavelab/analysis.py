"""Numerical verification functionals for the wavelets built in this package.

Every truncated sum here comes with a tail bound.  For the smooth bank the
bound is the generation-wise estimate

    |phi_i(x)| < 3**(n+1) / (2**(1.5 n) * 8**(n (r+2)))   for 8**n/2 < |x| < 8**(n+1),

and ``|psi_hat(x)| <= max_i |phi_i(x/2)|``.  The wavelet-set examples are
compactly supported in frequency, so their sums are finite; Haar and Cohen
use their closed-form ``1/|x|`` envelopes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .classical import ClassicalFilterPair, cascade_scaling, wavelet_hat_classical
from .filters import SQRT2, reduce_periodic
from .gmra import (
    JOURNE_PSI_SET,
    GeneralizedFilterBank,
    ScalingVector,
    WaveletHat,
    partial_product,
    rational_grid,
)
from .reports import SampledFunction, VerificationReport, from_residuals, worst_points
from .support import (
    IntervalUnion,
    limit_support,
    set_A,
    set_B,
    set_C,
    support_a,
    support_c,
    support_d,
)

__all__ = [
    "WaveletModel",
    "CutoffError",
    "decay_bound",
    "weighted_decay_bound",
    "per_phi_upper_bound",
    "jittered_grid",
    "avoid_breakpoints",
    "model_for_bank",
    "model_for_classical",
    "dimension_function",
    "periodization",
    "calderon_sum",
    "shift_sum",
    "decay_profile",
    "time_domain_samples",
    "check_intertwining",
    "check_SG_base",
    "calderon_report",
    "shift_report",
    "dimension_report",
    "decay_report",
    "per_upper_report",
    "per_lower_witness_report",
    "per_support_report",
    "per_psi_remark_report",
    "lemma_cross_check",
    "recursion_report",
    "hermitian_report",
    "disjointness_report",
    "wavelet_set_report",
]

INF = math.inf
TAIL_TARGET = 1e-16
BREAKPOINT_MARGIN = 1e-9


class CutoffError(ValueError):
    """Raised when a frequency cutoff leaves too much tail energy."""

    def __init__(self, cutoff: float, tail: float, required: float):
        super().__init__(f"cutoff {cutoff:g} leaves tail energy <= {tail:.3g}; "
                         f"use a cutoff of at least {required:g}")
        self.cutoff = cutoff
        self.tail = tail
        self.required = required


# -- thread pool ---------------------------------------------------------------

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("WAVELAB_THREADS", "1")))
    except ValueError:
        return 1


def _chunked(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
             chunk: int = 1 << 16) -> np.ndarray:
    """Apply a vectorized ``func`` chunk by chunk, optionally on threads."""
    x = np.asarray(x)
    if x.size <= chunk:
        return func(x)
    pieces = [x[i:i + chunk] for i in range(0, x.size, chunk)]
    n = _threads()
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            results = list(pool.map(func, pieces))
    else:
        results = [func(p) for p in pieces]
    return np.concatenate(results)


# -- bounds ----------------------------------------------------------------------

def decay_bound(n: int, r: int) -> float:
    """Bound on ``|phi_i|`` over generation n of the smooth bank."""
    return 3.0 ** (n + 1) / (2.0 ** (1.5 * n) * 8.0 ** (n * (r + 2)))


def weighted_decay_bound(n: int, r: int) -> float:
    """Bound on ``|x|**(r+1) |phi_i(x)|`` over generation n."""
    return 3.0 ** (n + 1) * 8.0 ** (r + 1) / 8.0 ** (1.5 * n)


def per_phi_upper_bound(r: int) -> float:
    """``sum_n 2**n 8**(-(n-1) r)``; diverges for r = 0."""
    if r <= 0:
        return INF
    return 8.0 ** r / (1.0 - 2.0 / 8.0 ** r)


def _first_generation(y: float) -> int:
    """Smallest n >= 0 with ``8**(n+1) > y``, i.e. the first generation reaching past y."""
    n = 0
    while 8.0 ** (n + 1) <= y:
        n += 1
    return n


def _gen_sum(start: int, term: Callable[[int], float], stop: float = 1e-60) -> float:
    total, n = 0.0, start
    while n < start + 200:
        t = term(n)
        total += t
        if t < stop:
            break
        n += 1
    return total


@dataclass(frozen=True)
class WaveletModel:
    """A wavelet evaluator together with the bounds its truncations need.

    Attributes
    ----------
    envelope : R -> bound on ``|psi_hat(x)|`` for ``|x| >= R``.
    inner : R -> bound on ``|psi_hat(x)|`` for ``|x| <= R``.
    lattice_tail : R -> bound on ``sum |psi_hat(2^j (x+k))|^2`` over all
        ``j >= 1, k`` with ``|2^j (x+k)| > R``.
    per_tail : R -> bound on ``sum_l |psi_hat(x+l)|^2`` over ``|x+l| > R``.
    energy_tail : R -> bound on the integral of ``|psi_hat|^2`` over ``|x| > R``.
    components : R -> IntervalUnion containing the support inside ``[-R, R]``,
        or None if the support is not known in closed form.
    """

    name: str
    psi_hat: Callable
    envelope: Callable[[float], float]
    inner: Callable[[float], float]
    lattice_tail: Callable[[float], float]
    per_tail: Callable[[float], float]
    energy_tail: Callable[[float], float]
    max_radius: float = INF
    inner_radius: float = 0.0
    support_radius: float = INF
    components: Callable[[float], IntervalUnion] | None = None
    phi_hat: Callable | None = None
    phi_per_tail: Callable[[float], float] | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, x):
        return _chunked(self.psi_hat, np.asarray(x, dtype=float))

    def required_cutoff(self, energy_tol: float) -> float:
        R = 1.0
        while self.energy_tail(R) >= energy_tol:
            R *= 2.0
            if R > 1e12:
                return INF
        return R


def _step(R: float, radius: float) -> float:
    return 0.0 if R >= radius else INF


def model_for_bank(bank: GeneralizedFilterBank) -> WaveletModel:
    sv = ScalingVector(bank)
    w = WaveletHat(sv)
    kind = bank.source.get("kind")
    if kind == "journe":
        hi = float(JOURNE_PSI_SET.bounds[1])

        def comps(R):
            return JOURNE_PSI_SET & IntervalUnion.closed(-Fraction(R), Fraction(R))

        return WaveletModel(
            "journe", w,
            envelope=lambda R: 0.0 if R >= hi else 1.0,
            inner=lambda R: 0.0 if R <= 2 / 7 else 1.0,
            lattice_tail=lambda R: _step(R, hi),
            per_tail=lambda R: _step(R, hi),
            energy_tail=lambda R: _step(R, hi),
            inner_radius=2 / 7, support_radius=hi, components=comps,
            phi_hat=sv, phi_per_tail=lambda R: _step(R, 8 / 7),
            meta={"kind": "journe", "bound": "compact frequency support |x| <= 16/7"})
    if kind != "example":
        raise ValueError(f"no truncation model for bank {bank.name!r}")
    r = int(bank.source["bump"]["r"])

    def envelope(R):
        return decay_bound(_first_generation(R / 2), r)

    def lattice_tail(R):
        # each k meets a generation-n range for at most 5 values of j
        return _gen_sum(_first_generation(R / 2),
                        lambda n: 5 * (2 * 8.0 ** (n + 1) + 1) * decay_bound(n, r) ** 2)

    def per_tail(R):
        return _gen_sum(_first_generation(R / 2),
                        lambda n: (4 * 8.0 ** (n + 1) + 1) * decay_bound(n, r) ** 2)

    def phi_per_tail(R):
        return _gen_sum(_first_generation(R),
                        lambda n: (2 * 8.0 ** (n + 1) + 1) * decay_bound(n, r) ** 2)

    def energy_tail(R):
        # |A_n u B_n u C_n| <= 3 * 2**(n+2) / 7, doubled by the dilation
        return _gen_sum(_first_generation(R / 2),
                        lambda n: 2 * 3 * 2.0 ** (n + 2) / 7 * decay_bound(n, r) ** 2)

    def comps(R):
        half = Fraction(R) / 2
        base = limit_support("phi1", half) | limit_support("phi2", half)
        return base.scale(2) & IntervalUnion.closed(-Fraction(R), Fraction(R))

    return WaveletModel(
        "example", w, envelope,
        inner=lambda R: 0.0 if R <= 1 / 7 else 1.0,
        lattice_tail=lattice_tail, per_tail=per_tail, energy_tail=energy_tail,
        inner_radius=1 / 7, components=comps, phi_hat=sv, phi_per_tail=phi_per_tail,
        meta={"kind": "example", "r": r,
              "bound": "3^(n+1) / (2^(1.5n) 8^(n(r+2))) on generation n"})


def model_for_classical(pair: ClassicalFilterPair) -> WaveletModel:
    def psi(x, _pair=pair):
        return wavelet_hat_classical(_pair, x)

    if pair.name == "shannon":
        return WaveletModel(
            "shannon", psi,
            envelope=lambda R: 0.0 if R >= 1 else 1.0,
            inner=lambda R: 0.0 if R <= 0.5 else 1.0,
            lattice_tail=lambda R: _step(R, 1.0), per_tail=lambda R: _step(R, 1.0),
            energy_tail=lambda R: _step(R, 1.0), inner_radius=0.5, support_radius=1.0,
            components=lambda R: IntervalUnion.symmetric(Fraction(1, 2), 1),
            meta={"kind": "shannon", "bound": "compact frequency support 1/2 <= |x| <= 1"})
    if pair.name in ("haar", "cohen"):
        a = 1.0 if pair.name == "haar" else 3.0
        # |psi_hat(x)| = (2/a) sin^2(a pi x / 2) / (pi |x|)
        max_radius = 2.0 ** 15 if pair.name == "haar" else 2.0 ** 14
        return WaveletModel(
            pair.name, psi,
            envelope=lambda R: 2.0 / (a * math.pi * R),
            inner=lambda R: a * math.pi * R / 2.0,
            lattice_tail=lambda R: INF, per_tail=lambda R: INF,
            energy_tail=lambda R: 8.0 / (a * a * math.pi ** 2 * R),
            max_radius=max_radius,
            meta={"kind": pair.name, "bound": f"|psi_hat(x)| <= min({a:g} pi |x| / 2, "
                                               f"2 / ({a:g} pi |x|))"})
    raise ValueError(f"no truncation model for {pair.name!r}")


# -- grids -----------------------------------------------------------------------------

def avoid_breakpoints(x, denominator: int = 28 * 2 ** 12,
                      margin: float = BREAKPOINT_MARGIN) -> np.ndarray:
    """Nudge points lying within ``margin`` of a multiple of ``1/denominator``.

    The default grid contains every breakpoint ``k / (28 * 2**s)`` with
    ``s <= 12``, which covers all filter breakpoints seen by the checks.
    """
    x = np.array(x, dtype=float)
    y = x * denominator
    d = (y - np.round(y)) / denominator
    close = np.abs(d) < margin
    x[close] = np.round(y[close]) / denominator + np.where(d[close] >= 0, 1, -1) * 2 * margin
    return x


def jittered_grid(lo: float, hi: float, n: int, seed: int, exclude: float = 0.0,
                  denominator: int = 28 * 2 ** 12) -> np.ndarray:
    """Stratified uniform points in ``[lo, hi)``, away from breakpoints.

    Points with ``|x| < exclude`` are reflected outward.
    """
    rng = np.random.default_rng(seed)
    cells = lo + (hi - lo) * (np.arange(n) + rng.uniform(0.0, 1.0, n)) / n
    if exclude > 0:
        small = np.abs(cells) < exclude
        cells[small] = np.sign(cells[small] + 1e-300) * (exclude + np.abs(cells[small]))
    return avoid_breakpoints(cells, denominator)


# -- periodization and dimension function ---------------------------------------

def _lattice_points(x: float, R: float, j_max: int, k_max: int | None):
    """All ``2^j (x+k)`` with ``1 <= j <= j_max``, ``|2^j(x+k)| <= R`` and ``|k| <= k_max``."""
    pts = []
    for j in range(1, j_max + 1):
        s = 2.0 ** j
        half = R / s
        k_lo, k_hi = math.ceil(-x - half), math.floor(-x + half)
        if k_max is not None:
            k_lo, k_hi = max(k_lo, -k_max), min(k_hi, k_max)
        if k_hi < k_lo:
            continue
        k = np.arange(k_lo, k_hi + 1, dtype=float)
        pts.append(s * (x + k))
    return np.concatenate(pts) if pts else np.zeros(0)


def dimension_function(model: WaveletModel, x, j_max: int | None = None,
                       k_max: int | None = None, tail_tol: float = 1e-10):
    """``D(x) = sum_k sum_{j>=1} |psi_hat(2^j (x+k))|^2``, truncated.

    With ``j_max``/``k_max`` omitted the sum runs over every lattice point
    with ``|2^j (x+k)| <= R``, R the smallest radius whose tail bound is
    below ``tail_tol``.  Returns ``(values, truncation)``.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if j_max is not None and j_max < 1 or k_max is not None and k_max < 1:
        raise ValueError("j_max and k_max must be >= 1")
    R = 1.0
    while model.lattice_tail(R) >= tail_tol:
        R *= 2.0
        if R > model.max_radius or R > 1e9:
            raise CutoffError(R, model.lattice_tail(R), INF)
    R = min(R, model.support_radius) if model.support_radius < INF else R
    dist = np.min(np.abs(xs - np.round(xs)))
    auto_j = max(1, math.ceil(math.log2(R / max(dist, 1e-300))) + 1)
    jm = auto_j if j_max is None else j_max
    tails = []
    values = np.empty(xs.shape)
    pts_all, owners = [], []
    for i, xv in enumerate(xs):
        pts = _lattice_points(float(xv), R, jm, k_max)
        pts_all.append(pts)
        owners.append(np.full(pts.size, i))
        # excluded points lie beyond R, beyond 2^(j_max+1) dist(x,Z), or beyond 2(k_max - 1/2)
        r_eff = R
        d = abs(xv - round(xv))
        if jm < auto_j:
            r_eff = min(r_eff, 2.0 ** (jm + 1) * d)
        if k_max is not None:
            r_eff = min(r_eff, 2.0 * (k_max - 0.5))
        tails.append(model.lattice_tail(r_eff) if r_eff < R else model.lattice_tail(R))
    pts = np.concatenate(pts_all)
    own = np.concatenate(owners)
    vals = np.abs(model(pts)) ** 2
    values = np.bincount(own, weights=vals, minlength=xs.size)
    truncation = {"radius": R, "j_range": [1, jm], "k_max": k_max,
                  "tail_bound": float(max(tails)), "bound": model.meta.get("bound")}
    return values, truncation


def periodization(f_hat: Callable, x, k_max: int, tail: Callable[[float], float] | None = None):
    """``sum_{|l| <= k_max} |f_hat(x + l)|^2``; returns ``(values, truncation)``."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    l = np.arange(-k_max, k_max + 1, dtype=float)
    pts = (xs[:, None] + l[None, :]).ravel()
    vals = np.abs(np.asarray(_chunked(f_hat, pts))) ** 2
    values = vals.reshape(xs.size, l.size).sum(axis=1)
    r_eff = k_max + 1 - float(np.max(np.abs(xs))) if xs.size else k_max
    truncation = {"k_max": k_max, "radius": r_eff,
                  "tail_bound": None if tail is None else float(tail(r_eff))}
    return values, truncation


def _phi_component(model: WaveletModel, i: int) -> Callable:
    sv = model.phi_hat

    def f(x, _sv=sv, _i=i):
        return _sv(x)[_i]

    return f


def _per_kmax(tail: Callable[[float], float], tol: float) -> int:
    k = 8
    while tail(k - 0.5) >= tol:
        k *= 2
        if k > 1 << 20:
            raise CutoffError(k, tail(k), INF)
    return k


# -- frame conditions -------------------------------------------------------------

def _tail_sum(bound: Callable[[float], float], start: float, step: float = 2.0) -> float:
    total, y = 0.0, start
    for _ in range(400):
        b = bound(y)
        if b == INF:
            return INF
        t = b * b
        total += t
        # terms shrink geometrically; 1e-60 is far below any target
        if t < 1e-60:
            break
        y *= step
    return total


def _calderon_range(model: WaveletModel, xi: float, target: float = TAIL_TARGET):
    a = abs(xi)
    # low end: psi_hat vanishes or is bounded near 0
    if model.inner_radius > 0:
        j_lo = math.floor(math.log2(model.inner_radius / a))
        lo_tail = 0.0
    else:
        j_lo = math.floor(math.log2(1.0 / a))
        while _tail_sum(model.inner, 2.0 ** (j_lo - 1) * a, 0.5) >= target:
            j_lo -= 1
        lo_tail = _tail_sum(model.inner, 2.0 ** (j_lo - 1) * a, 0.5)
    if model.support_radius < INF:
        j_hi = math.ceil(math.log2(model.support_radius / a))
        hi_tail = 0.0
    else:
        j_hi = j_lo
        while _tail_sum(model.envelope, 2.0 ** (j_hi + 1) * a) >= target:
            if 2.0 ** (j_hi + 1) * a > model.max_radius:
                break
            j_hi += 1
        hi_tail = _tail_sum(model.envelope, 2.0 ** (j_hi + 1) * a)
    return j_lo, j_hi, lo_tail, hi_tail


def calderon_sum(model: WaveletModel, xi, j_lo: int | None = None, j_hi: int | None = None):
    """``sum_{j=j_lo}^{j_hi} |psi_hat(2^j xi)|^2`` with two-sided tail bounds.

    Returns ``(values, truncation)``; ranges default to per-point choices
    that push both tails below 1e-16 where the evaluator allows.
    """
    xis = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xis == 0):
        raise ValueError("xi must be nonzero")
    pts, owners, used = [], [], []
    lo_tails, hi_tails = [], []
    for i, x in enumerate(xis):
        a, b, lt, ht = _calderon_range(model, float(x))
        if j_lo is not None:
            a = j_lo
            lt = _tail_sum(model.inner, 2.0 ** (a - 1) * abs(x), 0.5)
        if j_hi is not None:
            b = j_hi
            ht = _tail_sum(model.envelope, 2.0 ** (b + 1) * abs(x))
        js = np.arange(a, b + 1)
        pts.append(2.0 ** js * x)
        owners.append(np.full(js.size, i))
        used.append((a, b))
        lo_tails.append(lt)
        hi_tails.append(ht)
    vals = np.abs(model(np.concatenate(pts))) ** 2
    values = np.bincount(np.concatenate(owners), weights=vals, minlength=xis.size)
    truncation = {"j_range": [int(min(u[0] for u in used)), int(max(u[1] for u in used))],
                  "low_tail_bound": float(max(lo_tails)),
                  "high_tail_bound": float(max(hi_tails)),
                  "bound": model.meta.get("bound")}
    return values, truncation


def shift_sum(model: WaveletModel, xi, q: int, j_hi: int | None = None,
              target: float = TAIL_TARGET):
    """``t_q(xi) = sum_{j>=0} psi_hat(2^j xi) conj(psi_hat(2^j (xi+q)))`` for odd q.

    The tail past ``j_hi`` is bounded by Cauchy-Schwarz from the two
    Calderón tails.  Returns ``(values, truncation)``.
    """
    if int(q) != q or q % 2 == 0:
        raise ValueError(f"q must be an odd integer, got {q}")
    xis = np.atleast_1d(np.asarray(xi, dtype=float))
    pa, pb, owners, tails, his = [], [], [], [], []
    for i, x in enumerate(xis):
        a, b = abs(x), abs(x + q)
        lo = max(a, b)
        if j_hi is None:
            if model.support_radius < INF:
                # past this j the larger argument has left the support
                jh = max(0, math.ceil(math.log2(model.support_radius / lo)))
            else:
                jh = 0
                while True:
                    t = math.sqrt(_tail_sum(model.envelope, 2.0 ** (jh + 1) * a)
                                  * _tail_sum(model.envelope, 2.0 ** (jh + 1) * b))
                    if t < target or 2.0 ** (jh + 1) * lo > model.max_radius:
                        break
                    jh += 1
        else:
            jh = j_hi
        tail = math.sqrt(_tail_sum(model.envelope, 2.0 ** (jh + 1) * a)
                         * _tail_sum(model.envelope, 2.0 ** (jh + 1) * b))
        js = 2.0 ** np.arange(0, jh + 1)
        pa.append(js * x)
        pb.append(js * (x + q))
        owners.append(np.full(js.size, i))
        tails.append(tail)
        his.append(jh)
    va = model(np.concatenate(pa))
    vb = model(np.concatenate(pb))
    prod = va * np.conj(vb)
    own = np.concatenate(owners)
    values = (np.bincount(own, weights=prod.real, minlength=xis.size)
              + 1j * np.bincount(own, weights=np.imag(prod), minlength=xis.size))
    truncation = {"j_range": [0, int(max(his))], "tail_bound": float(max(tails)),
                  "bound": model.meta.get("bound")}
    return values, truncation


# -- decay -----------------------------------------------------------------------------

def _component_samples(S: IntervalUnion, per_component: int) -> np.ndarray:
    # interior points only: component endpoints are breakpoints
    return np.concatenate([np.linspace(float(iv.lo), float(iv.hi), per_component + 2)[1:-1]
                           for iv in S])


def decay_profile(sv: ScalingVector, i: int, r: int, n: int,
                  samples_per_component: int = 64) -> float:
    """Max of ``|x|^(r+1) |phi_i(x)|`` over samples of ``A_n u B_n u C_n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    S = set_A(n) | set_B(n) | set_C(n)
    x = _component_samples(S, samples_per_component)
    vals = _chunked(lambda z: sv(z)[i], x)
    return float(np.max(np.abs(x) ** (r + 1) * np.abs(vals)))


# -- time domain -----------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _panels(components: IntervalUnion, cutoff: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = [], []
    for iv in components:
        lo, hi = max(float(iv.lo), -cutoff), min(float(iv.hi), cutoff)
        if hi <= lo:
            continue
        m = max(1, math.ceil((hi - lo) / width))
        edges = np.linspace(lo, hi, m + 1)
        mid = (edges[1:] + edges[:-1]) / 2
        half = (edges[1:] - edges[:-1]) / 2
        nodes.append((mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel())
        weights.append((half[:, None] * _GL_WEIGHTS[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def frequency_quadrature(model: WaveletModel, cutoff: float, width: float = 1 / 56):
    """Gauss-Legendre nodes/weights covering the support of psi_hat within the cutoff."""
    if model.components is not None:
        comps = model.components(cutoff)
    else:
        comps = IntervalUnion.closed(-Fraction(cutoff), Fraction(cutoff))
    # split at 0 so panels never straddle the origin
    comps = (comps & IntervalUnion.closed(-Fraction(cutoff), 0)) | (
        comps & IntervalUnion.closed(0, Fraction(cutoff)))
    return _panels(comps, cutoff, width)


def time_domain_samples(model: WaveletModel, t_grid, cutoff: float | None = None,
                        energy_tol: float = 1e-8, panel_width: float = 1 / 56,
                        chunk: int = 64) -> SampledFunction:
    """``psi(t) = int_{|x|<=cutoff} psi_hat(x) exp(2 pi i x t) dx`` on ``t_grid``."""
    required = model.required_cutoff(energy_tol)
    if cutoff is None:
        cutoff = required
    tail = model.energy_tail(cutoff)
    if tail >= energy_tol:
        raise CutoffError(cutoff, tail, required)
    if cutoff > model.max_radius:
        raise CutoffError(cutoff, tail, model.max_radius)
    x, w = frequency_quadrature(model, cutoff, panel_width)
    fx = model(x) * w
    t = np.asarray(t_grid, dtype=float)
    out = np.empty(t.shape, dtype=complex)
    for i in range(0, t.size, chunk):
        tt = t[i:i + chunk]
        out[i:i + chunk] = np.exp(2j * np.pi * np.outer(tt, x)) @ fx
    energy = float(np.sum(w * np.abs(model(x)) ** 2))
    meta = {"functional": "psi_time", "wavelet": model.name, "cutoff": cutoff,
            "energy_tail_bound": tail, "panel_width": panel_width, "gauss_legendre": 32,
            "nodes": int(x.size), "max_abs_imag": float(np.max(np.abs(out.imag))),
            "frequency_energy": energy}
    return SampledFunction(t, out, meta)


# -- proof identities -------------------------------------------------------------------

def _trig(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    deg = (len(coeffs) - 1) // 2
    k = np.arange(-deg, deg + 1)
    return np.exp(2j * np.pi * np.outer(x, k)) @ coeffs


def check_intertwining(bank: GeneralizedFilterBank, f1, f2, x_grid,
                       tolerance: float = 1e-10) -> VerificationReport:
    """Residual of ``T(S_H(f1, f2))(x) = sqrt(2) (f1(2x) phi_1(2x) + f2(2x) phi_2(2x))``.

    ``f1``/``f2`` are coefficient vectors of trig polynomials, applied as
    multipliers on the periodized level sets ``S_1``/``S_2``.
    """
    x = np.asarray(x_grid, dtype=float)
    sv = ScalingVector(bank)
    S1, S2 = bank.m.level_set(1), bank.m.level_set(2)

    def F1(y):
        return _trig(np.asarray(f1, dtype=complex), y) * S1.mask(reduce_periodic(y))

    def F2(y):
        return _trig(np.asarray(f2, dtype=complex), y) * S2.mask(reduce_periodic(y))

    (h11, h12), (h21, _) = bank.h
    a, b = F1(2 * x), F2(2 * x)
    p1, p2 = sv(x)
    lhs = (h11(x) * a + h21(x) * b) * p1 + h12(x) * a * p2
    q1, q2 = sv(2 * x)
    rhs = SQRT2 * (a * q1 + b * q2)
    return from_residuals("intertwining", x, lhs - rhs, tolerance,
                          grid={"kind": "given", "n": int(x.size)},
                          details={"max_abs_rhs": float(np.max(np.abs(rhs)))})


def check_SG_base(bank: GeneralizedFilterBank, k: int, x_grid,
                  tolerance: float = 1e-12) -> VerificationReport:
    """``g_1(x) e^{4 pi i k x} phi_1(x) + g_2(x) e^{4 pi i k x} phi_2(x) = psi_{-1,k}``.

    With ``delta^{-1} F(x) = sqrt(2) F(2x)`` the right side is
    ``sqrt(2) e^{4 pi i k x} psi_hat(2x)``; the residual against the form
    without the factor sqrt(2) is recorded in ``details``.
    """
    x = np.asarray(x_grid, dtype=float)
    sv = ScalingVector(bank)
    w = WaveletHat(sv)
    e = np.exp(4j * np.pi * k * x)
    p1, p2 = sv(x)
    lhs = bank.g[0](x) * e * p1 + bank.g[1](x) * e * p2
    target = e * w(2 * x)
    res = lhs - SQRT2 * target
    return from_residuals(f"SG_base[k={k}]", x, res, tolerance,
                          grid={"kind": "given", "n": int(x.size)},
                          details={"residual_without_sqrt2": float(np.max(np.abs(lhs - target)))})


# -- report builders used by the CLI and tests ----------------------------------------

def calderon_report(model: WaveletModel, n: int = 256, seed: int = 0,
                    tolerance: float = 1e-6) -> VerificationReport:
    xi = jittered_grid(-4.0, 4.0, n, seed, exclude=1e-3)
    vals, trunc = calderon_sum(model, xi)
    trunc["tail_bound"] = trunc["low_tail_bound"] + trunc["high_tail_bound"]
    rep = from_residuals(f"calderon[{model.name}]", xi, vals - 1.0, tolerance, truncation=trunc,
                         grid={"kind": "jittered", "window": [-4, 4], "n": n, "seed": seed})
    _explain(rep)
    return rep


def shift_report(model: WaveletModel, n: int = 128, seed: int = 0,
                 qs=(-5, -3, -1, 1, 3, 5), tolerance: float = 1e-6) -> VerificationReport:
    xi = jittered_grid(-4.0, 4.0, n, seed, exclude=1e-3)
    worst = np.zeros(n)
    tails, jr = [], 0
    per_q = {}
    for q in qs:
        vals, trunc = shift_sum(model, xi, q)
        worst = np.maximum(worst, np.abs(vals))
        per_q[str(q)] = float(np.max(np.abs(vals)))
        tails.append(trunc["tail_bound"])
        jr = max(jr, trunc["j_range"][1])
    rep = from_residuals(f"shift[{model.name}]", xi, worst, tolerance,
                         truncation={"j_range": [0, jr], "tail_bound": float(max(tails)),
                                     "q": list(qs), "bound": model.meta.get("bound")},
                         grid={"kind": "jittered", "window": [-4, 4], "n": n, "seed": seed},
                         details={"max_abs_by_q": per_q})
    _explain(rep)
    return rep


def dimension_report(model: WaveletModel, m, n: int = 1000, seed: int = 0,
                     tolerance: float = 0.05) -> VerificationReport:
    """Pre-round distance between D(x) and m(x) at jittered x in [-1/2, 1/2)."""
    x = jittered_grid(-0.5, 0.5, n, seed)
    D, trunc = dimension_function(model, x)
    target = m(x)
    rep = from_residuals(f"dimension_function[{model.name}]", x, D - target, tolerance,
                         truncation=trunc,
                         grid={"kind": "jittered", "window": [-0.5, 0.5], "n": n, "seed": seed},
                         details={"rounded_mismatches": int(np.sum(np.round(D) != target))})
    _explain(rep)
    return rep


def decay_report(sv: ScalingVector, r: int, ns=range(1, 7),
                 samples_per_component: int = 64) -> VerificationReport:
    """Measured ``|x|^(r+1)|phi_i|`` against the generation bound, both i.

    The residual is ``max(measured / bound)`` minus 1 (so the bound holds
    iff it is negative) combined with a strict-decrease requirement for
    n >= 2, encoded as +inf on violation.
    """
    rows, ratio, decreasing = [], -INF, True
    prev = {0: None, 1: None}
    for n in ns:
        b = weighted_decay_bound(n, r)
        row = {"n": n, "bound": b}
        for i in (0, 1):
            v = decay_profile(sv, i, r, n, samples_per_component)
            row[f"phi{i + 1}"] = v
            ratio = max(ratio, v / b - 1.0)
            if n >= 2 and prev[i] is not None and not v < prev[i]:
                decreasing = False
            prev[i] = v
        rows.append(row)
    residual = ratio if decreasing else INF
    return VerificationReport(f"decay_profile[r={r}]", 0.0, float(residual),
                              [[row["n"], max(row["phi1"], row["phi2"])] for row in rows],
                              truncation={"samples_per_component": samples_per_component},
                              details={"profile": rows, "strictly_decreasing": decreasing,
                                       "kind": "upper_bound"})


def _per_values(model: WaveletModel, which: str, x, tol: float = 1e-10):
    if which == "psi":
        k = _per_kmax(model.per_tail, tol)
        return periodization(model, x, k, model.per_tail)
    i = {"phi1": 0, "phi2": 1}[which]
    k = _per_kmax(model.phi_per_tail, tol)
    return periodization(_phi_component(model, i), x, k, model.phi_per_tail)


def per_upper_report(model: WaveletModel, r: int, n: int = 1000, seed: int = 0) -> VerificationReport:
    x = jittered_grid(-0.5, 0.5, n, seed)
    bound = per_phi_upper_bound(r)
    worst, trunc, details = -INF, None, {}
    for which in ("phi1", "phi2"):
        v, trunc = _per_values(model, which, x)
        details[f"max_per_{which}"] = float(np.max(v))
        worst = max(worst, float(np.max(v)))
    return VerificationReport("per_phi_upper_bound", 0.0, worst - bound,
                              [[None, worst]], truncation=trunc,
                              grid={"kind": "jittered", "n": n, "seed": seed},
                              details={**details, "bound": bound, "kind": "upper_bound"})


def per_lower_witness_report(model: WaveletModel, m, n: int = 1000, seed: int = 0,
                             threshold: float = 1e-4) -> VerificationReport:
    """Points of ``S_i`` where ``Per phi_i`` falls below ``threshold``."""
    x = jittered_grid(-0.5, 0.5, n, seed)
    details, residual = {}, -INF
    worst = []
    for i, which in ((1, "phi1"), (2, "phi2")):
        S = m.level_set(i)
        xi = x[S.mask(x)]
        v, trunc = _per_values(model, which, xi)
        j = int(np.argmin(v))
        details[f"min_per_{which}_on_S{i}"] = float(v[j])
        details[f"witnesses_{which}"] = int(np.sum(v < threshold))
        worst.append([float(xi[j]), float(v[j])])
        residual = max(residual, float(v[j]) - threshold)
    return VerificationReport("per_phi_not_bounded_below", 0.0, residual, worst,
                              truncation=trunc, grid={"kind": "jittered", "n": n, "seed": seed},
                              details={**details, "threshold": threshold, "kind": "upper_bound"})


def per_support_report(model: WaveletModel, m, n: int = 1000, seed: int = 0,
                       margin: float = 1 / 28) -> VerificationReport:
    """``{Per phi_i > 0}`` against ``S_i`` at points at least ``margin`` from sevenths.

    The transitions of p are flat to infinite order, so within about 0.02
    of a level-set edge the values underflow double precision; the margin
    keeps the comparison inside representable range.
    """
    x = jittered_grid(-0.5, 0.5, n, seed)
    y = x * 7
    x = x[np.abs(y - np.round(y)) >= 7 * margin]
    mismatches = np.zeros(x.size)
    for i, which in ((1, "phi1"), (2, "phi2")):
        v, trunc = _per_values(model, which, x)
        inside = m.level_set(i).mask(x)
        mismatches = np.maximum(mismatches, ((v > 0) != inside).astype(float))
    return from_residuals("per_support_matches_level_sets", x, mismatches, 0.0, exact=True,
                          truncation=trunc,
                          grid={"kind": "jittered", "n": int(x.size), "seed": seed,
                                "margin_from_sevenths": margin})


def per_psi_remark_report(model: WaveletModel, n_zero: int = 200, n_pos: int = 10,
                          zero_tol: float = 1e-6, pos_threshold: float = 1e-3,
                          use_periodization: bool = True) -> VerificationReport:
    """Values on ``+-(4/7, 6/7)`` (should vanish) and inside ``+-(2/7, 4/7)``.

    With ``use_periodization`` the tested function is the 1-periodic
    ``Per psi``; otherwise ``|psi_hat|^2`` itself.  Residual is the larger
    of ``max(values on the first set) - zero_tol`` and
    ``pos_threshold - min(values on the second set)``.
    """
    half = n_zero // 2
    z = np.linspace(4 / 7 + 1e-3, 6 / 7 - 1e-3, half)
    z = np.concatenate([-z[::-1], z])
    # well inside: at least 1/28 from both ends
    pos = np.linspace(2 / 7 + 1 / 28, 4 / 7 - 1 / 28, n_pos // 2)
    pos = np.concatenate([-pos[::-1], pos])
    if use_periodization:
        vz, trunc = _per_values(model, "psi", z)
        vp, _ = _per_values(model, "psi", pos)
        label = "per_psi"
    else:
        vz, vp = np.abs(model(z)) ** 2, np.abs(model(pos)) ** 2
        trunc, label = {}, "psi_hat_squared"
    r_zero = float(np.max(vz)) - zero_tol
    r_pos = pos_threshold - float(np.min(vp))
    worst = worst_points(z, vz, 3) + [[float(pos[int(np.argmin(vp))]), float(np.min(vp))]]
    return VerificationReport(f"remark_windows[{label}]", 0.0, max(r_zero, r_pos), worst,
                              truncation=trunc,
                              grid={"zero_window": "+-(4/7+1e-3, 6/7-1e-3)", "n_zero": int(z.size),
                                    "positive_window": "+-[2/7+1/28, 4/7-1/28]",
                                    "n_positive": int(pos.size)},
                              details={"max_on_zero_window": float(np.max(vz)),
                                       "min_on_positive_window": float(np.min(vp)),
                                       "zero_tol": zero_tol, "positive_threshold": pos_threshold,
                                       "kind": "upper_bound"})


def lemma_cross_check(bank: GeneralizedFilterBank, n: int, n_points: int = 100_000,
                      seed: int = 0, tolerance: float = 1e-12) -> VerificationReport:
    """Partial products of 3n factors vanish off the predicted lattice supports.

    Entries (1,1), (2,1), (2,2) are tested against ``support_a(n)``,
    ``support_c(n)``, ``support_d(n)``; the (1,2) entry must vanish
    everywhere (below 1e-15).
    """
    period = 8.0 ** n
    x = jittered_grid(-period, period, n_points, seed)
    P = _chunked(lambda z: partial_product(bank, z, n).reshape(z.size, 4), x).reshape(-1, 2, 2)
    fams = {"a": (support_a(n), (0, 0)), "c": (support_c(n), (1, 0)), "d": (support_d(n), (1, 1))}
    residual = np.zeros(x.size)
    details = {}
    for key, (fam, (i, j)) in fams.items():
        outside = ~fam.mask(x)
        val = np.where(outside, np.abs(P[:, i, j]), 0.0)
        details[f"max_off_support_{key}"] = float(np.max(val))
        details[f"fraction_inside_{key}"] = float(np.mean(~outside))
        residual = np.maximum(residual, val)
    upper = float(np.max(np.abs(P[:, 0, 1])))
    details["max_upper_right"] = upper
    rep = from_residuals(f"lemma_supports[n={n}]", x, residual, tolerance,
                         grid={"kind": "jittered", "window": [-period, period], "n": n_points,
                               "seed": seed},
                         details=details)
    if upper >= 1e-15:
        rep.max_residual = max(rep.max_residual, INF)
    return rep


def recursion_report(bank: GeneralizedFilterBank, n: int = 1000, seed: int = 0,
                     tolerance: float = 1e-12) -> VerificationReport:
    """``phi_i(x) = sum_j h_ij(x/2) phi_j(x/2) / sqrt(2)`` at random x."""
    sv = ScalingVector(bank)
    rng = np.random.default_rng(seed)
    x = avoid_breakpoints(rng.uniform(-64, 64, n))
    p1, p2 = sv(x)
    q1, q2 = sv(x / 2)
    H = bank.normalized_matrix(x / 2)
    r1 = p1 - (H[:, 0, 0] * q1 + H[:, 0, 1] * q2)
    r2 = p2 - (H[:, 1, 0] * q1 + H[:, 1, 1] * q2)
    return from_residuals("scaling_recursion", x, np.maximum(np.abs(r1), np.abs(r2)), tolerance,
                          grid={"kind": "uniform_random", "window": [-64, 64], "n": n, "seed": seed})


def hermitian_report(model: WaveletModel, n: int = 256, seed: int = 0,
                     tolerance: float = 1e-12) -> VerificationReport:
    rng = np.random.default_rng(seed)
    x = avoid_breakpoints(rng.uniform(-16, 16, n))
    res = model(-x) - np.conj(model(x))
    at0 = float(np.abs(model(np.array([0.0])))[0])
    rep = from_residuals(f"hermitian[{model.name}]", x, np.maximum(np.abs(res), at0), tolerance,
                         grid={"kind": "uniform_random", "window": [-16, 16], "n": n, "seed": seed},
                         details={"abs_psi_hat_at_0": at0})
    return rep


def disjointness_report(bank: GeneralizedFilterBank, n: int = 10_000, seed: int = 0,
                        tolerance: float = 1e-9) -> VerificationReport:
    sv = ScalingVector(bank)
    x = jittered_grid(-64, 64, n, seed)
    p1, p2 = sv(x)
    return from_residuals("support_disjointness", x, np.minimum(np.abs(p1), np.abs(p2)),
                          tolerance, grid={"kind": "jittered", "window": [-64, 64], "n": n,
                                           "seed": seed})


def wavelet_set_report(bank: GeneralizedFilterBank, n: int = 10_000,
                       seed: int = 0) -> VerificationReport:
    """Exact psi_hat against the Journé wavelet-set indicator at rational points."""
    w = WaveletHat(ScalingVector(bank))
    xs = rational_grid(n, Fraction(-3), Fraction(3), seed=seed)
    res = [abs(w.exact(x) - (1 if JOURNE_PSI_SET.contains(x) else 0)) for x in xs]
    return from_residuals("journe_wavelet_set", [float(x) for x in xs],
                          [float(v) for v in res], 0.0, exact=True,
                          grid={"kind": "rational_random", "window": [-3, 3], "n": n,
                                "seed": seed})


def _explain(rep: VerificationReport) -> None:
    """Flag failures that no truncation could fix at the requested tolerance."""
    tail = rep.truncation.get("tail_bound")
    if not rep.passed and tail is not None and rep.tolerance <= max(tail, 1e-16):
        rep.details["explanation"] = (
            f"tolerance {rep.tolerance:.1e} is below the truncation tail bound {tail:.1e} "
            f"plus double-precision rounding; it cannot be certified")
    elif not rep.passed and rep.tolerance < 1e-15:
        rep.details["explanation"] = (
            f"tolerance {rep.tolerance:.1e} is below double-precision rounding of the sum "
            f"(tail bound {tail})")
