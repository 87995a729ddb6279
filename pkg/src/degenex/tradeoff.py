"""Rate-below-one machinery: flagged branch norms, the symmetric closed-form
trade-off r(R), fixed flag-distribution evaluation, the best exponent over R
and curve generation.

The flagged protocol keeps a fraction R of the copies on the main branch
(per-party Kraus pair A_j/||A_j|| vs sqrt(I - A_j^*A_j/||A_j||^2)) and pays
a binary-entropy rebate for the flag pattern. All rates/exponents in bits.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._search import golden_min_multistart
from .core import hermitian_sqrt, laurent_eval, operator_norm, product_norm, tensor_apply
from .errors import (
    AbsoluteContinuityViolated,
    DegenerateRate,
    NotSymmetric,
    SupportMismatch,
)
from .exponent import PlanarMeasure, UniformCircle, _component_log_dist, _component_log_t

__all__ = [
    "FlagDistribution",
    "RateExponentPoint",
    "branch_norms",
    "symmetric_tradeoff_exponent",
    "branch_proportional_dist",
    "fixed_P_exponent",
    "best_exponent_over_R",
    "tradeoff_curve",
    "binary_entropy",
    "binary_kl",
    "kl_divergence",
]

_TINY = 1e-300


@dataclass(frozen=True)
class FlagDistribution:
    """Distribution of the per-party flag string: P(all-ones) = R, the rest
    conditioned on not-all-ones in `cond` (keys are 0/1 tuples)."""

    R: float
    cond: dict

    def __post_init__(self):
        if not (0.0 <= self.R <= 1.0):
            raise ValueError("R must lie in [0, 1]")
        cond = {tuple(int(x) for x in b): float(p) for b, p in self.cond.items()}
        for b, p in cond.items():
            if p < 0:
                raise ValueError("negative probability at %r" % (b,))
            if any(x not in (0, 1) for x in b):
                raise ValueError("flag strings are 0/1 tuples")
            if all(x == 1 for x in b):
                raise ValueError("the all-ones string belongs to R, not cond")
        if self.R < 1.0:
            total = sum(cond.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError("cond sums to %.12g, expected 1" % total)
        elif cond:
            raise ValueError("cond must be empty at R = 1")
        object.__setattr__(self, "cond", cond)


@dataclass(frozen=True)
class RateExponentPoint:
    R: float
    r: float  # bits per copy
    method: str  # symmetric_closed_form | fixed_P | time_sharing
    radius: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.R <= 1.0):
            raise ValueError("R out of [0, 1]")
        if self.r < -1e-9:
            raise ValueError("negative exponent %.3g" % self.r)


def branch_norms(deg, z) -> dict:
    """||psi_b(z)||^2 for every flag string b in {0,1}^k.

    Bit 1 selects A_j(z)/||A_j(z)||, bit 0 the complementary Kraus operator
    sqrt(I - A_j^*A_j/||A_j||^2). The values sum to 1 (the pairs form a
    measurement on each party).
    """
    z = complex(z)
    if z == 0:
        raise ValueError("branch norms are undefined at z = 0")
    ops = []
    for L in deg.maps:
        A = laurent_eval(L, z)
        nrm = operator_norm(A)
        K1 = A / nrm
        K0 = hermitian_sqrt(np.eye(A.shape[1]) - K1.conj().T @ K1)
        ops.append((K0, K1))
    k = deg.k
    out = {}
    psi = deg.psi.amplitudes
    dims = deg.psi.local_dims
    for bits in itertools.product((0, 1), repeat=k):
        sel = [ops[j][b] for j, b in enumerate(bits)]
        vec = tensor_apply(sel, psi, dims)
        out[bits] = float(np.vdot(vec, vec).real)
    return out


def _all_ones_branch_sq(deg, z: complex) -> float:
    """||psi_{1...1}(z)||^2 without enumerating the other branches."""
    z = complex(z)
    mats = [laurent_eval(L, z) for L in deg.maps]
    vec = tensor_apply(mats, deg.psi.amplitudes, deg.psi.local_dims)
    denom = 1.0
    for A in mats:
        denom *= operator_norm(A) ** 2
    return float(np.vdot(vec, vec).real) / denom


def _check_branch_symmetry(deg, tol: float = 1e-6) -> None:
    """NotSymmetric unless both the norm and the main-branch weight are
    functions of |z| alone (probed on a log-polar grid)."""
    from .exponent import is_centrally_symmetric

    if not is_centrally_symmetric(deg, tol):
        raise NotSymmetric("product norm varies with arg z")
    radii = np.exp2(np.linspace(-4.0, 4.0, 8))
    angles = np.exp(2j * np.pi * np.arange(16) / 16)
    for r in radii:
        vals = [_all_ones_branch_sq(deg, r * a) for a in angles]
        hi, lo = max(vals), min(vals)
        if (hi - lo) > tol * max(hi, 1e-12):
            raise NotSymmetric("main-branch weight varies with arg z at |z| = %.3g" % r)


def _symmetric_bracket(deg, R: float, x: float) -> float:
    """2R log2||A(2^x)|| - (1-R) log2(1 - s(2^x)) evaluated at radius 2^x.

    Evaluates the maps once and reuses them for both the norm product and
    the main-branch weight (this sits inside a golden-section loop).
    """
    r = 2.0 ** x
    mats = [laurent_eval(L, r) for L in deg.maps]
    pnorm = 1.0
    for A in mats:
        pnorm *= operator_norm(A)
    val = 2.0 * R * math.log2(max(pnorm, _TINY))
    if R < 1.0:
        vec = tensor_apply(mats, deg.psi.amplitudes, deg.psi.local_dims)
        s = float(np.vdot(vec, vec).real) / pnorm ** 2
        val -= (1.0 - R) * math.log2(max(1.0 - s, _TINY))
    return val


def _tradeoff_point(deg, R: float) -> RateExponentPoint:
    """r(R) radial optimization without the symmetry precheck."""
    x, y = golden_min_multistart(lambda t: _symmetric_bracket(deg, R, t),
                                 -8.0, 8.0, starts=8)
    return RateExponentPoint(R, -binary_entropy(R) + y, "symmetric_closed_form",
                             radius=2.0 ** x)


def symmetric_tradeoff_exponent(deg, R: float) -> RateExponentPoint:
    """Closed-form r(R) = -h(R) + inf_radius [2R log2||A|| - (1-R) log2(1-s)].

    s is the all-ones branch weight. Requires central symmetry of both the
    norm and s. The radial infimum uses multi-start golden section over
    log2(radius) in [-8, 8]; the objective blows up at the radius where
    s -> 1 (for combinatorial maps that is |z| = 1), which splits the
    bracket, hence the multi-start. R = 1 recovers the plain symmetric
    exponent; R = 0 is rejected (the limit is 0 by convention, handled by
    tradeoff_curve).
    """
    if R == 0.0:
        raise DegenerateRate("r(0) is a limit, reported as 0 by tradeoff_curve")
    if not (0.0 < R <= 1.0):
        raise ValueError("R must lie in (0, 1]")
    _check_branch_symmetry(deg)
    return _tradeoff_point(deg, R)


def branch_proportional_dist(deg, z, R: float) -> FlagDistribution:
    """The optimizing conditional flag distribution at a fixed point:
    P_cond(b) proportional to ||psi_b(z)||^2 over the non-all-ones strings."""
    values = branch_norms(deg, z)
    k = deg.k
    ones = tuple([1] * k)
    rest = {b: v for b, v in values.items() if b != ones}
    total = sum(rest.values())
    if total <= 0:
        raise SupportMismatch("all mass sits on the all-ones branch at z = %s" % z)
    if R == 1.0:
        return FlagDistribution(1.0, {})
    return FlagDistribution(R, {b: v / total for b, v in rest.items()})


def fixed_P_exponent(deg, dist: FlagDistribution, sigma: PlanarMeasure) -> RateExponentPoint:
    """Achievable exponent for a user-chosen flag distribution and measure.

    -h(R) + sup over supp sigma of
        2R log2||A(z)|| + 2Re (int log2|t| - int log2|z-t|) dsigma
        + (1-R) D(P_cond || branch weights at z).

    Both choices relax infima, so the result upper-bounds the optimized
    r(R) (equality for branch-proportional P_cond and the optimal circle on
    symmetric inputs). Raises SupportMismatch when P_cond puts mass on a
    branch whose weight vanishes across the entire support.
    """
    R = dist.R
    e = deg.error_degree
    log_t = sum(w * _component_log_t(c) for c, w in sigma.components)

    samples: list[complex] = []
    for comp, _w in sigma.components:
        if isinstance(comp, UniformCircle):
            samples.extend(comp.radius * np.exp(2j * np.pi * np.arange(256) / 256))
        elif hasattr(comp, "rho_hat"):
            samples.extend(comp.radius * np.exp(2j * np.pi * np.arange(256) / 256))
        else:
            samples.append(comp.point)

    best = -math.inf
    best_z = None
    for z in samples:
        log_d = sum(w * _component_log_dist(c, z) for c, w in sigma.components)
        val = 2.0 * R * math.log2(max(product_norm(deg, z), _TINY))
        val += 2.0 * R * e * (log_t - log_d)
        if R < 1.0:
            values = branch_norms(deg, z)
            ones = tuple([1] * deg.k)
            q = {b: v for b, v in values.items() if b != ones}
            try:
                val += (1.0 - R) * kl_divergence(dist.cond, q)
            except AbsoluteContinuityViolated:
                val = math.inf
        if val > best:
            best = val
            best_z = z
    if math.isinf(best):
        raise SupportMismatch(
            "P_cond puts mass on branches that vanish on the measure's support")
    radius = abs(best_z) if best_z is not None else None
    return RateExponentPoint(R, -binary_entropy(R) + best, "fixed_P", radius=radius)


def best_exponent_over_R(deg) -> float:
    """inf_R r(R) in closed form: -sup_z log2(||A(z)||^{-2} + 1 - s(z)).

    The entropy term and the R-optimization collapse by the identity
    sup_p [h(p) + p x1 + (1-p) x2] = log2(2^{x1} + 2^{x2}). Symmetric
    inputs only; sup over a radius grid plus golden polish.
    """
    _check_branch_symmetry(deg)

    def neg_obj(x: float) -> float:
        r = 2.0 ** x
        lp = product_norm(deg, r)
        s = _all_ones_branch_sq(deg, r)
        inner = max(lp, _TINY) ** -2.0 + max(1.0 - s, 0.0)
        return -math.log2(max(inner, _TINY))

    xs = np.linspace(-8.0, 8.0, 129)
    vals = [neg_obj(x) for x in xs]
    i = int(np.argmin(vals))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, len(xs) - 1)]
    from ._search import golden_min

    x, y = golden_min(neg_obj, float(lo), float(hi), xtol=1e-12)
    return min(float(min(vals)), y)


def tradeoff_curve(deg, R_grid, threads: int | None = None):
    """(points, baseline): r(R) on the grid plus the time-sharing line R*r(1).

    R = 0 entries are reported as r = 0 (continuity convention). Evaluations
    are independent and run on a thread pool; output order follows the grid.
    """
    grid = [float(R) for R in R_grid]
    _check_branch_symmetry(deg)
    r1 = _tradeoff_point(deg, 1.0).r

    def one(R: float) -> RateExponentPoint:
        if R == 0.0:
            return RateExponentPoint(0.0, 0.0, "symmetric_closed_form")
        return _tradeoff_point(deg, R)

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(one, grid))
    else:
        points = [one(R) for R in grid]
    baseline = [RateExponentPoint(R, R * r1, "time_sharing") for R in grid]
    return points, baseline


def binary_entropy(R: float) -> float:
    """h(R) in bits; h(0) = h(1) = 0."""
    if not (0.0 <= R <= 1.0):
        raise ValueError("R out of [0, 1]")
    if R in (0.0, 1.0):
        return 0.0
    return -R * math.log2(R) - (1.0 - R) * math.log2(1.0 - R)


def binary_kl(q: float, p: float) -> float:
    """d(q||p) = q log2(q/p) + (1-q) log2((1-q)/(1-p))."""
    return kl_divergence({1: q, 0: 1.0 - q}, {1: p, 0: 1.0 - p})


def kl_divergence(P, Q) -> float:
    """D(P||Q) = sum P log2(P/Q), with 0 log 0 := 0.

    P must be a probability distribution; Q may be an unnormalized positive
    vector (the branch-weight use case). Mass of P where Q vanishes raises
    AbsoluteContinuityViolated.
    """
    if isinstance(P, dict):
        keys = set(P) | set(Q)
        pairs = [(float(P.get(x, 0.0)), float(Q.get(x, 0.0))) for x in keys]
    else:
        p_arr = np.asarray(P, dtype=float).ravel()
        q_arr = np.asarray(Q, dtype=float).ravel()
        if p_arr.size != q_arr.size:
            raise ValueError("P and Q must have matching supports")
        pairs = list(zip(p_arr.tolist(), q_arr.tolist()))
    total = 0.0
    for p, q in pairs:
        if p < -1e-15 or q < -1e-15:
            raise ValueError("negative mass")
        if p <= 0.0:
            continue
        if q <= 0.0:
            raise AbsoluteContinuityViolated("P has mass where Q vanishes")
        total += p * math.log2(p / q)
    return total
