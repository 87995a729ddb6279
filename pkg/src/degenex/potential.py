"""Weighted Fekete points, the sup-inf measure objective, measure
discretization and potential sanity checks.

The central quantity is

    delta_n = (1/n) log2 min_i prod_{l != i} |z_i - z_l| w1(z_i) w2(z_l)

maximized over configurations of n+1 points in a compact set. It is
sandwiched by the sup-inf of the smoothed objective over probability
measures, which this module evaluates analytically on circle mixtures.
Interior accumulation happens in natural logs (the distance kernels), with
one conversion to bits at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import leja_accumulate, pairwise_log_abs
from .core import product_norms
from .errors import AtomSingularity, GridTooSmall, TooCloseToSupport
from .exponent import Atom, PlanarMeasure, UniformCircle, _component_log_dist
from .finiten import PointConfiguration

__all__ = [
    "CompactDomain",
    "WeightPair",
    "FeketeResult",
    "weighted_fekete",
    "supinf_objective",
    "discretize_measure",
    "logarithmic_potential",
    "harmonicity_check",
]

_LN2 = math.log(2.0)
_FLOOR = 1e-300


@dataclass(frozen=True)
class CompactDomain:
    """Compact planar search domain with a fixed candidate grid.

    kinds: annulus(r_in, r_out), disk(r), circle(r), explicit(points).
    Log-polar grids by default (128 radii x 256 angles); the disk keeps its
    inner radius at r/256 so candidates stay away from the origin, where
    the |t|^{-1} weight blows up.
    """

    kind: str
    params: tuple
    n_radii: int = 128
    n_angles: int = 256

    @classmethod
    def annulus(cls, r_in: float, r_out: float, n_radii: int = 128, n_angles: int = 256):
        if not (0 < r_in <= r_out):
            raise ValueError("need 0 < r_in <= r_out")
        return cls("annulus", (float(r_in), float(r_out)), n_radii, n_angles)

    @classmethod
    def disk(cls, r: float, n_radii: int = 128, n_angles: int = 256):
        if not (r > 0):
            raise ValueError("radius must be positive")
        return cls("disk", (float(r),), n_radii, n_angles)

    @classmethod
    def circle(cls, r: float, n_angles: int = 256):
        if not (r > 0):
            raise ValueError("radius must be positive")
        return cls("circle", (float(r),), 1, n_angles)

    @classmethod
    def explicit(cls, points):
        pts = tuple(complex(p) for p in points)
        if any(p == 0 for p in pts):
            raise ValueError("explicit grids must avoid the origin")
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate grid points")
        return cls("explicit", pts, 0, 0)

    def grid(self) -> np.ndarray:
        ang = np.exp(2j * np.pi * np.arange(self.n_angles) / max(self.n_angles, 1))
        if self.kind == "annulus":
            r_in, r_out = self.params
            radii = np.geomspace(r_in, r_out, self.n_radii)
            return (radii[:, None] * ang[None, :]).ravel()
        if self.kind == "disk":
            (r,) = self.params
            radii = np.geomspace(r / 256.0, r, self.n_radii)
            return (radii[:, None] * ang[None, :]).ravel()
        if self.kind == "circle":
            (r,) = self.params
            return r * ang
        return np.asarray(self.params, dtype=np.complex128)


@dataclass(frozen=True)
class WeightPair:
    """External-field weights w1 (on the maximized point) and w2 (on the
    rest). Callables must accept complex scalars or arrays."""

    w1: object
    w2: object
    label: str = "custom"

    @classmethod
    def trivial(cls):
        one = lambda z: np.ones_like(np.abs(np.asarray(z, dtype=np.complex128)),
                                     dtype=float)
        return cls(one, one, "trivial")

    @classmethod
    def from_degeneration(cls, deg):
        """w1(z) = ||A(z)||^{-1/e}, w2(t) = 1/|t|: the weights under which
        delta relates to the success exponent (delta ~ -r/(2e))."""
        e = float(deg.error_degree)

        def w1(z):
            zs = np.atleast_1d(np.asarray(z, dtype=np.complex128))
            out = np.maximum(product_norms(deg, zs), 1e-12) ** (-1.0 / e)
            return out if np.ndim(z) else float(out[0])

        def w2(t):
            ts = np.atleast_1d(np.asarray(t, dtype=np.complex128))
            out = 1.0 / np.maximum(np.abs(ts), _FLOOR)
            return out if np.ndim(t) else float(out[0])

        return cls(w1, w2, "from_degeneration")


@dataclass(frozen=True)
class FeketeResult:
    points: PointConfiguration
    delta_n: float  # bits
    n: int

    def __post_init__(self):
        if not math.isfinite(self.delta_n):
            raise ValueError("non-finite delta")


def _log_weights(weights: WeightPair, G: np.ndarray):
    lw1 = np.log(np.asarray(weights.w1(G), dtype=float).ravel())
    lw2 = np.log(np.asarray(weights.w2(G), dtype=float).ravel())
    if lw1.shape != G.shape or lw2.shape != G.shape:
        raise ValueError("weight callables must be elementwise on arrays")
    if not (np.all(np.isfinite(lw1)) and np.all(np.isfinite(lw2))):
        raise ValueError("weights must be strictly positive and finite on the grid")
    return lw1, lw2


def weighted_fekete(domain: CompactDomain, weights: WeightPair, n: int) -> FeketeResult:
    """Max-min weighted Fekete configuration of n+1 grid points.

    Greedy Leja insertion (each new point maximizes its own weighted product
    against the chosen set) followed by first-improvement exchange passes:
    for each configuration slot, the best grid replacement is taken whenever
    it strictly raises the min-over-i objective. At most 100 passes; in
    practice the loop settles after two or three.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    G = domain.grid()
    minimum = (n + 1) if domain.kind == "explicit" else 4 * (n + 1)
    if G.size < minimum:
        raise GridTooSmall("grid has %d candidates, need >= %d" % (G.size, minimum))
    lw1, lw2 = _log_weights(weights, G)

    # Leja seeding: start from the heaviest w1 (outermost point on ties)
    order = np.lexsort((-np.abs(G), -lw1))
    idx = [int(order[0])]
    acc = np.zeros(G.size)
    leja_accumulate(acc, G, G[idx[0]])
    for j in range(1, n + 1):
        score = acc + j * lw1
        score[idx] = -np.inf
        g = int(np.argmax(score))
        idx.append(g)
        leja_accumulate(acc, G, G[g])

    P_idx = np.array(idx, dtype=np.intp)

    def state(P_idx):
        P = G[P_idx]
        E = np.log(np.maximum(np.abs(P[:, None] - G[None, :]), _FLOOR))
        D = pairwise_log_abs(P)
        lw1P = lw1[P_idx]
        lw2P = lw2[P_idx]
        S = D.sum(axis=1) + n * lw1P + (lw2P.sum() - lw2P)
        return P, E, D, lw1P, lw2P, S

    P, E, D, lw1P, lw2P, S = state(P_idx)
    cur = float(S.min())
    Ecol = E.sum(axis=0)
    for _ in range(100):
        swapped = False
        for i in range(n + 1):
            base = S[:, None] + E + lw2[None, :]
            cand = base - (D[:, i] + lw2P[i])[:, None]
            cand[i, :] = Ecol - E[i, :] + n * lw1 + (lw2P.sum() - lw2P[i])
            newobj = cand.min(axis=0)
            g = int(np.argmax(newobj))
            if newobj[g] > cur + 1e-12:
                P_idx[i] = g
                P, E, D, lw1P, lw2P, S = state(P_idx)
                cur = float(S.min())
                Ecol = E.sum(axis=0)
                swapped = True
        if not swapped:
            break

    return FeketeResult(PointConfiguration(P), cur / (n * _LN2), n)


def supinf_objective(sigma: PlanarMeasure, weights: WeightPair) -> float:
    """inf over supp sigma of int log2|z-t| dsigma + log2 w1(z) + int log2 w2 dsigma.

    Circle components integrate analytically; for atomic components the atom
    at the evaluation point itself is excluded (the discrete counterpart of
    the Fekete product, which also skips l = i).
    """
    lw2_int = 0.0
    samples: list[complex] = []
    for comp, w in sigma.components:
        if isinstance(comp, Atom):
            lw2_int += w * math.log2(float(weights.w2(comp.point)))
            samples.append(comp.point)
        else:
            zs = comp.radius * np.exp(2j * np.pi * np.arange(512) / 512)
            vals = np.log2(np.asarray(weights.w2(zs), dtype=float))
            if hasattr(comp, "rho_hat"):
                dens = np.ones(512)
                for m, rho in enumerate(comp.rho_hat, start=1):
                    dens += 2.0 * (rho * np.exp(2j * np.pi * m * np.arange(512) / 512)).real
                lw2_int += w * float(np.mean(vals * dens))
            else:
                lw2_int += w * float(np.mean(vals))
            samples.extend(comp.radius * np.exp(2j * np.pi * np.arange(256) / 256))

    best = math.inf
    for z in samples:
        log_d = 0.0
        for comp, w in sigma.components:
            if isinstance(comp, Atom) and abs(comp.point - z) < 1e-15:
                continue  # self-exclusion
            log_d += w * _component_log_dist(comp, z)
        val = log_d + math.log2(float(weights.w1(z))) + lw2_int
        best = min(best, val)
    return best


def discretize_measure(sigma: PlanarMeasure, a: float, N: int) -> PointConfiguration:
    """Lattice discretization: per cell of pitch a centered at (xa, ya), a
    t x t sub-lattice with t = ceil(sqrt(mass * N)).

    Cell masses come from an 8192-point angular sampling of each circle
    component (atoms land whole in their cell). Points are
    ((x - 1/2 + (i - 1/2)/t) + 1j (y - 1/2 + (j - 1/2)/t)) a for i, j = 1..t.
    If a point lands exactly on the origin (odd t in the central cell) it is
    nudged by a/(8t) * (1+1j), preserving its cell; configurations must
    avoid 0.
    """
    if not (a > 0) or N < 1:
        raise ValueError("need pitch a > 0 and N >= 1")
    masses: dict[tuple[int, int], float] = {}

    def put(z: complex, w: float) -> None:
        x = int(np.rint(z.real / a))
        y = int(np.rint(z.imag / a))
        masses[(x, y)] = masses.get((x, y), 0.0) + w

    for comp, w in sigma.components:
        if isinstance(comp, Atom):
            put(comp.point, w)
        else:
            ang = 2.0 * np.pi * np.arange(8192) / 8192
            zs = comp.radius * np.exp(1j * ang)
            if hasattr(comp, "rho_hat"):
                dens = np.ones(8192)
                for m, rho in enumerate(comp.rho_hat, start=1):
                    dens += 2.0 * (rho * np.exp(1j * m * ang)).real
                ws = w * dens / dens.sum()
            else:
                ws = np.full(8192, w / 8192)
            for z, wz in zip(zs, ws):
                put(complex(z), float(wz))

    pts: list[complex] = []
    for (x, y), mass in sorted(masses.items()):
        t = int(math.ceil(math.sqrt(mass * N)))
        if t < 1:
            continue
        for i in range(1, t + 1):
            for j in range(1, t + 1):
                z = complex((x - 0.5 + (i - 0.5) / t) * a,
                            (y - 0.5 + (j - 0.5) / t) * a)
                if z == 0:
                    z = complex(a / (8 * t), a / (8 * t))
                pts.append(z)
    return PointConfiguration(np.asarray(pts))


def logarithmic_potential(sigma: PlanarMeasure, z) -> float:
    """U(z) = int log2(1/|z-t|) dsigma(t), in bits."""
    z = complex(z)
    val = 0.0
    for comp, w in sigma.components:
        val -= w * _component_log_dist(comp, z)
    return val


def _support_distance(sigma: PlanarMeasure, z: complex) -> float:
    d = math.inf
    for comp, _w in sigma.components:
        if isinstance(comp, Atom):
            d = min(d, abs(z - comp.point))
        else:
            d = min(d, abs(abs(z) - comp.radius))
    return d


def harmonicity_check(sigma: PlanarMeasure, z, h: float) -> float:
    """5-point Laplacian of the potential at z, step h.

    Should vanish (up to O(h^2)) wherever z is at distance >= 10h from the
    support; closer evaluations raise TooCloseToSupport instead of returning
    a meaningless stencil value.
    """
    z = complex(z)
    if not (h > 0):
        raise ValueError("step must be positive")
    if _support_distance(sigma, z) < 10.0 * h:
        raise TooCloseToSupport("stencil overlaps the support")
    try:
        u0 = logarithmic_potential(sigma, z)
        up = logarithmic_potential(sigma, z + h)
        um = logarithmic_potential(sigma, z - h)
        vp = logarithmic_potential(sigma, z + 1j * h)
        vm = logarithmic_potential(sigma, z - 1j * h)
    except AtomSingularity as exc:  # pragma: no cover - guarded by the distance check
        raise TooCloseToSupport(str(exc)) from exc
    return (up + um + vp + vm - 4.0 * u0) / (h * h)
