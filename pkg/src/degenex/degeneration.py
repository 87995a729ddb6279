"""Degenerations: representation, validation and constructions.

A degeneration is a family of k local Laurent-matrix maps A_j(z) together
with an input state psi and a target state phi such that

    (A_1(z) (x) ... (x) A_k(z)) psi  =  phi + (terms of positive degree in z)

i.e. the expansion has no negative powers and its constant term is exactly
phi. The highest power that actually appears is the error degree e; e = 0
with constant maps is an ordinary single-copy (restriction) transformation.

Besides generic Laurent families this module builds two structured classes:
combinatorial degenerations (diagonal maps from integer index weights) and
GHZ-type network tensors described by a hypergraph.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    LaurentMatrix,
    MultipartiteState,
    laurent_eval,
    operator_norm,
    product_norms,
    tensor_apply,
)
from .errors import Disconnected, EmptyPhi, ShapeMismatch, ValidationFailure

__all__ = [
    "Degeneration",
    "ValidationReport",
    "CombinatorialSpec",
    "Hypergraph",
    "validate",
    "expand_polynomial",
    "from_combinatorial",
    "combinatorial_exponent",
    "edge_connectivity",
    "hypergraph_ghz_exponent",
    "ghz_w_generic",
    "ghz_w_minimal",
    "ghz_w_combinatorial",
    "k3_network",
]


@dataclass(frozen=True)
class Degeneration:
    """k local Laurent maps + input state + target state + error degree."""

    k: int
    maps: tuple[LaurentMatrix, ...]
    psi: MultipartiteState
    phi: MultipartiteState
    error_degree: int

    def __init__(self, maps, psi: MultipartiteState, phi: MultipartiteState, error_degree: int):
        maps = tuple(maps)
        k = len(maps)
        if k != psi.k or k != phi.k:
            raise ShapeMismatch("party counts disagree: %d maps, psi k=%d, phi k=%d" % (k, psi.k, phi.k))
        for j, L in enumerate(maps):
            if L.cols != psi.local_dims[j] or L.rows != phi.local_dims[j]:
                raise ShapeMismatch(
                    "map %d is %dx%d but psi/phi dims are %d/%d"
                    % (j, L.rows, L.cols, psi.local_dims[j], phi.local_dims[j])
                )
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "error_degree", int(error_degree))

    def product_norm(self, z: complex) -> float:
        out = 1.0
        for L in self.maps:
            out *= operator_norm(laurent_eval(L, z))
        return out

    def norms_per_party(self, z: complex) -> list[float]:
        return [operator_norm(laurent_eval(L, z)) for L in self.maps]


@dataclass(frozen=True)
class ValidationReport:
    is_degeneration: bool
    error_degree: int
    max_negative_residual: float
    constant_term_error: float
    has_positive_powers: bool
    has_negative_powers: bool
    nowhere_zero_min_grid_norm: float
    # number of common roots (z != 0) shared by all entries of each factor;
    # a nonzero count means that factor vanishes identically at some point,
    # which is reported but never repaired
    factor_common_roots: tuple[int, ...] = ()

    def is_restriction(self) -> bool:
        """True when the maps are plain constants (no z dependence at all)."""
        return not (self.has_positive_powers or self.has_negative_powers)


def expand_polynomial(maps, psi: MultipartiteState) -> dict[int, np.ndarray]:
    """Coefficients of (A_1(z) (x) ... (x) A_k(z)) psi as {power: flat vector}.

    Exact convolution, party by party: applying one party's terms multiplies
    the number of tracked powers by at most that map's term count, so this
    stays tiny for the families handled here.
    """
    dims = psi.local_dims
    if len(maps) != len(dims):
        raise ShapeMismatch("got %d maps for a %d-party state" % (len(maps), len(dims)))
    coeffs: dict[int, np.ndarray] = {0: psi.amplitudes.reshape(dims)}
    for j, L in enumerate(maps):
        if L.cols != dims[j]:
            raise ShapeMismatch("map %d has %d columns, party dim is %d" % (j, L.cols, dims[j]))
        nxt: dict[int, np.ndarray] = {}
        for p, tensor in coeffs.items():
            for h, mat in L.terms.items():
                piece = np.moveaxis(np.tensordot(mat, tensor, axes=([1], [j])), 0, j)
                key = p + h
                if key in nxt:
                    nxt[key] = nxt[key] + piece
                else:
                    nxt[key] = piece
        coeffs = nxt
    return {p: t.reshape(-1) for p, t in coeffs.items()}


def _entry_polys(L: LaurentMatrix) -> np.ndarray:
    """Entries of z^{-min_power} L(z) as ordinary polynomial coefficient rows."""
    span = L.max_power - L.min_power + 1
    out = np.zeros((L.rows * L.cols, span), dtype=np.complex128)
    for p, mat in L.terms.items():
        out[:, p - L.min_power] = mat.reshape(-1)
    return out


def _common_root_count(L: LaurentMatrix, tol: float = 1e-9) -> int:
    """Count z != 0 at which every entry of L vanishes.

    Candidate roots are taken from the lowest-degree nonzero entry and then
    checked against all entries by evaluation. The z = 0 root introduced by
    clearing negative powers is excluded (z = 0 is outside the domain).
    """
    polys = _entry_polys(L)
    norms = np.sum(np.abs(polys), axis=1)
    live = [polys[i] for i in range(polys.shape[0]) if norms[i] > 0]
    if not live:
        return 0
    # lowest actual degree first: fewest candidates to test
    def deg(c):
        nz = np.nonzero(np.abs(c) > 0)[0]
        return int(nz[-1]) if nz.size else -1

    live.sort(key=deg)
    base = live[0]
    d = deg(base)
    if d <= 0:
        return 0  # a nonzero constant entry never vanishes
    roots = np.roots(base[: d + 1][::-1])
    count = 0
    for r in roots:
        if abs(r) < 1e-12 or not np.isfinite(r):
            continue
        ok = True
        for c in live:
            powers = np.arange(c.size)
            scale = float(np.sum(np.abs(c) * np.maximum(abs(r), 1.0) ** powers))
            val = np.polyval(c[::-1], r)
            if abs(val) > tol * max(scale, 1.0):
                ok = False
                break
        if ok:
            count += 1
    return count


def validate(maps, psi: MultipartiteState, phi: MultipartiteState, tol: float = 1e-9) -> ValidationReport:
    """Check the degeneration conditions by exact coefficient expansion.

    Reports the residual mass at negative powers, the distance of the
    constant term from phi, the resulting error degree, which power signs
    the maps use, and two nowhere-zero heuristics (a log-polar grid minimum
    of the product norm, and per-factor common-root counts).
    """
    maps = tuple(maps)
    coeffs = expand_polynomial(maps, psi)
    norms = {p: float(np.linalg.norm(v)) for p, v in coeffs.items()}

    max_neg = max((n for p, n in norms.items() if p < 0), default=0.0)
    c0 = coeffs.get(0)
    if c0 is None:
        c0 = np.zeros(phi.amplitudes.size, dtype=np.complex128)
    if c0.size != phi.amplitudes.size:
        raise ShapeMismatch("expansion lives in dimension %d, phi in %d" % (c0.size, phi.amplitudes.size))
    const_err = float(np.linalg.norm(c0 - phi.amplitudes))
    significant = [p for p, n in norms.items() if n > tol]
    error_degree = max(significant, default=0)

    has_pos = any(p > 0 for L in maps for p in L.terms)
    has_neg = any(p < 0 for L in maps for p in L.terms)

    radii = np.exp2(np.linspace(-4.0, 4.0, 32))
    angles = np.exp(2j * np.pi * np.arange(32) / 32.0)
    grid = (radii[:, None] * angles[None, :]).reshape(-1)

    class _MapsOnly:
        pass

    holder = _MapsOnly()
    holder.maps = maps
    grid_min = float(np.min(product_norms(holder, grid)))

    roots = tuple(_common_root_count(L) for L in maps)

    ok = max_neg <= tol and const_err <= tol
    return ValidationReport(
        is_degeneration=ok,
        error_degree=int(error_degree),
        max_negative_residual=max_neg,
        constant_term_error=const_err,
        has_positive_powers=has_pos,
        has_negative_powers=has_neg,
        nowhere_zero_min_grid_norm=grid_min,
        factor_common_roots=roots,
    )


def build_degeneration(maps, psi: MultipartiteState, phi: MultipartiteState, tol: float = 1e-9) -> Degeneration:
    """Validate and wrap; raises ValidationFailure with the residuals on failure."""
    report = validate(maps, psi, phi, tol=tol)
    if not report.is_degeneration:
        raise ValidationFailure(
            "not a degeneration: negative-power residual %.3g, constant-term error %.3g"
            % (report.max_negative_residual, report.constant_term_error)
        )
    return Degeneration(maps, psi, phi, report.error_degree)


# ---------------------------------------------------------------------------
# combinatorial degenerations


@dataclass(frozen=True)
class CombinatorialSpec:
    """Integer-weight data that induces a diagonal-map degeneration.

    psi_support lists (index tuple, amplitude) pairs; phi is the subset of
    those index tuples kept in the target. u[j][i] is the integer weight of
    index i at party j; weight sums must vanish on phi and be positive on
    the rest of the support.
    """

    k: int
    index_sizes: tuple[int, ...]
    psi_support: tuple[tuple[tuple[int, ...], complex], ...]
    phi: frozenset[tuple[int, ...]]
    u: tuple[tuple[int, ...], ...]

    def __init__(self, k, index_sizes, psi_support, phi, u):
        k = int(k)
        index_sizes = tuple(int(d) for d in index_sizes)
        if len(index_sizes) != k:
            raise ShapeMismatch("index_sizes must have length k")
        support = []
        seen = set()
        for idx, amp in psi_support:
            idx = tuple(int(i) for i in idx)
            if len(idx) != k or any(not (0 <= i < index_sizes[j]) for j, i in enumerate(idx)):
                raise ValidationFailure("support index %r out of range" % (idx,))
            if idx in seen:
                raise ValidationFailure("duplicate support index %r" % (idx,))
            seen.add(idx)
            support.append((idx, complex(amp)))
        phi = frozenset(tuple(int(i) for i in idx) for idx in phi)
        if not phi <= seen:
            raise ValidationFailure("phi is not a subset of the psi support")
        u = tuple(tuple(int(x) for x in row) for row in u)
        if len(u) != k or any(len(u[j]) != index_sizes[j] for j in range(k)):
            raise ShapeMismatch("u must supply one integer per party index")
        total = sum(abs(a) ** 2 for _, a in support)
        if abs(total - 1.0) > 1e-10:
            raise ValidationFailure("psi support amplitudes have squared mass %.12g, expected 1" % total)
        for idx, _ in support:
            s = sum(u[j][idx[j]] for j in range(k))
            if idx in phi:
                if s != 0:
                    raise ValidationFailure("weight sum %d != 0 on phi index %r" % (s, idx))
            elif s <= 0:
                raise ValidationFailure("weight sum %d <= 0 off phi at index %r" % (s, idx))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "index_sizes", index_sizes)
        object.__setattr__(self, "psi_support", tuple(support))
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "u", u)

    def q(self) -> float:
        return float(sum(abs(a) ** 2 for idx, a in self.psi_support if idx in self.phi))


def from_combinatorial(spec: CombinatorialSpec) -> tuple[Degeneration, float]:
    """Build the diagonal-map degeneration induced by integer weights.

    Each party's map is q^{-1/(2k)} * sum_i z^{u_j(i)} |i><i|; the target is
    the support restriction of psi renormalized by 1/sqrt(q).
    """
    q = spec.q()
    if q <= 0.0:
        raise EmptyPhi("phi carries no mass (q = 0)")
    scale = q ** (-1.0 / (2.0 * spec.k))
    maps = []
    for j in range(spec.k):
        d = spec.index_sizes[j]
        terms: dict[int, np.ndarray] = {}
        for i in range(d):
            p = spec.u[j][i]
            mat = terms.setdefault(p, np.zeros((d, d), dtype=np.complex128))
            mat[i, i] = scale
        maps.append(LaurentMatrix(terms))

    psi_vec = np.zeros(int(np.prod(spec.index_sizes)), dtype=np.complex128)
    phi_vec = np.zeros_like(psi_vec)
    strides = np.cumprod((1,) + spec.index_sizes[::-1][:-1])[::-1]
    for idx, amp in spec.psi_support:
        flat = int(np.dot(idx, strides))
        psi_vec[flat] = amp
        if idx in spec.phi:
            phi_vec[flat] = amp / math.sqrt(q)
    psi = MultipartiteState(spec.index_sizes, psi_vec)
    phi = MultipartiteState(spec.index_sizes, phi_vec)
    e = max(sum(spec.u[j][idx[j]] for j in range(spec.k)) for idx, _ in spec.psi_support)
    return Degeneration(maps, psi, phi, int(e)), q


def combinatorial_exponent(spec: CombinatorialSpec) -> float:
    """-log2 q: the error exponent certified by the combinatorial structure."""
    q = spec.q()
    if q <= 0.0:
        raise EmptyPhi("phi carries no mass (q = 0)")
    return -math.log2(q)


# ---------------------------------------------------------------------------
# hypergraph GHZ networks


@dataclass(frozen=True)
class Hypergraph:
    vertex_count: int
    edges: tuple[tuple[int, ...], ...]

    def __init__(self, vertex_count, edges):
        k = int(vertex_count)
        if k < 1:
            raise ValueError("need at least one vertex")
        cleaned = []
        for e in edges:
            e = tuple(sorted(set(int(v) for v in e)))
            if len(e) < 2:
                raise ValueError("hyperedge %r has fewer than 2 vertices" % (e,))
            if any(not (0 <= v < k) for v in e):
                raise ValueError("hyperedge %r mentions an unknown vertex" % (e,))
            cleaned.append(e)
        object.__setattr__(self, "vertex_count", k)
        object.__setattr__(self, "edges", tuple(cleaned))


def edge_connectivity(H: Hypergraph) -> int:
    """Minimum number of hyperedges crossing a nontrivial vertex bipartition.

    Equals the minimum number of hyperedge removals that disconnect H.
    Enumerates the 2^{k-1} - 1 bipartitions with vertex 0 pinned to one
    side; fine for k <= 20.
    """
    k = H.vertex_count
    if k > 20:
        raise ValueError("bipartition enumeration is limited to k <= 20")
    if k == 1:
        return 0 if not H.edges else len(H.edges)
    masks = [0] * len(H.edges)
    for i, e in enumerate(H.edges):
        m = 0
        for v in e:
            m |= 1 << v
        masks[i] = m
    best = None
    full = (1 << k) - 1
    for sub in range(1 << (k - 1)):
        side = (sub << 1) | 1  # vertex 0 always on this side
        if side == full:
            continue
        other = full ^ side
        crossing = sum(1 for m in masks if (m & side) and (m & other))
        if best is None or crossing < best:
            best = crossing
            if best == 0:
                break
    if best == 0:
        raise Disconnected("hypergraph splits with no crossing edges")
    return int(best)


def hypergraph_ghz_exponent(H: Hypergraph) -> tuple[float, float]:
    """(rate, exponent) = (lambda(H), |E(H)| - lambda(H)) in bits.

    One 2-level GHZ state per hyperedge; the achievable GHZ rate across the
    network is the edge connectivity and the strong converse exponent of
    pushing the rate to lambda(H) is the number of leftover edges.
    """
    lam = edge_connectivity(H)
    return float(lam), float(len(H.edges) - lam)


# ---------------------------------------------------------------------------
# bundled example builders


def ghz_w_generic(k: int = 3) -> Degeneration:
    """GHZ-to-W degeneration with per-party norm exactly sqrt(4 + |z|^2).

    Each party applies C0 + z C1 with C0 = 2 e0 v*, C1 = e1 v* + 2^{-k/2} e2 w*
    (v, w the Hadamard basis of the input qubit; e0, e1, e2 an orthonormal
    triple on the output); party 1 additionally carries the overall
    sqrt(2/k) / z prefactor. The input is the k-qubit GHZ state with sign
    (-1)^{k+1} on |1...1> and the target is the k-party single-excitation
    state written on the (e0, e2) levels. Error degree is k - 1.

    The rank-1 structure makes A_j(z)* A_j(z) = (4+|z|^2) vv* + |z|^2 2^{-k} ww*,
    so the product norm is sqrt(2/k) (4+|z|^2)^{k/2} / |z| in closed form.
    """
    if k < 2:
        raise ValueError("need at least 2 parties")
    s2 = math.sqrt(2.0)
    v = np.array([1.0, -1.0]) / s2
    w = np.array([1.0, 1.0]) / s2
    C0 = np.zeros((3, 2), dtype=np.complex128)
    C0[0, :] = 2.0 * v
    C1 = np.zeros((3, 2), dtype=np.complex128)
    C1[1, :] = v
    C1[2, :] = (2.0 ** (-k / 2.0)) * w

    pref = math.sqrt(2.0 / k)
    first = LaurentMatrix({-1: pref * C0, 0: pref * C1})
    rest = LaurentMatrix({0: C0, 1: C1})
    maps = [first] + [rest] * (k - 1)

    psi_vec = np.zeros(2 ** k, dtype=np.complex128)
    psi_vec[0] = 1.0 / s2
    psi_vec[-1] = ((-1.0) ** (k + 1)) / s2
    psi = MultipartiteState((2,) * k, psi_vec)

    phi_vec = np.zeros(3 ** k, dtype=np.complex128)
    for j in range(k):
        idx = [0] * k
        idx[j] = 2
        flat = 0
        for i in idx:
            flat = flat * 3 + i
        phi_vec[flat] = 1.0 / math.sqrt(k)
    phi = MultipartiteState((3,) * k, phi_vec)
    return Degeneration(maps, psi, phi, k - 1)


def ghz_w_minimal(k: int = 3) -> Degeneration:
    """GHZ-to-W degeneration on minimal 2x2 local maps.

    Party j >= 2 applies [[1, -1], [z, 0]]; party 1 the same map scaled by
    sqrt(2/k)/z. Valid with error degree k - 1, but its per-party operator
    norm is the true sigma_max of the 2x2 map, which differs from the
    sqrt(4+|z|^2) profile of ghz_w_generic; use it for validation tests,
    not for the closed-form exponent values.
    """
    if k < 2:
        raise ValueError("need at least 2 parties")
    M0 = np.array([[1.0, -1.0], [0.0, 0.0]], dtype=np.complex128)
    M1 = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128)
    pref = math.sqrt(2.0 / k)
    first = LaurentMatrix({-1: pref * M0, 0: pref * M1})
    rest = LaurentMatrix({0: M0, 1: M1})
    maps = [first] + [rest] * (k - 1)

    s2 = math.sqrt(2.0)
    psi_vec = np.zeros(2 ** k, dtype=np.complex128)
    psi_vec[0] = 1.0 / s2
    psi_vec[-1] = ((-1.0) ** (k + 1)) / s2
    psi = MultipartiteState((2,) * k, psi_vec)

    phi_vec = np.zeros(2 ** k, dtype=np.complex128)
    for j in range(k):
        phi_vec[1 << (k - 1 - j)] = 1.0 / math.sqrt(k)
    phi = MultipartiteState((2,) * k, phi_vec)
    return Degeneration(maps, psi, phi, k - 1)


def ghz_w_combinatorial() -> CombinatorialSpec:
    """Three-party GHZ-to-W as a combinatorial degeneration.

    In the Hadamard (+/-) basis the GHZ state is supported on the four even
    sign patterns with amplitude 1/2; keeping the three weight-1 patterns
    gives a W-type target with q = 3/4. Weights are u(+) = 2, u(-) = -1 at
    every party, so the error degree is 6.
    """
    support = [((0, 0, 0), 0.5), ((0, 1, 1), 0.5), ((1, 0, 1), 0.5), ((1, 1, 0), 0.5)]
    phi = [(0, 1, 1), (1, 0, 1), (1, 1, 0)]
    u = [(2, -1)] * 3
    return CombinatorialSpec(3, (2, 2, 2), support, phi, u)


def k3_network() -> Hypergraph:
    """The triangle network: three parties, one 2-party GHZ edge per pair."""
    return Hypergraph(3, [(0, 1), (1, 2), (0, 2)])
