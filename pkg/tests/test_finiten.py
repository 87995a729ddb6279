"""Finite-n protocol construction: Vandermonde moment systems, canonical
weights, the closed-form objective, radius search, pruning, and the dense
simulator cross-check."""

import itertools
import math

import numpy as np
import pytest

from degenex.degeneration import ghz_w_generic
from degenex.errors import (
    CoincidentPoints,
    DimensionTooLarge,
    NotReproducingTarget,
    RankDeficient,
    SingularMoment,
)
from degenex.finiten import (
    PointConfiguration,
    canonical_gamma,
    closed_form_objective,
    extrapolate_exponent,
    finite_n_exponent_table,
    lagrange_coefficients,
    optimize_radius,
    prune_points,
    roots_of_unity_config,
    simulate_protocol,
    vandermonde_objective,
)

LOG43 = math.log2(4.0 / 3.0)


def test_point_configuration_rejects_repeats_and_zero():
    with pytest.raises(CoincidentPoints):
        PointConfiguration([1.0 + 0j, 1.0 + 0j])
    with pytest.raises(CoincidentPoints):
        PointConfiguration([0j, 1.0 + 0j])
    cfg = PointConfiguration([1.0, 1j, -1.0])
    with pytest.raises(Exception):
        cfg.points[0] = 5.0  # frozen buffer


def test_roots_of_unity_config():
    cfg = roots_of_unity_config(7, 1.3)
    assert len(cfg.points) == 7
    assert np.allclose(np.abs(cfg.points), 1.3)
    assert np.allclose(np.sort(np.angle(cfg.points / cfg.points[0]) % (2 * np.pi)),
                       np.arange(7) * 2 * np.pi / 7, atol=1e-12)


def test_lagrange_coefficients_hand_cases():
    assert np.allclose(lagrange_coefficients(PointConfiguration([2.0 + 0j])), [1.0])
    c = lagrange_coefficients(PointConfiguration([1.0 + 0j, -1.0 + 0j]))
    assert np.allclose(c, [0.5, 0.5])
    # reproducing the constant function 1 at z = 0: coefficients always sum to 1
    rng = np.random.default_rng(11)
    pts = rng.normal(size=5) + 1j * rng.normal(size=5)
    assert abs(np.sum(lagrange_coefficients(PointConfiguration(pts))) - 1.0) < 1e-9


def test_lagrange_kills_positive_powers():
    # sum_i c_i z_i^h = 0 for h = 1..t-1 (pole-killing moment conditions)
    pts = roots_of_unity_config(5, 0.9)
    c = lagrange_coefficients(pts)
    for h in range(1, 5):
        assert abs(np.sum(c * pts.points**h)) < 1e-10


def test_vandermonde_matches_lagrange_on_square_systems(rng):
    pts = PointConfiguration(rng.normal(size=4) + 1j * rng.normal(size=4))
    G = np.full(4, 0.25)
    obj, c = vandermonde_objective(pts, G, ne=3)
    clag = lagrange_coefficients(pts)
    # with t = ne + 1 the moment system is square: both paths coincide
    want = float(np.sum(np.abs(clag) ** 2 / G))
    assert abs(obj - want) < 1e-9 * want
    assert np.allclose(c, clag, atol=1e-8)


def test_vandermonde_rejects_huge_direct_solve():
    pts = roots_of_unity_config(31, 1.0)
    with pytest.raises(SingularMoment):
        vandermonde_objective(pts, np.full(31, 1.0 / 31), ne=30)


def test_canonical_gamma_shapes_and_values(comb_deg):
    pts = roots_of_unity_config(7, 1.0)
    w = canonical_gamma(pts, 1, comb_deg)
    assert w.gamma_sq.shape == (7, 3)
    assert w.g_sq.shape == (7,)
    # g = t^{-k} * ||A(z)||^{-2n}; at radius 1 the product norm is sqrt(4/3)
    want = 7.0**-3 * (4.0 / 3.0) ** -1
    assert np.allclose(w.g_sq, want, rtol=1e-12)
    # per-party factors multiply back to g
    got = np.prod(w.gamma_sq, axis=1)
    assert np.allclose(got, want, rtol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_closed_form_identity_at_radius_one(comb_deg, n):
    t = 6 * n + 1
    pts = roots_of_unity_config(t, 1.0)
    res = closed_form_objective(pts, n, 6, comb_deg)
    bits = res.log2_value / n
    want = LOG43 - math.log2(t) / n
    assert abs(bits - want) < 1e-12


def test_closed_form_agrees_with_vandermonde(comb_deg):
    # the moment-system objective carries the t^k normalization the closed
    # form leaves out: obj = k log2 t + closed
    pts = roots_of_unity_config(7, 1.1)
    w = canonical_gamma(pts, 1, comb_deg)
    obj, _ = vandermonde_objective(pts, w.g_sq, ne=6)
    res = closed_form_objective(pts, 1, 6, comb_deg)
    assert abs(math.log2(obj) - 3 * math.log2(7) - res.log2_value) < 1e-9


def test_objective_invariant_under_global_rotation(comb_deg):
    pts = roots_of_unity_config(13, 1.2)
    rot = PointConfiguration(pts.points * np.exp(0.37j))
    a = closed_form_objective(pts, 2, 6, comb_deg)
    b = closed_form_objective(rot, 2, 6, comb_deg)
    assert abs(a.log2_value - b.log2_value) < 1e-10


def test_optimize_radius_prefers_unit_circle(comb_deg):
    radius, lp = optimize_radius(comb_deg, 3)
    assert abs(radius - 1.0) < 1e-3
    assert lp.n == 3
    # refinement may move points off the circle but must not do worse
    radius2, lp2 = optimize_radius(comb_deg, 3, refine=True)
    assert lp2.log2_value <= lp.log2_value + 1e-9


def test_extrapolate_exponent_removes_configuration_factor():
    for n in (1, 4, 25):
        bits = LOG43 - math.log2(6 * n + 1) / n
        assert abs(extrapolate_exponent(bits, n, 6) - LOG43) < 1e-12


def test_table_strategies(comb_deg):
    rows = finite_n_exponent_table(comb_deg, [1, 2, 4], strategy="fixed", radius=1.0)
    assert [r.n for r in rows] == [1, 2, 4]
    for r in rows:
        assert abs(r.bits_per_copy - (LOG43 - math.log2(6 * r.n + 1) / r.n)) < 1e-10
    opt = finite_n_exponent_table(comb_deg, [1, 2, 4], strategy="optimize")
    for a, b in zip(rows, opt):
        # smaller objective means larger success probability
        assert b.bits_per_copy <= a.bits_per_copy + 1e-9


def qform(W, u):
    S = np.einsum("ia,ib->ab", W, W.conj())
    return float(np.real(u.conj() @ np.linalg.solve(S, u)))


def test_prune_points_against_small_oracle():
    rng = np.random.default_rng(314159)
    for _ in range(50):
        d = int(rng.integers(1, 5))
        t = int(rng.integers(d, 9))
        W = rng.normal(size=(t, d)) + 1j * rng.normal(size=(t, d))
        u = rng.normal(size=d) + 1j * rng.normal(size=d)
        idx = prune_points(W, u)
        assert len(idx) == d
        val = qform(W[list(idx)], u)
        full = qform(W, u)
        assert val <= (t - d + 1) * full * (1 + 1e-9) + 1e-12
        # sanity floor: the greedy value can never beat the best subset
        best = min(
            qform(W[list(sub)], u)
            for sub in itertools.combinations(range(t), d)
            if np.linalg.matrix_rank(W[list(sub)]) == d
        )
        assert val >= best - 1e-9


def test_prune_points_rank_deficient():
    W = np.ones((4, 2), dtype=complex)  # all rows identical: span is 1-dim
    with pytest.raises(RankDeficient):
        prune_points(W, np.array([1.0, 1.0j]))


@pytest.mark.parametrize("radius", [1.0, 1.25])
def test_simulator_matches_closed_form(comb_deg, radius):
    deg = comb_deg
    for n in (1, 2):
        t = deg.error_degree * n + 1
        pts = roots_of_unity_config(t, radius)
        w = canonical_gamma(pts, n, deg)
        out, success = simulate_protocol(deg, n, pts, w)
        res = closed_form_objective(pts, n, deg.error_degree, deg)
        want = t**-3 * 2.0**-res.log2_value
        assert abs(success - want) < 1e-12 * want
        target = deg.phi.amplitudes
        acc = target
        for _ in range(n - 1):
            acc = np.kron(acc, target)
        fidelity = abs(np.vdot(out.amplitudes, acc))
        assert fidelity > 1.0 - 1e-10


def test_simulator_generic_fixture(generic3):
    pts = roots_of_unity_config(3, 1.25)
    w = canonical_gamma(pts, 1, generic3)
    out, success = simulate_protocol(generic3, 1, pts, w)
    res = closed_form_objective(pts, 1, 2, generic3)
    assert abs(success - 3.0**-3 * 2.0**-res.log2_value) < 1e-14
    assert abs(abs(np.vdot(out.amplitudes, generic3.phi.amplitudes)) - 1.0) < 1e-10


def test_simulator_rejects_wrong_weights(generic3):
    pts = roots_of_unity_config(3, 1.25)
    w = canonical_gamma(pts, 1, generic3)
    with pytest.raises(NotReproducingTarget):
        simulate_protocol(generic3, 2, pts, w)


def test_simulator_dimension_guard(generic3):
    # 27^5 basis states exceeds the dense cutoff
    pts = roots_of_unity_config(11, 1.1)
    w = canonical_gamma(pts, 5, generic3)
    with pytest.raises(DimensionTooLarge):
        simulate_protocol(generic3, 5, pts, w)
