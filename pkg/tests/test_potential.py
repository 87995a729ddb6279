"""Weighted Fekete points, the sup-inf objective, measure discretization,
and potential/harmonicity checks."""

import math

import numpy as np
import pytest

from degenex.errors import AtomSingularity, GridTooSmall, TooCloseToSupport
from degenex.exponent import (
    Atom,
    PlanarMeasure,
    atom_measure,
    counting_measure,
    uniform_circle,
    uniform_disk,
)
from degenex.potential import (
    CompactDomain,
    WeightPair,
    discretize_measure,
    harmonicity_check,
    logarithmic_potential,
    supinf_objective,
    weighted_fekete,
)


def test_circle_fekete_recovers_roots_of_unity():
    res = weighted_fekete(CompactDomain.circle(1.0), WeightPair.trivial(), 7)
    assert res.n == 7
    assert len(res.points.points) == 8
    assert np.allclose(np.abs(res.points.points), 1.0, atol=1e-12)
    # classical identity: the min product over 8 equally spaced points is 8
    assert res.delta_n == pytest.approx(math.log2(8) / 7, abs=1e-9)
    angles = np.sort(np.angle(res.points.points))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
    assert np.allclose(gaps, 2 * np.pi / 8, atol=1e-9)


@pytest.mark.parametrize("n", [3, 15, 31])
def test_circle_fekete_delta_value(n):
    # n+1 must divide the 256-angle grid for the ideal configuration to exist
    res = weighted_fekete(CompactDomain.circle(1.0), WeightPair.trivial(), n)
    assert res.delta_n == pytest.approx(math.log2(n + 1) / n, abs=1e-9)


def test_two_point_domain_enumerates():
    a, b = 0.5 + 0j, 2.0 + 1.0j
    dom = CompactDomain.explicit([a, b])
    res = weighted_fekete(dom, WeightPair.trivial(), 1)
    assert res.delta_n == pytest.approx(math.log2(abs(a - b)), abs=1e-12)

    # weighted variant, checked against the exhaustive formula
    w1 = lambda z: 1.0 / (1.0 + np.abs(z))
    w2 = lambda z: np.abs(z) ** -0.5
    res_w = weighted_fekete(dom, WeightPair(w1=w1, w2=w2, label="test"), 1)
    prod_i = abs(a - b) * w1(a) * w2(b)
    prod_j = abs(a - b) * w1(b) * w2(a)
    assert res_w.delta_n == pytest.approx(math.log2(min(prod_i, prod_j)), abs=1e-12)


def test_explicit_domain_needs_n_plus_one_points():
    dom = CompactDomain.explicit([1.0, 2.0])
    with pytest.raises(GridTooSmall):
        weighted_fekete(dom, WeightPair.trivial(), 2)


def test_generated_grid_size_floor():
    dom = CompactDomain.circle(1.0, n_angles=8)
    with pytest.raises(GridTooSmall):
        weighted_fekete(dom, WeightPair.trivial(), 4)  # needs 4*(4+1) = 20


def test_disk_delta_decreases_toward_zero():
    dom = CompactDomain.disk(1.0)
    d8 = weighted_fekete(dom, WeightPair.trivial(), 8).delta_n
    d24 = weighted_fekete(dom, WeightPair.trivial(), 24).delta_n
    assert d24 < d8
    assert 0.0 < d24 < 0.35  # log2 capacity of the unit disk is 0


def test_fekete_rotation_invariance():
    pts = [1.0 + 0j, 0.5 + 0.2j, -0.3 + 0.9j, -1.1 - 0.4j, 0.1 - 1.3j]
    rot = [p * np.exp(0.83j) for p in pts]
    a = weighted_fekete(CompactDomain.explicit(pts), WeightPair.trivial(), 2).delta_n
    b = weighted_fekete(CompactDomain.explicit(rot), WeightPair.trivial(), 2).delta_n
    assert a == pytest.approx(b, abs=1e-10)


def test_supinf_unit_circle_trivial():
    assert supinf_objective(uniform_circle(1.0), WeightPair.trivial()) == pytest.approx(0.0, abs=1e-12)


def test_supinf_radial_weight_cancels():
    wp = WeightPair(w1=lambda z: np.ones_like(np.abs(z)),
                    w2=lambda z: 1.0 / np.abs(z), label="radial")
    for rho in (0.5, 1.7, 3.0):
        assert supinf_objective(uniform_circle(rho), wp) == pytest.approx(0.0, abs=1e-10)


def test_supinf_fixture_weights_on_unit_circle(comb_deg):
    # w1 = ||A||^{-1/e} on the unit circle where ||A|| = sqrt(4/3):
    # inf is -log2(4/3)/12
    wp = WeightPair.from_degeneration(comb_deg)
    val = supinf_objective(uniform_circle(1.0), wp)
    assert val == pytest.approx(-math.log2(4.0 / 3.0) / 12.0, abs=1e-9)


def test_sandwich_annulus_trivial_weights():
    dom = CompactDomain.annulus(0.5, 2.0)
    res = weighted_fekete(dom, WeightPair.trivial(), 64)
    eq = supinf_objective(uniform_circle(2.0), WeightPair.trivial())
    assert eq == pytest.approx(1.0, abs=1e-12)  # log2 capacity of the annulus
    assert res.delta_n <= eq + 0.15
    assert abs(res.delta_n - eq) < 0.1
    # equilibrium sits on the outer circle
    assert np.allclose(np.abs(res.points.points), 2.0, atol=1e-9)


def test_sandwich_fixture_weights(comb_deg):
    dom = CompactDomain.annulus(0.5, 2.0)
    wp = WeightPair.from_degeneration(comb_deg)
    res = weighted_fekete(dom, wp, 64)
    best = max(supinf_objective(uniform_circle(R), wp)
               for R in np.linspace(0.5, 2.0, 16))
    assert res.delta_n <= best + 0.15
    assert abs(res.delta_n - best) < 0.1


def test_discretize_one_cell_square():
    # atom at a cell center, so all mass lands in that one cell
    pts = discretize_measure(atom_measure(1.0 + 1.0j), 1.0, 16)
    assert len(pts.points) == 16
    # 4x4 sub-lattice inside the cell: 4 distinct values per axis, pitch 1/4
    for axis in (pts.points.real, pts.points.imag):
        assert np.all(np.abs(axis - 1.0) < 0.5)
        vals = np.unique(np.round(axis, 12))
        assert len(vals) == 4
        assert np.allclose(np.diff(vals), 0.25)


def test_discretize_count_formula():
    # two cells with masses 0.3 / 0.7: counts are ceil(sqrt(m N))^2 each
    sig = PlanarMeasure(((Atom(0.5 + 0.5j), 0.3), (Atom(3.5 + 0.5j), 0.7)))
    for N in (10, 16, 50, 137):
        pts = discretize_measure(sig, 1.0, N)
        want = math.ceil(math.sqrt(0.3 * N)) ** 2 + math.ceil(math.sqrt(0.7 * N)) ** 2
        assert len(pts.points) == want


def test_discretize_disk_first_moment():
    pts = discretize_measure(uniform_disk(1.0), 0.25, 400)
    assert len(pts.points) >= 400
    assert abs(np.mean(pts.points)) < 0.05


def test_discretize_counting_measure_supinf_converges():
    target = supinf_objective(uniform_circle(1.0), WeightPair.trivial())
    errs = []
    for N in (100, 1600):
        pts = discretize_measure(uniform_circle(1.0), 0.25, N)
        got = supinf_objective(counting_measure(pts.points), WeightPair.trivial())
        errs.append(abs(got - target))
    assert errs[-1] < errs[0]
    assert errs[-1] < 0.05


def test_potential_inside_unit_circle_vanishes():
    sig = uniform_circle(1.0)
    for z in (0.0, 0.3 + 0.4j, 0.99j):
        assert logarithmic_potential(sig, z) == pytest.approx(0.0, abs=1e-12)


def test_potential_outside_is_minus_log():
    sig = uniform_circle(1.0)
    assert logarithmic_potential(sig, math.e) == pytest.approx(-math.log2(math.e), abs=1e-12)
    assert logarithmic_potential(sig, 2.0j) == pytest.approx(-1.0, abs=1e-12)


def test_potential_atom_mixture_superposition():
    mix = PlanarMeasure(((Atom(1.0 + 0j), 0.25), (Atom(-1.0 + 0j), 0.75)))
    z = 2.0 + 1.0j
    want = -(0.25 * math.log2(abs(z - 1)) + 0.75 * math.log2(abs(z + 1)))
    assert logarithmic_potential(mix, z) == pytest.approx(want, abs=1e-12)
    with pytest.raises(AtomSingularity):
        logarithmic_potential(mix, 1.0 + 0j)


def test_potential_mixture_is_weighted_sum():
    mix = PlanarMeasure(((uniform_circle(0.7).components[0][0], 0.6),
                         (Atom(-2.0 + 0j), 0.4)))
    z = 3.0 - 2.0j
    want = (0.6 * logarithmic_potential(uniform_circle(0.7), z)
            + 0.4 * logarithmic_potential(atom_measure(-2.0 + 0j), z))
    assert logarithmic_potential(mix, z) == pytest.approx(want, abs=1e-12)


def test_harmonicity_off_support():
    assert abs(harmonicity_check(uniform_circle(1.0), 2.0 + 0j, 1e-3)) < 1e-4
    assert abs(harmonicity_check(atom_measure(0j), 1.0 + 0j, 1e-3)) < 1e-4
    # inside the circle the potential is constant, hence harmonic too
    assert abs(harmonicity_check(uniform_circle(1.0), 0.2 + 0.1j, 1e-3)) < 1e-4


def test_harmonicity_refuses_near_support():
    ann = PlanarMeasure(((uniform_circle(0.5).components[0][0], 0.5),
                         (uniform_circle(2.0).components[0][0], 0.5)))
    with pytest.raises(TooCloseToSupport):
        harmonicity_check(ann, 1.0 + 0j, 0.2)  # dist 0.5 < 10 * 0.2
    with pytest.raises(TooCloseToSupport):
        harmonicity_check(uniform_circle(1.0), 1.05 + 0j, 0.01)
