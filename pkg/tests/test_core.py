"""Tests for the polyhedral DC core."""

import math

import numpy as np
import pytest

from conftest import abs_1d, sup_norm
from wdckit.core.affine import AffineMap, MaxAffine
from wdckit.core.arrangement import max_affine_cells, overlay_cells, strata
from wdckit.core.dc import DCFunction, combine, eval_dc
from wdckit.core.lattice import lattice_max, lattice_min, lattice_to_dc
from wdckit.core.polytope import VPolytope, min_norm_point
from wdckit.core.pwl import breakpoints_1d, end_slopes, one_sided_slope_1d, pwl_1d, truncate_1d
from wdckit.core.sampling import SamplingPlan
from wdckit.core.subdiff import active_sets, subdiff
from wdckit.exceptions import UnsupportedDimensionError, ValidationError


def _random_dc(rng: np.random.Generator, dim: int, k: int, m: int) -> DCFunction:
    g = MaxAffine(rng.normal(size=(k, dim)), rng.normal(size=k))
    h = MaxAffine(rng.normal(size=(m, dim)), rng.normal(size=m))
    return DCFunction(g, h)


class TestRepresentation:
    def test_affine_and_constant(self) -> None:
        f = DCFunction.affine([1.0, -2.0], 3.0)
        assert f(np.array([1.0, 1.0])) == pytest.approx(2.0)
        c = DCFunction.constant(5.0, 3)
        assert c(np.zeros(3)) == 5.0

    def test_batch_evaluation_matches_pointwise(self, rng: np.random.Generator) -> None:
        f = _random_dc(rng, 3, 4, 3)
        pts = rng.normal(size=(50, 3))
        batch = f(pts)
        single = np.array([eval_dc(f, p) for p in pts])
        np.testing.assert_allclose(batch, single, rtol=0, atol=1e-12)

    def test_dimension_mismatch_is_rejected(self) -> None:
        f = DCFunction.affine([1.0, 0.0])
        with pytest.raises(ValidationError):
            f(np.zeros(3))
        with pytest.raises(ValidationError):
            DCFunction(MaxAffine.constant(0.0, 2), MaxAffine.constant(0.0, 3))

    def test_lipschitz_bound(self) -> None:
        f = DCFunction(MaxAffine(np.array([[3.0, 4.0]]), [0.0]), MaxAffine(np.eye(2), np.zeros(2)))
        assert f.lipschitz() == pytest.approx(6.0)

    def test_max_affine_helpers(self) -> None:
        m = MaxAffine.from_pieces([AffineMap([1.0, 0.0], 0.0), AffineMap([0.0, 1.0], 0.0)])
        assert list(m.active(np.array([1.0, 1.0]))) == [0, 1]
        assert list(m.active(np.array([2.0, 1.0]))) == [0]
        shifted = m.precompose(np.eye(2), np.array([1.0, 0.0]))
        assert float(shifted.values(np.array([0.0, 0.0])).max()) == pytest.approx(1.0)

    def test_restrict_line(self) -> None:
        f = sup_norm()
        line = f.restrict_line([-1.0, 0.5], [1.0, 0.5])
        assert line(np.array([0.5])) == pytest.approx(0.5)
        assert line(np.array([0.0])) == pytest.approx(1.0)


class TestCombine:
    @pytest.mark.parametrize("mode", ["add", "max", "min"])
    def test_against_pointwise_oracle(self, rng: np.random.Generator, mode: str) -> None:
        fs = [_random_dc(rng, 2, 3, 2) for _ in range(3)]
        h = combine(mode, *fs)
        pts = rng.uniform(-5, 5, size=(10_000, 2))
        vals = np.stack([f(pts) for f in fs])
        oracle = {"add": vals.sum(axis=0), "max": vals.max(axis=0), "min": vals.min(axis=0)}[mode]
        scale = 1.0 + np.abs(oracle)
        assert np.max(np.abs(h(pts) - oracle) / scale) <= 1e-12

    def test_scale_negative_swaps_parts(self, rng: np.random.Generator) -> None:
        f = _random_dc(rng, 2, 3, 2)
        neg = combine("scale", f, -2.0)
        pts = rng.normal(size=(100, 2))
        np.testing.assert_allclose(neg(pts), -2.0 * f(pts), atol=1e-12)
        assert combine("scale", f, 0.0)(pts[0]) == 0.0

    def test_affine_precompose(self) -> None:
        f = sup_norm()
        M = np.array([[2.0, 0.0], [0.0, 1.0]])
        g = combine("affine_precompose", f, M, np.array([0.0, 1.0]))
        assert g(np.array([1.0, 0.0])) == pytest.approx(2.0)
        assert g(np.array([0.0, -1.0])) == pytest.approx(0.0)

    def test_errors(self) -> None:
        with pytest.raises(ValidationError):
            combine("mean", sup_norm())
        with pytest.raises(ValidationError):
            combine("add")
        with pytest.raises(ValidationError):
            combine("add", sup_norm(), abs_1d())

    def test_lattice_to_dc(self, rng: np.random.Generator) -> None:
        a = [AffineMap(rng.normal(size=2), float(rng.normal())) for _ in range(5)]
        expr = lattice_max(lattice_min(a[0], a[1], a[2]), lattice_min(a[3], a[4]))
        f = lattice_to_dc(expr)
        pts = rng.uniform(-3, 3, size=(10_000, 2))
        oracle = np.asarray(expr(pts))
        assert np.max(np.abs(f(pts) - oracle) / (1.0 + np.abs(oracle))) <= 1e-12

    def test_lattice_node_needs_two_children(self) -> None:
        with pytest.raises(ValidationError):
            lattice_max(AffineMap([1.0], 0.0))


class TestPolytope:
    def test_min_norm_of_segment(self) -> None:
        p = min_norm_point(np.array([[1.0, 1.0], [1.0, -1.0]]))
        np.testing.assert_allclose(p, [1.0, 0.0], atol=1e-10)

    def test_min_norm_contains_origin(self) -> None:
        square = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        assert np.linalg.norm(min_norm_point(square)) <= 1e-9

    def test_wolfe_certificate(self, rng: np.random.Generator) -> None:
        V = rng.normal(size=(12, 3)) + np.array([2.0, 0.0, 0.0])
        p = min_norm_point(V)
        assert np.all(V @ p >= p @ p - 1e-8)

    def test_pruned_and_diameter(self) -> None:
        P = VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [0.0, 1.0], [0.2, 0.2]]))
        assert len(P.pruned()) == 3
        assert P.diameter() == pytest.approx(math.sqrt(2.0))

    def test_distance_and_minus(self) -> None:
        P = VPolytope(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert P.distance_to([0.0, 0.0]) == pytest.approx(1 / math.sqrt(2.0))
        D = P.minus(VPolytope.point([1.0, 0.0]))
        assert D.min_norm() == pytest.approx(0.0, abs=1e-12)

    def test_empty_is_rejected(self) -> None:
        with pytest.raises(ValidationError):
            min_norm_point(np.zeros((0, 2)))


class TestSubdiff:
    def test_abs_at_kink(self) -> None:
        res = subdiff(abs_1d(), np.array([0.0]))
        assert res.exactness == "clarke-exact"
        assert sorted(res.hull.vertices[:, 0]) == [-1.0, 1.0]

    def test_sup_norm_at_origin(self) -> None:
        res = subdiff(sup_norm(), np.zeros(2))
        assert len(res.hull) == 4
        assert res.hull.min_norm() == pytest.approx(0.0, abs=1e-12)

    def test_sup_norm_on_diagonal(self) -> None:
        res = subdiff(sup_norm(), np.array([1.0, 1.0]))
        assert res.hull.min_norm() == pytest.approx(1 / math.sqrt(2.0), abs=1e-12)

    def test_clarke_inside_outer(self, rng: np.random.Generator) -> None:
        f = combine("min", sup_norm(), DCFunction.affine([1.0, 2.0], 0.5))
        for x in rng.uniform(-2, 2, size=(200, 2)):
            clarke = subdiff(f, x, "clarke").hull
            outer = subdiff(f, x, "outer").hull
            assert clarke.excess_over(outer) <= 1e-9

    def test_clarke_of_smooth_difference_is_a_point(self) -> None:
        # max(x, 0) - max(x, 0) is identically zero
        g = MaxAffine(np.array([[1.0], [0.0]]), np.zeros(2))
        f = DCFunction(g, g)
        res = subdiff(f, np.array([0.0]))
        np.testing.assert_allclose(res.hull.vertices, [[0.0]], atol=1e-12)
        assert len(subdiff(f, np.array([0.0]), "outer").hull) == 2

    def test_active_sets(self) -> None:
        I, J = active_sets(sup_norm(), np.array([1.0, 1.0]))
        assert sorted(I.tolist()) == [0, 1]
        assert J.tolist() == [0]

    def test_modes_and_dimension(self) -> None:
        with pytest.raises(ValidationError):
            subdiff(sup_norm(), np.zeros(2), "limiting")
        f4 = DCFunction.affine(np.ones(4))
        with pytest.raises(UnsupportedDimensionError):
            subdiff(f4, np.zeros(4), "clarke")
        assert subdiff(f4, np.zeros(4), "outer").exactness == "outer-estimate"


class TestOneDimensional:
    def test_pwl_roundtrip_values(self) -> None:
        f = pwl_1d([0.0, 1.0, 2.0], [0.0, 1.0, -1.0], 0.0, 0.0)
        xs = np.array([[-1.0], [0.0], [0.5], [1.0], [1.5], [2.0], [3.0]])
        np.testing.assert_allclose(f(xs), [0.0, 0.0, 0.5, 1.0, 0.0, -1.0, -1.0], atol=1e-12)
        np.testing.assert_allclose(breakpoints_1d(f), [0.0, 1.0, 2.0], atol=1e-12)
        assert end_slopes(f) == pytest.approx((0.0, 0.0))

    def test_one_sided_slopes(self) -> None:
        f = abs_1d()
        assert one_sided_slope_1d(f, 0.0, "right") == pytest.approx(1.0)
        assert one_sided_slope_1d(f, 0.0, "left") == pytest.approx(-1.0)

    def test_truncate(self) -> None:
        f = truncate_1d(abs_1d(), -1.0, 2.0, slope_hi=0.0)
        assert f(np.array([5.0])) == pytest.approx(2.0)
        assert f(np.array([-3.0])) == pytest.approx(3.0)

    def test_pwl_rejects_unsorted_knots(self) -> None:
        with pytest.raises(ValidationError):
            pwl_1d([1.0, 0.0], [0.0, 0.0], 0.0, 0.0)


class TestArrangement:
    def test_sup_norm_cells(self) -> None:
        cells = max_affine_cells(sup_norm().g, np.array([-2.0, -2.0]), np.array([2.0, 2.0]))
        assert len(cells) == 4

    def test_strata_of_sup_norm(self) -> None:
        lo, hi = np.array([-2.0, -2.0]), np.array([2.0, 2.0])
        cells = overlay_cells(sup_norm(), lo, hi)
        found = strata(cells, lo, hi)
        inner_vertices = [s for s in found if s.kind == "vertex" and not s.on_boundary]
        assert len(inner_vertices) == 1
        np.testing.assert_allclose(inner_vertices[0].point, [0.0, 0.0], atol=1e-12)
        seams = [s for s in found if s.kind == "edge" and not s.on_boundary]
        assert len(seams) == 4
        for s in seams:
            assert s.hull(cells).diameter() == pytest.approx(math.sqrt(2.0))


class TestSampling:
    def test_plan_is_deterministic(self) -> None:
        a = SamplingPlan([0.0, 0.0], [1.0, 2.0], 64, seed=3).points()
        b = SamplingPlan([0.0, 0.0], [1.0, 2.0], 64, seed=3).points()
        np.testing.assert_array_equal(a, b)
        assert a.shape == (64, 2)
        assert np.all((a >= 0) & (a <= [1.0, 2.0]))

    def test_seed_shifts_sequence(self) -> None:
        a = SamplingPlan([0.0], [1.0], 8, seed=0).points()
        b = SamplingPlan([0.0], [1.0], 8, seed=1).points()
        np.testing.assert_array_equal(a[1:], b[:-1])

    def test_bad_box(self) -> None:
        with pytest.raises(ValidationError):
            SamplingPlan([1.0], [0.0])
