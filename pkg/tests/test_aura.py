"""Tests for aura constructors, regularity margins and weak touching."""

import math

import numpy as np
import pytest

from conftest import abs_1d
from wdckit.aura import (
    antipodal_direction,
    aura_ball_cap,
    aura_distance_polytope,
    aura_hypograph,
    aura_sum,
    check_weak_regularity,
    min_aura,
    rotate_about,
    scaled_report,
    shell_strata,
    weak_touch,
)
from wdckit.core.affine import MaxAffine
from wdckit.core.dc import DCFunction, combine
from wdckit.core.pwl import pwl_1d
from wdckit.core.polytope import VPolytope
from wdckit.core.sampling import SamplingPlan
from wdckit.core.subdiff import subdiff
from wdckit.exceptions import (
    UnboundedSublevelError,
    UnsupportedDimensionError,
    ValidationError,
    WeakTouchError,
)
from wdckit.topology.shapes import square_aura


def _capped_wedge() -> DCFunction:
    slopes = np.array([[-3.0, 1.0], [3.0, 1.0], [0.0, 0.0]])
    wedge = DCFunction.convex(MaxAffine(slopes, np.zeros(3)))
    eye = np.eye(2)
    cap = DCFunction.convex(MaxAffine(10.0 * np.vstack([eye, -eye]), np.full(4, -100.0)))
    return combine("max", wedge, cap)


class TestConstructors:
    def test_distance_to_square(self) -> None:
        f = square_aura()
        assert f(np.array([0.5, -0.5])) == 0.0
        assert f(np.array([3.0, 0.5])) == pytest.approx(2.0)
        assert f(np.array([-2.0, 2.0])) == pytest.approx(1.0)

    def test_l1_distance(self) -> None:
        P = VPolytope(np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]))
        f = aura_distance_polytope(P, "l1")
        assert f(np.array([2.0, 2.0])) == pytest.approx(2.0)
        assert f(np.array([0.0, 0.0])) == 0.0

    def test_distance_to_a_segment_has_no_zero_piece(self) -> None:
        P = VPolytope(np.array([[0.0, 0.0], [1.0, 0.0]]))
        f = aura_distance_polytope(P)
        assert f(np.array([0.5, 0.0])) == pytest.approx(0.0, abs=1e-12)
        assert f(np.array([0.5, 0.25])) == pytest.approx(0.25)

    def test_unsupported_inputs(self) -> None:
        with pytest.raises(UnsupportedDimensionError):
            aura_distance_polytope(VPolytope(np.eye(4)))
        with pytest.raises(ValidationError):
            aura_distance_polytope(VPolytope(np.eye(2)), "l2")

    def test_ball_cap_bounds_a_half_plane(self) -> None:
        f = aura_ball_cap(DCFunction.affine([1.0, 0.0]), (0.0, 0.0), 5.0)
        assert f(np.array([-3.0, 0.0])) == 0.0
        assert f(np.array([-8.0, 0.0])) == pytest.approx(3.0)
        report = check_weak_regularity(f)
        assert report.margin > 0

    def test_hypograph(self) -> None:
        F = aura_hypograph(abs_1d())
        assert F(np.array([0.0, 1.0])) == pytest.approx(1.0)
        assert F(np.array([2.0, 1.0])) == 0.0
        with pytest.raises(ValidationError):
            aura_hypograph(square_aura())

    def test_hypograph_gradients_rise_vertically(self, rng: np.random.Generator) -> None:
        phi = pwl_1d([-1.0, 0.0, 1.0], [0.5, -0.5, 1.0], -1.0, 2.0)
        F = aura_hypograph(phi)
        xs = rng.uniform(-2.0, 2.0, 1000)
        xs[::4] = rng.choice([-1.0, 0.0, 1.0], len(xs[::4]))
        ys = np.asarray(phi(xs[:, None]), dtype=float) + rng.uniform(0.01, 2.0, 1000)
        for p in np.column_stack([xs, ys]):
            assert F(p) > 0
            hull = subdiff(F, p, "clarke").hull
            np.testing.assert_allclose(hull.vertices[:, 1], 1.0, atol=1e-12)

    def test_rotate_about(self) -> None:
        f = DCFunction.affine([1.0, 0.0])
        g = rotate_about(f, math.pi / 2, (1.0, 1.0))
        # frame x-axis points along world +y from the base
        assert g(np.array([1.0, 3.0])) == pytest.approx(2.0)
        assert g(np.array([3.0, 1.0])) == pytest.approx(0.0, abs=1e-12)

    def test_min_aura_of_far_squares(self, two_squares: DCFunction) -> None:
        assert two_squares(np.array([3.0, 0.0])) == 0.0
        assert two_squares(np.array([-3.0, 0.5])) == 0.0
        assert two_squares(np.array([0.0, 0.0])) == pytest.approx(2.0)
        f = min_aura(square_aura(), square_aura((5.0, 0.0)))
        assert f(np.array([2.5, 0.0])) == pytest.approx(1.5)


class TestRegularity:
    def test_square_margin(self, square: DCFunction) -> None:
        report = check_weak_regularity(square, 0.0, 0.1)
        assert report.mode == "exact-pwa-2d"
        assert report.margin == pytest.approx(1 / math.sqrt(2.0), abs=1e-12)
        assert report.regular
        assert report.witness is not None

    def test_capped_wedge_margin(self) -> None:
        report = check_weak_regularity(_capped_wedge(), 0.0, 0.1)
        assert report.margin == pytest.approx(1.0, abs=1e-12)

    def test_half_plane_is_unbounded(self) -> None:
        with pytest.raises(UnboundedSublevelError):
            check_weak_regularity(DCFunction.affine([1.0, 0.0]))

    def test_empty_shell_is_reported(self) -> None:
        lifted = combine("add", square_aura(), DCFunction.constant(1.0, 2))
        report = check_weak_regularity(lifted, 0.0, 0.5)
        assert report.mode == "exact-pwa-2d"
        assert report.note == "empty shell"
        assert report.samples == 0
        assert math.isinf(report.margin)
        assert report.regular

    def test_shell_reaching_the_minimum(self) -> None:
        lifted = combine("add", square_aura(), DCFunction.constant(1.0, 2))
        report = check_weak_regularity(lifted, 0.0, 1.5)
        assert report.samples > 0
        assert report.margin == pytest.approx(0.0, abs=1e-12)
        assert not report.regular

    def test_bad_arguments(self, square: DCFunction) -> None:
        with pytest.raises(ValidationError):
            check_weak_regularity(square, eps_probe=0.0)
        with pytest.raises(ValidationError):
            check_weak_regularity(square, mode="symbolic")

    def test_windowed_empty_shell(self, square: DCFunction) -> None:
        report = check_weak_regularity(square, window=((-0.5, -0.5), (0.5, 0.5)))
        assert math.isinf(report.margin)
        assert report.note == "empty shell"

    def test_scaled_report(self, square: DCFunction) -> None:
        report = check_weak_regularity(square, 0.0, 0.1)
        scaled = scaled_report(report, 3.0)
        assert scaled.margin == pytest.approx(3.0 * report.margin)
        assert scaled.shell_width == pytest.approx(0.3)
        direct = check_weak_regularity(combine("scale", square, 3.0), 0.0, 0.3)
        assert direct.margin == pytest.approx(scaled.margin, abs=1e-12)
        with pytest.raises(ValidationError):
            scaled_report(report, -1.0)

    def test_shell_strata_norms(self, square: DCFunction) -> None:
        hits = shell_strata(square, 0.0, 0.1, (-3.0, -3.0), (3.0, 3.0))
        assert hits
        assert min(n for _, n in hits) == pytest.approx(1 / math.sqrt(2.0), abs=1e-12)
        assert all(not s.on_boundary for s, _ in hits)

    def test_sampled_cube(self) -> None:
        cube = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], float)
        f = aura_distance_polytope(VPolytope(cube))
        plan = SamplingPlan([-1.5] * 3, [1.5] * 3, 2048)
        report = check_weak_regularity(f, 0.0, 0.2, plan=plan)
        assert report.mode == "sampled"
        assert report.samples > 0
        assert report.margin >= 1 / math.sqrt(3.0) - 1e-9


class TestWeakTouch:
    def test_antipodal_direction(self) -> None:
        right, left = VPolytope(np.array([[2.0, 0.0]])), VPolytope(np.array([[-1.0, 0.0]]))
        v = antipodal_direction(right, left)
        assert v is not None
        np.testing.assert_allclose(v, [1.0, 0.0], atol=1e-9)
        up = VPolytope(np.eye(2)[1:])
        assert antipodal_direction(VPolytope(np.array([[1.0, 0.0]])), up) is None

    def test_zero_vertices_are_ignored(self) -> None:
        P = VPolytope(np.array([[0.0, 0.0], [1.0, 0.0]]))
        Q = VPolytope(np.array([[0.0, 0.0], [0.0, 1.0]]))
        assert antipodal_direction(P, Q) is None

    def test_touching_squares(self) -> None:
        f = square_aura()
        g = square_aura((2.0, 0.0))
        report = weak_touch(f, g)
        assert report.touched
        assert report.exact
        assert report.witness_point is not None
        assert report.witness_point[0] == pytest.approx(1.0)
        assert report.witness_normal is not None
        assert abs(report.witness_normal[0]) == pytest.approx(1.0)
        with pytest.raises(WeakTouchError):
            aura_sum(f, g)

    def test_far_squares_sum(self) -> None:
        f = square_aura((-3.0, 0.0))
        g = square_aura((3.0, 0.0))
        total, report = aura_sum(f, g)
        assert not report.touched
        x = np.array([0.0, 0.0])
        assert total(x) == pytest.approx(f(x) + g(x))

    def test_disjoint_squares_sum_to_the_union(self, rng: np.random.Generator) -> None:
        centers = ((-2.5, 0.0), (2.5, 0.5))
        total, _ = aura_sum(square_aura(centers[0]), square_aura(centers[1]))
        pts = rng.uniform([-5.0, -2.5], [5.0, 2.5], (10_000, 2))
        inside = np.zeros(len(pts), dtype=bool)
        for c in centers:
            inside |= np.abs(pts - np.array(c)).max(axis=1) <= 1.0
        vals = np.asarray(total(pts), dtype=float)
        assert inside.any()
        np.testing.assert_array_equal(vals <= 1e-12, inside)

    def test_dimension_mismatch(self) -> None:
        with pytest.raises(ValidationError):
            weak_touch(square_aura(), abs_1d())
