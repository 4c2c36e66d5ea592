"""Tests for singular-set and zero-set segment covers."""

from typing import List, Tuple

import numpy as np
import pytest

from conftest import sup_norm
from wdckit.core.affine import MaxAffine
from wdckit.core.dc import DCFunction, combine
from wdckit.exceptions import (
    UnboundedSublevelError,
    UnsupportedDimensionError,
    ValidationError,
)
from wdckit.singular import (
    boundary_cover_2d,
    merge_collinear,
    singular_set_pwa_2d,
    zero_set_large_subdiff_2d,
)
from wdckit.topology import point_aura

BOX = ((-2.0, -2.0), (2.0, 2.0))


def _endpoints(seg: Tuple[np.ndarray, np.ndarray]) -> List[Tuple[float, ...]]:
    p, q = seg
    return sorted([tuple(np.round(p, 12)), tuple(np.round(q, 12))])


def _tent() -> DCFunction:
    """max(y - |x|, 0)."""
    absx = DCFunction.convex(MaxAffine(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.zeros(2)))
    gap = combine("add", DCFunction.affine([0.0, 1.0]), combine("scale", absx, -1.0))
    return combine("max", gap, DCFunction.constant(0.0, 2))


class TestSingularSet:
    def test_sup_norm_diagonals_and_origin(self) -> None:
        cover = singular_set_pwa_2d(sup_norm().g, 1.0, BOX)
        proper = sorted(_endpoints(s) for s in cover.proper())
        assert proper == [
            [(-2.0, -2.0), (2.0, 2.0)],
            [(-2.0, 2.0), (2.0, -2.0)],
        ]
        points = cover.points()
        assert len(points) == 1
        np.testing.assert_allclose(points[0], [0.0, 0.0], atol=1e-12)
        assert cover.clipped
        assert len(cover) == 3

    def test_provenance_pools_merged_seams(self) -> None:
        cover = singular_set_pwa_2d(sup_norm().g, 1.0, BOX)
        for seg, pairs in zip(cover.segments, cover.provenance):
            if np.array_equal(seg[0], seg[1]):
                assert len(pairs) == 6
            else:
                assert len(pairs) == 2

    def test_large_eps_is_empty(self) -> None:
        assert len(singular_set_pwa_2d(sup_norm().g, 2.0, BOX)) == 0

    def test_smooth_function_has_no_seams(self) -> None:
        g = MaxAffine(np.array([[1.0, 2.0]]), [0.0])
        assert len(singular_set_pwa_2d(g, 0.1, BOX)) == 0

    def test_arguments(self) -> None:
        with pytest.raises(ValidationError):
            singular_set_pwa_2d(sup_norm().g, 0.0, BOX)
        with pytest.raises(UnsupportedDimensionError):
            singular_set_pwa_2d(MaxAffine(np.eye(3), np.zeros(3)), 1.0, BOX)


class TestZeroSet:
    def test_tent_gives_two_rays(self) -> None:
        cover = zero_set_large_subdiff_2d(_tent(), 1.0, ((-1.0, -1.0), (1.0, 1.0)))
        assert len(cover) == 2
        assert not cover.points()
        assert sorted(_endpoints(s) for s in cover.segments) == [
            [(-1.0, 1.0), (0.0, 0.0)],
            [(0.0, 0.0), (1.0, 1.0)],
        ]

    def test_tent_large_eps(self) -> None:
        assert len(zero_set_large_subdiff_2d(_tent(), 2.0, ((-1.0, -1.0), (1.0, 1.0)))) == 0

    def test_dimension(self) -> None:
        with pytest.raises(UnsupportedDimensionError):
            zero_set_large_subdiff_2d(DCFunction.affine([1.0]), 1.0, BOX)


class TestBoundaryCover:
    def test_square(self, square: DCFunction) -> None:
        cover = boundary_cover_2d(square)
        assert len(cover) == 4
        np.testing.assert_allclose(cover.lengths(), 2.0, atol=1e-12)
        assert not cover.clipped
        corners = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [1.0, 0.3]]
        assert np.all(cover.distance(corners) <= 1e-12)
        assert cover.distance([[0.0, 0.0]])[0] == pytest.approx(1.0)

    def test_point_aura(self) -> None:
        cover = boundary_cover_2d(point_aura())
        assert len(cover) == 1
        np.testing.assert_allclose(cover.points()[0], [0.0, 0.0], atol=1e-12)

    def test_annulus_has_two_rims(self, annulus: DCFunction) -> None:
        cover = boundary_cover_2d(annulus)
        assert len(cover) == 8
        assert cover.contains([1.5, 0.5])
        assert cover.contains([0.5, 0.5])

    def test_not_an_aura(self) -> None:
        flat = DCFunction.convex(MaxAffine(np.zeros((1, 2)), [0.0]))
        with pytest.raises(UnboundedSublevelError):
            boundary_cover_2d(flat)


def test_merge_collinear_keeps_gaps() -> None:
    segs = [
        (np.array([0.0, 0.0]), np.array([1.0, 0.0])),
        (np.array([2.0, 0.0]), np.array([1.0, 0.0])),
        (np.array([3.0, 0.0]), np.array([4.0, 0.0])),
    ]
    prov = [((0, 1),), ((1, 2),), ((2, 3),)]
    merged, pairs = merge_collinear(segs, prov, 1e-9)
    assert len(merged) == 2
    assert pairs[0] == ((0, 1), (1, 2))
    assert sorted(_endpoints(merged[0])) == [(0.0, 0.0), (2.0, 0.0)]
