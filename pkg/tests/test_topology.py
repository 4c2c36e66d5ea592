"""Tests for level loops, the degree method and the cubical Euler count."""

from typing import Dict, Tuple

import numpy as np
import pytest

from wdckit.aura import aura_distance_polytope
from wdckit.core.dc import DCFunction
from wdckit.core.polytope import VPolytope
from wdckit.exceptions import UnboundedSublevelError, ValidationError
from wdckit.topology import (
    euler_cubical,
    euler_degree_2d,
    level_loops_2d,
    loop_winding,
    point_aura,
    square_aura,
    sublevel_box,
)

Shapes = Dict[str, Tuple[DCFunction, int]]


def _signed_area(loop: np.ndarray) -> float:
    x, y = loop[:, 0], loop[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@pytest.mark.parametrize("grid", [0.05, 0.1])
def test_degree_matches_cubical(shapes: Shapes, grid: float) -> None:
    for name, (f, chi) in shapes.items():
        degree = euler_degree_2d(f, 0.25, grid)
        cubical = euler_cubical(f, 0.25, grid)
        assert degree.chi == chi, name
        assert cubical.chi == chi, name
        assert all(r < 0.1 for r in degree.residuals)


@pytest.mark.parametrize("grid", [0.02, 0.05])
def test_point_germ(grid: float) -> None:
    f = point_aura()
    assert euler_degree_2d(f, 0.25, grid).chi == 1
    assert euler_cubical(f, 0.25, grid).chi == 1


@pytest.mark.parametrize("level", [0.1, 0.2, 0.3])
def test_level_invariance(shapes: Shapes, level: float) -> None:
    for name, (f, chi) in shapes.items():
        assert euler_degree_2d(f, level, 0.05).chi == chi, name


def test_annulus_windings(annulus: DCFunction) -> None:
    res = euler_degree_2d(annulus, 0.25, 0.05)
    assert sorted(res.per_loop) == [-1, 1]
    assert res.method == "degree"


def test_level_loops_of_square(square: DCFunction) -> None:
    loops = level_loops_2d(square, 0.5, 0.05)
    assert len(loops) == 1
    loop = loops.loops[0]
    assert np.max(np.abs(square(loop) - 0.5)) <= 1e-9
    assert _signed_area(loop) > 0


def test_inner_loops_run_clockwise(annulus: DCFunction) -> None:
    loops = level_loops_2d(annulus, 0.25, 0.05)
    areas = sorted(_signed_area(lp) for lp in loops.loops)
    assert len(areas) == 2
    assert areas[0] < 0 < areas[1]


def test_empty_level(square: DCFunction) -> None:
    loops = level_loops_2d(square, -1.0)
    assert len(loops) == 0
    assert loops.note == "empty sublevel set"
    res = euler_degree_2d(square, -1.0)
    assert res.chi == 0
    assert euler_cubical(square, -1.0, 0.1).chi == 0


def test_loop_winding_of_square_boundary(square: DCFunction) -> None:
    s = np.linspace(-1.5, 1.5, 11)[:-1]
    loop = np.vstack(
        [
            np.column_stack([s, np.full_like(s, -1.5)]),
            np.column_stack([np.full_like(s, 1.5), s]),
            np.column_stack([-s, np.full_like(s, 1.5)]),
            np.column_stack([np.full_like(s, -1.5), -s]),
        ]
    )
    winding, residual = loop_winding(square, loop)
    assert winding == 1
    assert residual < 1e-6
    assert loop_winding(square, loop[::-1])[0] == -1
    with pytest.raises(ValidationError):
        loop_winding(square, loop[:2])


def test_sublevel_box(square: DCFunction) -> None:
    box = sublevel_box(square, 0.5, pad=0.1)
    assert box is not None
    np.testing.assert_allclose(box[0], [-1.6, -1.6], atol=1e-9)
    np.testing.assert_allclose(box[1], [1.6, 1.6], atol=1e-9)
    with pytest.raises(UnboundedSublevelError):
        sublevel_box(DCFunction.affine([1.0, 0.0]), 0.0)


def test_cubical_in_three_dimensions() -> None:
    cube = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], float)
    f = aura_distance_polytope(VPolytope(cube))
    res = euler_cubical(f, 0.0, 0.25, box=([-2.0] * 3, [2.0] * 3))
    assert res.chi == 1
    assert res.method == "cubical"
    with pytest.raises(ValidationError):
        euler_cubical(f, 0.0, 0.25)


def test_bad_grid(square: DCFunction) -> None:
    with pytest.raises(ValidationError):
        euler_cubical(square, 0.0, 0.0)
    with pytest.raises(ValidationError):
        level_loops_2d(square, 0.5, -0.1)


def test_shape_arguments() -> None:
    with pytest.raises(ValidationError):
        square_aura(half=0.0)
