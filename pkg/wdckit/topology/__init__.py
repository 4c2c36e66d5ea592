"""Euler characteristics of planar sublevel sets: level tracing, winding and a cubical count."""

from .euler import EulerResult, euler_cubical, euler_degree_2d, loop_winding
from .level import LevelLoops, grid_axis, level_loops_2d, sublevel_box
from .shapes import annulus_aura, holed_square_aura, point_aura, square_aura, squares_aura

__all__ = [
    "EulerResult",
    "euler_cubical",
    "euler_degree_2d",
    "loop_winding",
    "LevelLoops",
    "grid_axis",
    "level_loops_2d",
    "sublevel_box",
    "annulus_aura",
    "holed_square_aura",
    "point_aura",
    "square_aura",
    "squares_aura",
]
