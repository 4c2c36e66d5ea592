"""Polyhedral DC core: representation, calculus, subdifferentials, planar arrangements."""

from .affine import AffineMap, MaxAffine
from .arrangement import (
    Cell,
    Stratum,
    clip_halfplane,
    common_refinement,
    max_affine_cells,
    overlay_cells,
    strata,
    sublevel_bbox,
)
from .dc import DCFunction, combine, eval_dc
from .lattice import LatticeExpr, lattice_max, lattice_min, lattice_to_dc
from .polytope import VPolytope, min_norm_point
from .pwl import breakpoints_1d, one_sided_slope_1d, pwl_1d, truncate_1d
from .sampling import SamplingPlan
from .subdiff import SubdiffResult, active_sets, subdiff

__all__ = [
    "AffineMap",
    "MaxAffine",
    "DCFunction",
    "combine",
    "eval_dc",
    "LatticeExpr",
    "lattice_max",
    "lattice_min",
    "lattice_to_dc",
    "VPolytope",
    "min_norm_point",
    "SubdiffResult",
    "active_sets",
    "subdiff",
    "breakpoints_1d",
    "one_sided_slope_1d",
    "pwl_1d",
    "truncate_1d",
    "Cell",
    "Stratum",
    "clip_halfplane",
    "common_refinement",
    "max_affine_cells",
    "overlay_cells",
    "strata",
    "sublevel_bbox",
    "SamplingPlan",
]
