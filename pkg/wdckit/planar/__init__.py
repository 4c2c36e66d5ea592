"""Planar locally WDC sets: sectors, cone types, local characterization and aura synthesis."""

from .classify import (
    LocalGraph,
    TypeTag,
    characterize_local,
    classify_direction,
    graph_localize,
    sweep_directions,
    type_at,
)
from .model import Branch, PlanarLocalModel, RawGerm
from .sectors import (
    DegenerateSectorSpec,
    OpenSectorSpec,
    SectorReport,
    boundary_polyline,
    check_disjoint,
    sector_arc,
    validate_sector,
)
from .synthesis import build_planar_aura, membership_mismatches

__all__ = [
    "LocalGraph",
    "TypeTag",
    "characterize_local",
    "classify_direction",
    "graph_localize",
    "sweep_directions",
    "type_at",
    "Branch",
    "PlanarLocalModel",
    "RawGerm",
    "DegenerateSectorSpec",
    "OpenSectorSpec",
    "SectorReport",
    "boundary_polyline",
    "check_disjoint",
    "sector_arc",
    "validate_sector",
    "build_planar_aura",
    "membership_mismatches",
]
