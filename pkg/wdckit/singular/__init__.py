"""Segment covers of planar singular sets and aura boundaries."""

from .cover import (
    SegmentCover,
    boundary_cover_2d,
    merge_collinear,
    singular_set_pwa_2d,
    zero_set_large_subdiff_2d,
)

__all__ = [
    "SegmentCover",
    "boundary_cover_2d",
    "merge_collinear",
    "singular_set_pwa_2d",
    "zero_set_large_subdiff_2d",
]
