"""Deformation retraction onto zero sets via min-norm descent."""

from .flow import (
    RetractionConfig,
    RetractionTrace,
    TraceSample,
    descent_direction,
    retract,
    retract_many,
)
from .verify import BoundaryPath, TraceReport, boundary_path, diameter, verify_trace

__all__ = [
    "RetractionConfig",
    "RetractionTrace",
    "TraceSample",
    "descent_direction",
    "retract",
    "retract_many",
    "BoundaryPath",
    "TraceReport",
    "boundary_path",
    "diameter",
    "verify_trace",
]
