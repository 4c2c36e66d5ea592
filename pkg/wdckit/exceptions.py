"""Exception hierarchy for wdckit.

Every error carries the process exit code the CLI reports for it.
"""

from typing import Any, Optional, Sequence


class WdcError(Exception):
    """Base class for all wdckit errors."""

    exit_code = 2


class ValidationError(WdcError):
    """Malformed input, dimension mismatch or bad arguments."""


class UnsupportedDimensionError(ValidationError):
    """Operation requested in a dimension it is not implemented for."""

    def __init__(self, operation: str, dim: int, supported: str):
        super().__init__(
            f"{operation} is not supported in dimension {dim} (supported: {supported})"
        )
        self.operation = operation
        self.dim = dim


class UnboundedSublevelError(ValidationError):
    """The sublevel set {f <= c} is not bounded."""

    def __init__(self, level: float, witness: Optional[Sequence[float]] = None):
        msg = f"sublevel set {{f <= {level!r}}} is unbounded"
        if witness is not None:
            msg += f" (reaches the probe box at {[float(v) for v in witness]})"
        super().__init__(msg)
        self.level = level
        self.witness = witness


class SchemaError(ValidationError):
    """A text-schema document could not be read."""


class GermError(ValidationError):
    """Raw planar germ data is inconsistent."""


class GraphLocalizeError(ValidationError):
    """A planar curve is not a monotone graph in the requested frame and radius.

    ``max_radius`` is the largest radius for which localization succeeds
    (0 when the failure is at the base point itself).
    """

    def __init__(self, message: str, max_radius: float = 0.0):
        super().__init__(message)
        self.max_radius = max_radius


class DepthOverflowError(ValidationError):
    """Requested IFS depth outside the supported range."""


class RegularityError(WdcError):
    """A min-norm subgradient fell below the required margin."""

    exit_code = 3

    def __init__(self, norm: float, point: Sequence[float], required: float = 0.0):
        pt = [float(v) for v in point]
        super().__init__(
            f"regularity violation at {pt}: min-norm subgradient {norm:.3e} < {required:.3e}"
        )
        self.norm = norm
        self.point = pt
        self.required = required


class MaxIterError(WdcError):
    """Iteration cap exceeded."""

    exit_code = 3


class RefinementError(WdcError):
    """Winding refinement did not converge to an integer."""

    exit_code = 3


class ConsistencyError(WdcError):
    """An internal cross-check failed."""

    exit_code = 3


class WeakTouchError(WdcError):
    """Two auras touch weakly; their sum is not guaranteed to be an aura."""

    exit_code = 3

    def __init__(self, report: Any):
        super().__init__(
            f"auras touch weakly at {report.witness_point} "
            f"with normal {report.witness_normal}"
        )
        self.report = report
