"""Numerical certificate of the subgradient bound for the distance to the self-similar curve."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..core.polytope import min_norm_point
from ..exceptions import ValidationError
from ..utils.parallel import chunked, parallel_map
from .ifs import FractalApprox, IFSSpec, distance_to_approx, ifs_generate, projection_fan

logger = logging.getLogger(__name__)

FAN_FRACTION = 0.1
TOLERANCE = 0.02
SWEEP_CHUNK = 2048


@dataclass
class FractalReport:
    """
    Smallest projection-fan min-norm over the grid shell.

    passed compares it with -cos(gamma) - tolerance. certified additionally
    needs the discretization slack to stay below the bound and the minimum
    to clear bound - slack.
    """

    min_norm: float
    bound: float
    slack: float
    passed: bool
    certified: bool
    tolerance: float
    probes: int
    depth: int
    grid: float
    shell: Tuple[float, float]
    fan_tol: float
    witness: List[float] = field(default_factory=list)


def shell_grid(
    spec: IFSSpec, grid: float, shell: Tuple[float, float]
) -> np.ndarray:
    """Points k * grid (k integer) in the bounding box of H padded by the outer shell radius."""
    T = spec.triangle()
    lo = T.min(axis=0) - shell[1]
    hi = T.max(axis=0) + shell[1]
    axes = [
        np.arange(math.ceil(lo[i] / grid), math.floor(hi[i] / grid) + 1) * grid for i in range(2)
    ]
    X, Y = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def judge_bound(
    min_norm: float, bound: float, slack: float, tolerance: float = TOLERANCE
) -> Tuple[bool, bool]:
    """(passed, certified) for a measured minimum against the bound."""
    passed = min_norm >= bound - tolerance
    certified = slack < bound and min_norm >= bound - slack
    return bool(passed), bool(certified)


def fan_min_norm(x: np.ndarray, approx: FractalApprox, fan_tol: float, dist: float) -> float:
    fan = projection_fan(x, approx, fan_tol, dist)
    if len(fan) == 1:
        return 1.0
    return float(np.linalg.norm(min_norm_point(fan)))


def fractal_regularity_check(
    spec: IFSSpec,
    depth: int,
    grid: float,
    shell: Tuple[float, float],
    fan_tol: Optional[float] = None,
    threads: Optional[int] = None,
    tolerance: float = TOLERANCE,
) -> FractalReport:
    """
    Sweep the grid points whose distance to the depth-n approximation lies in
    the shell and record the smallest min-norm of their projection fans.

    Args:
        spec: The self-similar family member.
        depth: Approximation depth n.
        grid: Grid spacing h; probes sit at integer multiples of h.
        shell: (delta_min, delta_max) distance band.
        fan_tol: Projection tolerance, grid / 10 by default.
        tolerance: Allowed shortfall of the minimum below -cos(gamma).
        threads: Worker cap for the sweep.

    Raises:
        ValidationError: delta_min <= 2 a^n diam(H), a malformed shell or grid,
            or a negative tolerance.
    """
    lo, hi = float(shell[0]), float(shell[1])
    if not (grid > 0 and 0 < lo < hi):
        raise ValidationError(f"bad grid {grid} or shell {shell}")
    if not tolerance >= 0:
        raise ValidationError(f"tolerance must be nonnegative, got {tolerance}")
    approx = ifs_generate(spec, depth)
    if not lo > 2.0 * approx.hausdorff_bound:
        raise ValidationError(
            f"shell inner radius {lo} must exceed 2 a^n diam(H) = {2 * approx.hausdorff_bound:.6g}"
        )
    tol = FAN_FRACTION * grid if fan_tol is None else float(fan_tol)

    pts = shell_grid(spec, grid, (lo, hi))
    dist = distance_to_approx(pts, approx)
    keep = (dist >= lo) & (dist <= hi)
    pts, dist = pts[keep], dist[keep]

    def sweep(sl: slice) -> Tuple[float, int]:
        norms = [fan_min_norm(pts[k], approx, tol, dist[k]) for k in range(sl.start, sl.stop)]
        k = int(np.argmin(norms))
        return norms[k], sl.start + k

    results = parallel_map(sweep, chunked(len(pts), SWEEP_CHUNK), threads)
    if results:
        best, at = min(results, key=lambda r: (r[0], r[1]))
        witness = pts[at].tolist()
    else:
        best, witness = math.inf, []

    bound = -math.cos(spec.gamma)
    slack = 2.0 * (approx.hausdorff_bound + tol) / lo
    passed, certified = judge_bound(best, bound, slack, tolerance)
    if not slack < bound:
        logger.warning(
            f"Slack {slack:.3g} exceeds the bound {bound:.3g} at depth {depth}, shell {shell}; "
            "the result is not certified"
        )
    report = FractalReport(
        min_norm=best,
        bound=bound,
        slack=slack,
        passed=passed,
        certified=certified,
        tolerance=tolerance,
        probes=len(pts),
        depth=depth,
        grid=grid,
        shell=(lo, hi),
        fan_tol=tol,
        witness=witness,
    )
    logger.info(
        f"Fractal check at depth {depth}: min-norm {best:.6g} vs {bound:.6g} - {slack:.3g} "
        f"over {len(pts)} probes"
    )
    return report
