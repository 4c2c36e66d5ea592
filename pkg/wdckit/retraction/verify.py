"""Checks of retraction traces and the boundary-path diameter bound."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from ..core.affine import ArrayLike
from ..core.dc import DCFunction
from ..core.sampling import SamplingPlan
from ..exceptions import ValidationError
from ..utils.parallel import parallel_map
from .flow import SPEED, RetractionConfig, RetractionTrace, retract

logger = logging.getLogger(__name__)

RATIO_TOL = 1e-6
TIME_FACTOR = 1.1
PROBE_COUNT = 256


@dataclass
class TraceReport:
    """
    Outcome of verify_trace.

    worst_ratio is min_k f(x_k) / ((eps/2) |x_k - x*|) over samples away
    from the endpoint; dist_lo = f(x0)/Lip and dist_hi bound dist(x0, M).
    """

    passed: bool
    worst_ratio: float
    dist_lo: float
    dist_hi: float
    time_ratio: float
    failures: List[str] = field(default_factory=list)


def _probe_distance(
    f: DCFunction, z: np.ndarray, radius: float, level: float, seed: int
) -> float:
    """Distance from z to the nearest probe point in {f <= level}, inf if none."""
    if radius <= 0:
        return float("inf")
    plan = SamplingPlan(z - radius, z + radius, PROBE_COUNT, seed)
    pts = plan.points()
    hits = pts[np.asarray(f(pts), dtype=float) <= level]
    if len(hits) == 0:
        return float("inf")
    return float(np.linalg.norm(hits - z, axis=1).min())


def verify_trace(
    trace: RetractionTrace,
    cfg: RetractionConfig,
    f: Optional[DCFunction] = None,
    tol: float = RATIO_TOL,
    seed: int = 0,
) -> TraceReport:
    """
    Check the contraction and distance inequalities along a trace.

    (iv)  (eps/2) |x_k - x*| <= f(x_k) at every sample.
    (v)   (eps/2) dist(x0, M) <= f(x0) <= Lip dist(x0, M), with dist(x0, M)
          bounded above by |x0 - x*| and by a membership-probe hit when f
          is given.
    Also checks the speed bound, monotone descent and the pseudo-time bound.
    Failures are collected, never raised.
    """
    eps = cfg.eps_reg
    pts = trace.points
    vals = trace.values
    times = trace.times
    end = trace.endpoint
    failures: List[str] = []

    dists = np.linalg.norm(pts - end, axis=1)
    denom = 0.5 * eps * dists
    active = denom > 0
    worst = float((vals[active] / denom[active]).min()) if active.any() else float("inf")
    if worst < 1.0 - tol:
        failures.append(f"contraction inequality fails: worst ratio {worst:.9g}")

    f0 = float(vals[0])
    dist_hi = float(dists[0])
    if f is not None and dist_hi > 0:
        dist_hi = min(dist_hi, _probe_distance(f, pts[0], dist_hi, trace.tol_level, seed))
    dist_lo = f0 / trace.lip_f if trace.lip_f > 0 else 0.0
    if 0.5 * eps * dist_hi > f0 * (1.0 + tol) + trace.tol_level:
        lower = 0.5 * eps * dist_hi
        failures.append(f"distance lower inequality fails: {lower:.9g} > f = {f0:.9g}")
    if dist_lo > dist_hi * (1.0 + tol) + trace.tol_level:
        failures.append(f"Lipschitz inequality fails: f/Lip = {dist_lo:.9g} > {dist_hi:.9g}")

    if len(pts) > 1:
        steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        dts = np.diff(times)
        if np.any(steps > SPEED * dts * (1.0 + 1e-9) + 1e-15):
            failures.append("speed bound |x_{k+1} - x_k| <= 2 dt violated")
        above = vals[:-1] > trace.tol_level
        if np.any(np.diff(vals)[above] >= 0):
            failures.append("values do not strictly decrease above the level")

    bound = f0 / eps
    time_ratio = trace.total_time / bound if bound > 0 else 0.0
    if time_ratio > TIME_FACTOR:
        failures.append(
            f"pseudo-time {trace.total_time:.6g} exceeds {TIME_FACTOR * bound:.6g}"
        )

    if failures:
        logger.debug(f"Trace check failures: {failures}")
    return TraceReport(not failures, worst, dist_lo, dist_hi, time_ratio, failures)


@dataclass
class BoundaryPath:
    """Retracted curve with its diameter against the 6/eps bound."""

    points: np.ndarray
    input_diameter: float
    output_diameter: float
    bound: float
    delta_bound: float
    passed: bool


def diameter(points: ArrayLike) -> float:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    return float(pdist(P).max()) if len(P) > 1 else 0.0


def boundary_path(
    f: DCFunction,
    curve: Sequence[ArrayLike],
    cfg: RetractionConfig,
    threads: Optional[int] = None,
) -> BoundaryPath:
    """
    Retract every curve point and compare the image diameter with
    6 diam(curve) / eps (and with 6 delta / eps, delta = max f on the curve).

    Raises:
        ValidationError: an endpoint is not on the zero set within tol_level.
    """
    C = np.atleast_2d(np.asarray(curve, dtype=float))
    if C.shape[0] < 2 or C.shape[1] != f.dim:
        raise ValidationError("boundary_path needs at least two points of matching dimension")
    vals = np.asarray(f(C), dtype=float)
    for k in (0, -1):
        if vals[k] > cfg.level_for(float(vals[k])):
            raise ValidationError(f"curve endpoint {C[k].tolist()} is not on the zero set")

    traces = parallel_map(lambda x: retract(f, x, cfg), list(C), threads)
    out = np.array([tr.endpoint for tr in traces])
    d_in = diameter(C)
    d_out = diameter(out)
    bound = 6.0 * d_in / cfg.eps_reg + 1e-6
    delta = float(vals.max())
    passed = d_out <= bound
    logger.info(f"Boundary path: diam {d_out:.6g} vs bound {bound:.6g}")
    return BoundaryPath(out, d_in, d_out, bound, 6.0 * delta / cfg.eps_reg, passed)
