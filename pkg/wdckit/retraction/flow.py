"""Min-norm descent flow onto the zero set of an aura."""

import logging
from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence

import numpy as np

from ..core.affine import ArrayLike
from ..core.dc import DCFunction
from ..core.polytope import min_norm_point
from ..core.subdiff import ACTIVITY_TOL, CLARKE_MAX_DIM, subdiff
from ..exceptions import MaxIterError, RegularityError, ValidationError
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

SPEED = 2.0
EPS_SHRINK = 1.0 - 1e-9
MIN_STEP = 1e-14


@dataclass(frozen=True)
class RetractionConfig:
    """
    Flow parameters.

    eps_reg is the weak-regularity margin; tol_level None means
    1e-9 * (1 + |f(x0)|) per start point.
    """

    eps_reg: float
    step: float = 0.01
    tol_level: Optional[float] = None
    max_iter: int = 1_000_000
    sufficient_decrease: float = 0.9
    bisect_tol: float = 1e-12

    def __post_init__(self) -> None:
        if not (np.isfinite(self.eps_reg) and self.eps_reg > 0):
            raise ValidationError(f"eps_reg must be positive and finite, got {self.eps_reg}")
        if not self.step > 0:
            raise ValidationError("step must be positive")
        if self.tol_level is not None and not self.tol_level > 0:
            raise ValidationError("tol_level must be positive")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")
        if not 0 < self.sufficient_decrease <= 1:
            raise ValidationError("sufficient_decrease must lie in (0, 1]")

    @classmethod
    def from_report(cls, report: Any, **overrides: Any) -> "RetractionConfig":
        """Take eps_reg from an AuraReport margin."""
        margin = float(report.margin)
        if not (np.isfinite(margin) and margin > 0):
            raise ValidationError(f"report margin {margin} cannot drive a retraction")
        return cls(eps_reg=margin, **overrides)

    def level_for(self, f0: float) -> float:
        return self.tol_level if self.tol_level is not None else 1e-9 * (1.0 + abs(f0))


@dataclass(frozen=True)
class TraceSample:
    t: float
    x: np.ndarray
    fx: float


@dataclass
class RetractionTrace:
    """Time-stamped descent path; the last sample is the retraction endpoint."""

    samples: List[TraceSample]
    lip_f: float
    eps_reg: float
    tol_level: float
    steps: int = 0
    halvings: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def points(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.fx for s in self.samples])

    @property
    def start(self) -> np.ndarray:
        return self.samples[0].x

    @property
    def endpoint(self) -> np.ndarray:
        return self.samples[-1].x

    @property
    def total_time(self) -> float:
        return self.samples[-1].t


def descent_direction(
    f: DCFunction, x: ArrayLike, eps_min: float, tol: float = ACTIVITY_TOL
) -> np.ndarray:
    """
    Normalized min-norm Clarke subgradient p / |p|.

    For every v in the hull, <p/|p|, v> >= |p| >= eps_min.

    Raises:
        RegularityError: |p| < eps_min.
    """
    pt = np.asarray(x, dtype=float).reshape(-1)
    mode = "clarke" if f.dim <= CLARKE_MAX_DIM else "outer"
    p = min_norm_point(subdiff(f, pt, mode, tol).hull)
    n = float(np.linalg.norm(p))
    if n < eps_min or n == 0.0:
        raise RegularityError(n, pt, eps_min)
    return p / n


def _bisect_level(
    f: DCFunction, x: np.ndarray, y: np.ndarray, level: float, tol: float
) -> float:
    """Fraction s in (0, 1] with f(x + s (y - x)) <= level, to tol along the segment."""
    lo, hi = 0.0, 1.0
    length = float(np.linalg.norm(y - x))
    while (hi - lo) * length > tol:
        mid = 0.5 * (lo + hi)
        if float(f(x + mid * (y - x))) <= level:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-17:
            break
    return hi


def retract(f: DCFunction, x0: ArrayLike, cfg: RetractionConfig) -> RetractionTrace:
    """
    Flow x0 down to {f <= tol_level} along x <- x - 2 dt d(x).

    Steps of pseudo-time dt = cfg.step are accepted on sufficient decrease
    f(y) <= f(x) - sigma * 2 dt * eps and halved otherwise; the crossing of
    tol_level is bisected on the last segment.

    Raises:
        ValidationError: dimension mismatch or f(x0) < 0.
        RegularityError: small min-norm subgradient along the way.
        MaxIterError: iteration cap exceeded.
    """
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    if x.shape[0] != f.dim:
        raise ValidationError(f"start of dimension {x.shape[0]} for a {f.dim}-d function")
    fx = float(f(x))
    if fx < -1e-12 * (1.0 + abs(fx)):
        raise ValidationError(f"retraction start has negative value {fx}")
    level = cfg.level_for(fx)
    trace = RetractionTrace([TraceSample(0.0, x.copy(), fx)], f.lipschitz(), cfg.eps_reg, level)
    if fx <= level:
        return trace

    eps_min = cfg.eps_reg * EPS_SHRINK
    t = 0.0
    dt = cfg.step
    d = descent_direction(f, x, eps_min)
    for _ in range(cfg.max_iter):
        y = x - SPEED * dt * d
        fy = float(f(y))
        if fy <= level:
            s = _bisect_level(f, x, y, level, cfg.bisect_tol)
            end = x + s * (y - x)
            trace.samples.append(TraceSample(t + s * dt, end, float(f(end))))
            trace.steps += 1
            logger.debug(f"Retraction reached level after {trace.steps} steps, t={t + s * dt:.6g}")
            return trace
        if fy <= fx - cfg.sufficient_decrease * SPEED * dt * eps_min:
            x, fx = y, fy
            t += dt
            trace.samples.append(TraceSample(t, x.copy(), fx))
            trace.steps += 1
            dt = cfg.step
            d = descent_direction(f, x, eps_min)
            continue
        dt *= 0.5
        trace.halvings += 1
        if dt < MIN_STEP * cfg.step:
            raise MaxIterError(f"step underflow at {x.tolist()} (f = {fx:.6g})")
    raise MaxIterError(f"retraction exceeded {cfg.max_iter} iterations (f = {fx:.6g})")


def retract_many(
    f: DCFunction,
    starts: Sequence[ArrayLike],
    cfg: RetractionConfig,
    threads: Optional[int] = None,
) -> List[RetractionTrace]:
    """Independent traces from several starts, in input order."""
    return parallel_map(lambda x0: retract(f, x0, cfg), list(starts), threads)
