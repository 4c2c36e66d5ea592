"""Planar DC sectors: specs, radial-gauge validation and arc geometry.

A sector lives in a frame rotated by ``angle``: frame coordinates q relate
to world coordinates p by p = base + R(angle) q. An open sector is the part
of B(0, radius) strictly above the graph of phi; a degenerate sector is the
closed region x >= 0, g_lo(x) <= y <= h_hi(x).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.affine import ArrayLike
from ..core.dc import DCFunction
from ..core.pwl import breakpoints_1d, end_slopes, one_sided_slope_1d
from ..exceptions import ValidationError

logger = logging.getLogger(__name__)

ORIGIN_TOL = 1e-12
RADIUS_SLACK = 1e-6
ARC_TOL = 1e-9
TWO_PI = 2.0 * math.pi


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _check_1d(fn: DCFunction, name: str) -> None:
    if not isinstance(fn, DCFunction) or fn.dim != 1:
        raise ValidationError(f"{name} must be a 1-d DC function")


@dataclass(frozen=True, eq=False)
class OpenSectorSpec:
    """Open sector {y > phi(x)} within B(0, radius), in the frame rotated by angle."""

    angle: float
    radius: float
    phi: DCFunction

    def __post_init__(self) -> None:
        if not (math.isfinite(self.angle) and math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError("sector needs a finite angle and a positive radius")
        _check_1d(self.phi, "sector boundary phi")

    def to_frame(self, pts: ArrayLike, base: ArrayLike = (0.0, 0.0)) -> np.ndarray:
        P = np.atleast_2d(np.asarray(pts, dtype=float)) - np.asarray(base, dtype=float)
        return P @ rotation(self.angle)

    def contains(self, pts: ArrayLike, base: ArrayLike = (0.0, 0.0)) -> np.ndarray:
        """Membership in the open sector (ignoring the radius)."""
        Q = self.to_frame(pts, base)
        return np.asarray(Q[:, 1] > self.phi(Q[:, :1]))


@dataclass(frozen=True, eq=False)
class DegenerateSectorSpec:
    """Closed sector {x >= 0, g_lo(x) <= y <= h_hi(x)} within B(0, radius)."""

    angle: float
    radius: float
    g_lo: DCFunction
    h_hi: DCFunction
    strict_tangent: bool = True

    def __post_init__(self) -> None:
        if not (math.isfinite(self.angle) and math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError("sector needs a finite angle and a positive radius")
        _check_1d(self.g_lo, "lower bound g_lo")
        _check_1d(self.h_hi, "upper bound h_hi")

    def to_frame(self, pts: ArrayLike, base: ArrayLike = (0.0, 0.0)) -> np.ndarray:
        P = np.atleast_2d(np.asarray(pts, dtype=float)) - np.asarray(base, dtype=float)
        return P @ rotation(self.angle)

    def contains(self, pts: ArrayLike, base: ArrayLike = (0.0, 0.0)) -> np.ndarray:
        Q = self.to_frame(pts, base)
        x = Q[:, :1]
        lo = self.g_lo(x)
        hi = self.h_hi(x)
        return np.asarray((Q[:, 0] >= 0) & (Q[:, 1] >= lo) & (Q[:, 1] <= hi))


SectorSpec = Union[OpenSectorSpec, DegenerateSectorSpec]


@dataclass
class SectorReport:
    """Outcome of validate_sector; abscissa is the first violation found."""

    passed: bool
    abscissa: Optional[float] = None
    reason: str = ""


def _knots(fn: DCFunction, lo: float, hi: float) -> np.ndarray:
    bps = breakpoints_1d(fn)
    inner = bps[(bps > lo) & (bps < hi)]
    return np.concatenate([[lo], inner, [hi]])


def gauge_violation(
    fn: DCFunction, reach: float, left_side: bool = True
) -> Optional[Tuple[float, str]]:
    """
    First abscissa where x -> |(x, fn(x))| fails to be strictly monotone.

    Increasing is required on [0, reach], decreasing on [-reach, 0]. On each
    affine piece y = s x + t, half the derivative of the squared gauge is
    (1 + s^2) x + s t, which is increasing in x, so its sign on the open piece
    is decided at one endpoint.
    """
    right = _knots(fn, 0.0, reach)
    vals = np.asarray(fn(right[:, None]), dtype=float)
    for k in range(len(right) - 1):
        x0, x1 = right[k], right[k + 1]
        s = (vals[k + 1] - vals[k]) / (x1 - x0)
        t = vals[k] - s * x0
        if (1.0 + s * s) * x0 + s * t < 0:
            return float(x0), "radial gauge decreases to the right of the base point"
    if not left_side:
        return None
    left = _knots(fn, -reach, 0.0)
    vals = np.asarray(fn(left[:, None]), dtype=float)
    for k in range(len(left) - 1, 0, -1):
        x0, x1 = left[k - 1], left[k]
        s = (vals[k] - vals[k - 1]) / (x1 - x0)
        t = vals[k] - s * x1
        if (1.0 + s * s) * x1 + s * t > 0:
            return float(x1), "radial gauge increases to the left of the base point"
    return None


def validate_sector(spec: SectorSpec) -> SectorReport:
    """
    Check a sector spec exactly on the breakpoints of its boundary functions.

    Failures are reported, never raised.
    """
    reach = spec.radius * (1.0 + RADIUS_SLACK)
    if isinstance(spec, OpenSectorSpec):
        if abs(float(spec.phi(np.zeros(1)))) > ORIGIN_TOL:
            return SectorReport(False, 0.0, "boundary does not pass through the base point")
        bad = gauge_violation(spec.phi, reach)
        if bad is not None:
            return SectorReport(False, bad[0], bad[1])
        return SectorReport(True)

    for name, fn in (("g_lo", spec.g_lo), ("h_hi", spec.h_hi)):
        if abs(float(fn(np.zeros(1)))) > ORIGIN_TOL:
            return SectorReport(False, 0.0, f"{name} does not vanish at 0")
        if spec.strict_tangent and abs(one_sided_slope_1d(fn, 0.0, "right")) > ORIGIN_TOL:
            return SectorReport(False, 0.0, f"{name} has a nonzero right slope at 0")
        bad = gauge_violation(fn, reach, left_side=False)
        if bad is not None:
            return SectorReport(False, bad[0], f"{name}: {bad[1]}")

    knots = np.union1d(_knots(spec.g_lo, 0.0, reach), _knots(spec.h_hi, 0.0, reach))
    gap = np.asarray(spec.h_hi(knots[:, None]) - spec.g_lo(knots[:, None]), dtype=float)
    bad_idx = np.flatnonzero(gap < -ORIGIN_TOL)
    if bad_idx.size:
        return SectorReport(False, float(knots[bad_idx[0]]), "g_lo exceeds h_hi")
    return SectorReport(True)


def gauge_crossing(fn: DCFunction, rho: float, side: str) -> float:
    """Abscissa x on the given side with x^2 + fn(x)^2 = rho^2 (monotone gauge assumed)."""
    if side not in ("left", "right"):
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    sign = 1.0 if side == "right" else -1.0
    bps = breakpoints_1d(fn)
    bps = np.sort(bps[bps * sign > 0] * sign)  # distances from 0 along the side
    knots = np.concatenate([[0.0], bps]) * sign
    for k in range(len(knots)):
        x0 = knots[k]
        if k + 1 < len(knots):
            x1 = knots[k + 1]
            if math.hypot(x1, float(fn(np.array([x1])))) < rho:
                continue
            s = (float(fn(np.array([x1]))) - float(fn(np.array([x0])))) / (x1 - x0)
        else:
            s = end_slopes(fn)[1 if side == "right" else 0]
        t = float(fn(np.array([x0]))) - s * x0
        a = 1.0 + s * s
        disc = max((s * t) ** 2 - a * (t * t - rho * rho), 0.0)
        return float((-s * t + sign * math.sqrt(disc)) / a)
    raise AssertionError("unreachable: last piece is unbounded")


def sector_arc(spec: OpenSectorSpec, rho: float) -> Tuple[float, float]:
    """World-angle arc (start, width) of the open sector on the circle of radius rho."""
    xr = gauge_crossing(spec.phi, rho, "right")
    xl = gauge_crossing(spec.phi, rho, "left")
    ar = math.atan2(float(spec.phi(np.array([xr]))), xr)
    al = math.atan2(float(spec.phi(np.array([xl]))), xl)
    return (ar + spec.angle) % TWO_PI, (al - ar) % TWO_PI


def arcs_overlap(a: Tuple[float, float], b: Tuple[float, float]) -> bool:
    """Whether two open circle arcs (start, width) intersect beyond ARC_TOL."""
    return ((b[0] - a[0]) % TWO_PI) < a[1] - ARC_TOL or ((a[0] - b[0]) % TWO_PI) < b[1] - ARC_TOL


def boundary_polyline(spec: OpenSectorSpec, rho: float, side: str) -> np.ndarray:
    """World polyline of one boundary branch from the base point to radius rho."""
    x_end = gauge_crossing(spec.phi, rho, side)
    lo, hi = (0.0, x_end) if side == "right" else (x_end, 0.0)
    xs = _knots(spec.phi, lo, hi)
    if side == "left":
        xs = xs[::-1]
    Q = np.column_stack([xs, np.asarray(spec.phi(xs[:, None]), dtype=float)])
    return Q @ rotation(spec.angle).T


def _segment_crossing_radii(P: np.ndarray, Q: np.ndarray) -> List[float]:
    radii = []
    for a0, a1 in zip(P[:-1], P[1:]):
        for b0, b1 in zip(Q[:-1], Q[1:]):
            d1, d2 = a1 - a0, b1 - b0
            den = d1[0] * d2[1] - d1[1] * d2[0]
            if abs(den) < 1e-15:
                continue
            w = b0 - a0
            s = (w[0] * d2[1] - w[1] * d2[0]) / den
            u = (w[0] * d1[1] - w[1] * d1[0]) / den
            if 0 <= s <= 1 and 0 <= u <= 1:
                r = float(np.linalg.norm(a0 + s * d1))
                if r > 0:
                    radii.append(r)
    return radii


def check_disjoint(sectors: Sequence[OpenSectorSpec]) -> Optional[float]:
    """
    Radius at which two open sectors overlap, or None if pairwise disjoint.

    Arcs are compared at midpoints between consecutive critical radii (boundary
    breakpoints and pairwise boundary crossings), where the circular order of
    the boundaries is constant.
    """
    if len(sectors) < 2:
        return None
    rho = min(s.radius for s in sectors)
    lines = [
        (boundary_polyline(s, rho, "right"), boundary_polyline(s, rho, "left")) for s in sectors
    ]
    critical = {0.0, rho}
    for pair in lines:
        for line in pair:
            critical.update(float(r) for r in np.linalg.norm(line, axis=1))
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            for P in lines[i]:
                for Q in lines[j]:
                    critical.update(_segment_crossing_radii(P, Q))
    radii = sorted(r for r in critical if 0 <= r <= rho)
    probes = [0.5 * (a + b) for a, b in zip(radii[:-1], radii[1:]) if b - a > 1e-12 * rho]
    for r in probes:
        arcs = [sector_arc(s, r) for s in sectors]
        for i in range(len(arcs)):
            for j in range(i + 1, len(arcs)):
                if arcs_overlap(arcs[i], arcs[j]):
                    logger.debug(f"Sectors {i} and {j} overlap at radius {r:.6g}")
                    return r
    return None
