"""Graph localization, cone types of boundary points and the local characterization."""

import functools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.affine import ArrayLike
from ..core.dc import DCFunction
from ..core.pwl import breakpoints_1d, end_slopes, pwl_1d
from ..exceptions import ConsistencyError, GermError, GraphLocalizeError, ValidationError
from ..utils.parallel import parallel_map
from .model import Branch, PlanarLocalModel, RawGerm
from .sectors import (
    RADIUS_SLACK,
    TWO_PI,
    DegenerateSectorSpec,
    OpenSectorSpec,
    gauge_crossing,
    gauge_violation,
    rotation,
)

logger = logging.getLogger(__name__)

TYPES = ("T1", "T2", "T3", "T4", "T5")
TANGENT_TOL = 1e-9
SLOPE_FLOOR = 1e-12
MAX_HALVINGS = 60
MAX_SHRINKS = 32
SHRINK = 0.99
APEX_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class TypeTag:
    """
    Cone type of a boundary point in one direction, with its witnesses.

    U and L are functions on [0, r) in the frame of the direction; the cone
    is {0 <= x < r, |y| <= 2 u x}.
    """

    value: str
    r: float
    u: float
    U: Optional[DCFunction] = None
    L: Optional[DCFunction] = None

    def __post_init__(self) -> None:
        if self.value not in TYPES:
            raise ValidationError(f"unknown type tag {self.value!r}")


@dataclass(frozen=True, eq=False)
class LocalGraph:
    """fn restricted to (lo, hi) is the localized curve."""

    fn: DCFunction
    lo: float
    hi: float


def _wrapped(a: float, b: float) -> float:
    return abs((a - b + math.pi) % TWO_PI - math.pi)


def graph_localize(
    fn: DCFunction,
    rho: float,
    source_angle: float = 0.0,
    target_angle: float = 0.0,
    half: bool = False,
) -> LocalGraph:
    """
    Re-express graph(fn), drawn in the frame rotated by source_angle, as a
    graph over the x-axis of the frame rotated by target_angle, inside B(0, rho).

    With half=True only the part t >= 0 of the curve is used.

    Raises:
        GraphLocalizeError: the curve has a vertical piece in the target frame,
            or its radial gauge stops being monotone inside rho. max_radius is
            the largest radius where localization would succeed.
    """
    if fn.dim != 1:
        raise ValidationError("graph_localize needs a 1-d function")
    if not rho > 0:
        raise ValidationError("localization radius must be positive")

    bad = gauge_violation(fn, rho * (1.0 + RADIUS_SLACK), left_side=not half)
    if bad is not None:
        x_bad = bad[0]
        r_bad = math.hypot(x_bad, float(fn(np.array([x_bad]))))
        if r_bad < rho:
            raise GraphLocalizeError(f"radial gauge not monotone beyond radius {r_bad:.6g}", r_bad)

    t_hi = gauge_crossing(fn, rho, "right")
    t_lo = 0.0 if half else gauge_crossing(fn, rho, "left")
    bps = breakpoints_1d(fn)
    ts = np.concatenate([[t_lo], bps[(bps > t_lo) & (bps < t_hi)], [t_hi]])
    vals = np.asarray(fn(ts[:, None]), dtype=float)

    delta = source_angle - target_angle
    c, s = math.cos(delta), math.sin(delta)
    X = c * ts - s * vals
    Y = s * ts + c * vals
    dX = np.diff(X)
    scale = np.maximum(np.abs(np.diff(ts)), SLOPE_FLOOR)
    sign = 1.0 if dX[np.argmin(np.abs(ts[:-1]))] > 0 else -1.0
    off = np.flatnonzero(sign * dX <= SLOPE_FLOOR * scale)
    if off.size:
        k = int(off[np.argmin(np.abs(ts[off]) + np.abs(ts[off + 1]))])
        if ts[k] <= 0.0 <= ts[k + 1]:
            near = 0.0
        else:
            near = min(math.hypot(ts[k], vals[k]), math.hypot(ts[k + 1], vals[k + 1]))
        what = "vertical tangent" if near == 0.0 else "curve folds back"
        raise GraphLocalizeError(f"{what} in the target frame at radius {near:.6g}", near)

    if sign < 0:
        X, Y = X[::-1], Y[::-1]
    slopes = np.diff(Y) / np.diff(X)
    local = pwl_1d(X, Y, float(slopes[0]), float(slopes[-1]))
    return LocalGraph(local, float(X[0]), float(X[-1]))


def _local(b: Branch, rho: float, target: float) -> LocalGraph:
    return graph_localize(b.fn, rho, b.angle, target, half=True)


def order_branches(branches: Sequence[Branch], rho: float) -> List[Branch]:
    """
    Branches in counterclockwise order of their tangents; branches sharing a
    tangent are ordered by which lies lower in the tangent frame.

    Raises:
        GermError: two branches coincide.
    """

    def cmp(a: Branch, b: Branch) -> int:
        if _wrapped(a.tangent, b.tangent) > TANGENT_TOL:
            return -1 if a.tangent < b.tangent else 1
        ga = _local(a, rho, a.tangent)
        gb = _local(b, rho, a.tangent)
        hi = min(ga.hi, gb.hi)
        knots = np.union1d(breakpoints_1d(ga.fn), breakpoints_1d(gb.fn))
        knots = np.append(knots[(knots > 0) & (knots < hi)], hi)
        diff = np.asarray(ga.fn(knots[:, None]) - gb.fn(knots[:, None]), dtype=float)
        for dv in diff:
            if abs(dv) > TANGENT_TOL * (1.0 + rho):
                return -1 if dv < 0 else 1
        raise GermError("two boundary branches coincide")

    return sorted(branches, key=functools.cmp_to_key(cmp))


def arc_status(ordered: Sequence[Branch]) -> List[bool]:
    """
    inside[k] tells whether the open arc from branch k to branch k+1 (cyclic,
    counterclockwise) belongs to the set.

    Raises:
        GermError: neighbouring side labels contradict each other.
    """
    m = len(ordered)
    inside = []
    for k in range(m):
        after = ordered[k].side == "above"
        before = ordered[(k + 1) % m].side == "below"
        if after != before:
            raise GermError(
                f"side labels of branches {k} and {(k + 1) % m} disagree on the arc between them"
            )
        inside.append(after)
    return inside


def arc_widths(ordered: Sequence[Branch]) -> List[float]:
    m = len(ordered)
    widths = []
    for k in range(m):
        w = (ordered[(k + 1) % m].tangent - ordered[k].tangent) % TWO_PI
        if k == m - 1 and w <= TANGENT_TOL:
            w = TWO_PI
        widths.append(w)
    return widths


def _segment_cone_entry(p0: np.ndarray, p1: np.ndarray, slope: float) -> Optional[float]:
    """Smallest x where segment p0 p1 meets {x > 0, |y| <= slope x}, apex excluded."""
    lo, hi = 0.0, 1.0
    d = p1 - p0
    # y - slope x <= 0 and -y - slope x <= 0
    for a, b in ((d[1] - slope * d[0], p0[1] - slope * p0[0]),
                 (-d[1] - slope * d[0], -p0[1] - slope * p0[0])):
        if abs(a) < 1e-300:
            if b > 0:
                return None
            continue
        lam = -b / a
        if a > 0:
            hi = min(hi, lam)
        else:
            lo = max(lo, lam)
    if lo > hi:
        return None
    entry = p0 + lo * d
    if np.linalg.norm(entry) <= APEX_TOL and np.linalg.norm(p0 + hi * d) <= APEX_TOL:
        return None
    return float(max(entry[0], 0.0))


def _polyline(b: Branch, rho: float) -> np.ndarray:
    t_hi = gauge_crossing(b.fn, rho, "right")
    bps = breakpoints_1d(b.fn)
    ts = np.concatenate([[0.0], bps[(bps > 0) & (bps < t_hi)], [t_hi]])
    return b.world(ts)


@dataclass
class _Boundary:
    ordered: List[Branch]
    inside: List[bool]
    radius: float


def _boundary(M: PlanarLocalModel) -> _Boundary:
    ordered = order_branches(M.branches(), M.radius)
    return _Boundary(ordered, arc_status(ordered) if ordered else [], M.radius)


def _admissible_radius(bd: _Boundary, theta: float, u: float) -> Tuple[float, List[LocalGraph]]:
    """Largest r with foreign branches outside A_r^{2u} and aligned ones inside A_r^u."""
    R = rotation(theta)
    r = bd.radius / math.sqrt(1.0 + 4.0 * u * u)
    graphs: List[LocalGraph] = []
    for b in bd.ordered:
        if _wrapped(b.tangent, theta) <= TANGENT_TOL:
            g = _local(b, bd.radius, theta)
            graphs.append(g)
            knots = breakpoints_1d(g.fn)
            knots = np.append(knots[(knots > 0) & (knots < g.hi)], g.hi)
            vals = np.abs(np.asarray(g.fn(knots[:, None]), dtype=float))
            out = np.flatnonzero(vals > u * knots + SLOPE_FLOOR)
            limit = g.hi if out.size == 0 else (float(knots[out[0] - 1]) if out[0] > 0 else 0.0)
            r = min(r, limit)
            continue
        Q = _polyline(b, bd.radius) @ R
        for p0, p1 in zip(Q[:-1], Q[1:]):
            x = _segment_cone_entry(p0, p1, 2.0 * u)
            if x is not None:
                r = min(r, x)
    return r, graphs


def type_at(M: PlanarLocalModel, v: ArrayLike, r: float, u: float) -> Optional[TypeTag]:
    """
    Type of M at its base point for the cone A_r^{2u} in direction v, or None
    when a foreign boundary piece intrudes into the cone (or an aligned one
    leaves A_r^u) before radius r.
    """
    vec = np.asarray(v, dtype=float).reshape(2)
    if not np.linalg.norm(vec) > 0:
        raise ValidationError("direction must be nonzero")
    if not (r > 0 and u > 0):
        raise ValidationError("cone parameters must be positive")
    theta = math.atan2(vec[1], vec[0]) % TWO_PI
    bd = _boundary(M)
    limit, graphs = _admissible_radius(bd, theta, u)
    if r > limit:
        return None
    aligned = [k for k, b in enumerate(bd.ordered) if _wrapped(b.tangent, theta) <= TANGENT_TOL]

    if not aligned:
        if not bd.ordered:
            return TypeTag("T1", r, u)
        m = len(bd.ordered)
        widths = arc_widths(bd.ordered)
        for k in range(m):
            offset = (theta - bd.ordered[k].tangent) % TWO_PI
            if 0 < offset < widths[k]:
                return TypeTag("T2" if bd.inside[k] else "T1", r, u)
        raise ConsistencyError(f"direction {theta:.6g} falls in no arc")

    if len(aligned) == 1:
        side = bd.ordered[aligned[0]].side
        g = graphs[0].fn
        if side == "below":
            return TypeTag("T3", r, u, U=g)
        if side == "above":
            return TypeTag("T4", r, u, L=g)
        return TypeTag("T5", r, u, U=g, L=g)

    if len(aligned) == 2 and bd.inside[aligned[0]]:
        return TypeTag("T5", r, u, U=graphs[1].fn, L=graphs[0].fn)
    raise ConsistencyError(
        f"{len(aligned)} boundary branches share direction {theta:.6g} without a closed sector"
    )


def classify_direction(
    M: PlanarLocalModel, v: ArrayLike, max_halvings: int = MAX_HALVINGS
) -> TypeTag:
    """
    Type T1..T5 of M at its base point in direction v.

    The half-slope runs through u = 2^-k; for each u the radius is half the
    largest one keeping foreign boundary pieces out of the cone.
    """
    vec = np.asarray(v, dtype=float).reshape(2)
    theta = math.atan2(vec[1], vec[0]) % TWO_PI
    bd = _boundary(M)
    for k in range(1, max_halvings + 1):
        u = 2.0**-k
        limit, _ = _admissible_radius(bd, theta, u)
        if limit <= 0:
            continue
        tag = type_at(M, vec, 0.5 * limit, u)
        if tag is not None:
            logger.debug(f"Direction {theta:.6g}: {tag.value} at r={tag.r:.3g}, u={u:.3g}")
            return tag
    raise ConsistencyError(f"no cone type found in direction {theta:.6g}")


def sweep_directions(
    M: PlanarLocalModel,
    count: int = 64,
    threads: Optional[int] = None,
    max_halvings: int = MAX_HALVINGS,
) -> List[Tuple[float, TypeTag]]:
    """Tags of count equally spaced directions plus every tangent direction, by angle."""
    if count < 1:
        raise ValidationError("direction count must be positive")
    angles = {TWO_PI * j / count for j in range(count)}
    angles.update(b.tangent for b in M.branches())
    ordered = sorted(angles)
    tags = parallel_map(
        lambda a: classify_direction(M, (math.cos(a), math.sin(a)), max_halvings),
        ordered,
        threads,
    )
    return list(zip(ordered, tags))


def _sector(lower: Branch, upper: Branch, start: float, width: float, rho: float) -> OpenSectorSpec:
    """Open sector swept counterclockwise from lower to upper."""
    angle = start + 0.5 * width - 0.5 * math.pi
    right = _local(lower, rho, angle)
    left = _local(upper, rho, angle)
    kr = breakpoints_1d(right.fn)
    kl = breakpoints_1d(left.fn)
    knots = np.concatenate(
        [
            [left.lo],
            kl[(kl > left.lo) & (kl < 0)],
            [0.0],
            kr[(kr > 0) & (kr < right.hi)],
            [right.hi],
        ]
    )
    values = np.where(
        knots < 0,
        np.asarray(left.fn(knots[:, None]), dtype=float),
        np.asarray(right.fn(knots[:, None]), dtype=float),
    )
    values[knots == 0.0] = 0.0
    phi = pwl_1d(knots, values, end_slopes(left.fn)[0], end_slopes(right.fn)[1])
    return OpenSectorSpec(angle % TWO_PI, rho, phi)


def _characterize(germ: RawGerm, rho: float) -> PlanarLocalModel:
    if not germ.branches:
        return PlanarLocalModel.isolated(germ.x, rho)
    ordered = order_branches(germ.branches, rho)
    inside = arc_status(ordered)
    widths = arc_widths(ordered)
    m = len(ordered)

    if m == 1:
        b = ordered[0]
        g = _local(b, rho, b.tangent).fn
        spec = DegenerateSectorSpec(b.tangent, rho, g, g)
        return PlanarLocalModel.degenerate_sector(germ.x, spec)

    cusps = [k for k in range(m) if widths[k] <= TANGENT_TOL]
    for k in cusps:
        if not inside[k]:
            raise GermError("the set misses a cusp between two tangent branches")
    if cusps:
        k = cusps[0]
        if m != 2 or sum(inside) != 1:
            raise GermError("a cusp of the set must be its whole germ")
        lower, upper = ordered[k], ordered[(k + 1) % m]
        theta = lower.tangent
        spec = DegenerateSectorSpec(
            theta, rho, _local(lower, rho, theta).fn, _local(upper, rho, theta).fn
        )
        return PlanarLocalModel.degenerate_sector(germ.x, spec)

    sectors = [
        _sector(ordered[k], ordered[(k + 1) % m], ordered[k].tangent, widths[k], rho)
        for k in range(m)
        if not inside[k]
    ]
    if not sectors:
        raise GermError("every arc around the point lies in the set; it is not a boundary point")
    return PlanarLocalModel.complement(germ.x, sectors)


def characterize_local(germ: RawGerm, shrink: bool = True) -> PlanarLocalModel:
    """
    Local model of a closed planar set at x from its boundary branches.

    No branch gives the isolated point; a single curve or a cusp gives a
    degenerate sector in the frame of its tangent; otherwise every arc
    outside the set becomes an open sector. When a branch stops being a
    monotone graph, the radius shrinks to the largest admissible one.

    Raises:
        GermError: contradictory side labels, coinciding branches, or a
            configuration matching none of the three models.
        GraphLocalizeError: a branch with a vertical tangent in its own frame.
    """
    rho = germ.rho
    for _ in range(MAX_SHRINKS):
        try:
            model = _characterize(germ, rho)
            model.validate()
            logger.info(f"Germ at {germ.x}: {model.kind} model, radius {rho:.6g}")
            return model
        except GraphLocalizeError as e:
            if not shrink or e.max_radius <= 0:
                raise
            logger.debug(f"Shrinking germ radius {rho:.6g} -> {SHRINK * e.max_radius:.6g}")
            rho = SHRINK * e.max_radius
    raise GermError(f"germ radius did not settle after {MAX_SHRINKS} shrinks")
