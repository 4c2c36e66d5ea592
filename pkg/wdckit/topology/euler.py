"""Euler characteristic of sublevel sets: winding of the subgradient field and a cubical count."""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..core.affine import ArrayLike
from ..core.dc import DCFunction
from ..core.polytope import VPolytope, min_norm_point
from ..core.subdiff import subdiff
from ..exceptions import RefinementError, RegularityError, UnboundedSublevelError, ValidationError
from ..utils.parallel import chunked, parallel_map
from .level import GRID_OFFSET, level_loops_2d, sublevel_box

logger = logging.getLogger(__name__)

REFINE = math.pi / 2
RESIDUAL = 0.1
SEAM_PERTURB = 1e-9
MIN_SPLIT = 1e-12
MAX_DEPTH = 50
SINGLETON_TOL = 1e-12
CHUNK = 65536


@dataclass
class EulerResult:
    """
    Euler characteristic with its evidence: per-loop windings (degree) or
    face counts by dimension (cubical).
    """

    chi: int
    per_loop: List[int]
    method: str
    level: float
    residuals: List[float] = field(default_factory=list)
    note: str = ""


def _angle(u: np.ndarray, v: np.ndarray) -> float:
    return math.atan2(u[0] * v[1] - u[1] * v[0], float(u @ v))


def _unit(p: np.ndarray, x: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(p))
    if n == 0.0:
        raise RegularityError(0.0, x)
    return p / n


def _field(f: DCFunction, x: np.ndarray, tangent: np.ndarray) -> Tuple[np.ndarray, VPolytope]:
    """Normalized min-norm Clarke point near x, nudged along the loop off seams."""
    hull = subdiff(f, x).hull
    if not hull.is_singleton(SINGLETON_TOL):
        nudged = subdiff(f, x + SEAM_PERTURB * tangent).hull
        if nudged.is_singleton(SINGLETON_TOL):
            hull = nudged
    return _unit(min_norm_point(hull), x), hull


def loop_winding(
    f: DCFunction,
    loop: ArrayLike,
    refine: float = REFINE,
    residual_tol: float = RESIDUAL,
) -> Tuple[int, float]:
    """
    Signed number of turns of u = normalized min-norm subgradient along a closed loop.

    Midpoints are inserted until every angle increment is below refine; a
    jump that survives down to MIN_SPLIT is a seam and is routed through the
    min-norm point of the union of the two hulls.

    Returns:
        (winding, residual) with residual the distance of the raw turn count
        to the nearest integer.

    Raises:
        RegularityError: a zero min-norm subgradient on the loop.
        RefinementError: residual >= residual_tol.
    """
    P = np.asarray(loop, dtype=float)
    if len(P) > 1 and np.array_equal(P[0], P[-1]):
        P = P[:-1]
    m = len(P)
    if m < 3:
        raise ValidationError("a loop needs at least three distinct points")

    tangents = np.roll(P, -1, axis=0) - np.roll(P, 1, axis=0)
    tangents /= np.maximum(np.linalg.norm(tangents, axis=1), 1e-300)[:, None]
    samples = [_field(f, P[k], tangents[k]) for k in range(m)]

    def span(a: np.ndarray, b: np.ndarray, ua: Tuple[np.ndarray, VPolytope],
             ub: Tuple[np.ndarray, VPolytope], depth: int) -> float:
        inc = _angle(ua[0], ub[0])
        if abs(inc) < refine:
            return inc
        if np.linalg.norm(b - a) < MIN_SPLIT or depth > MAX_DEPTH:
            union = np.vstack([ua[1].vertices, ub[1].vertices])
            w = _unit(min_norm_point(union), a)
            return _angle(ua[0], w) + _angle(w, ub[0])
        mid = 0.5 * (a + b)
        t = (b - a) / np.linalg.norm(b - a)
        um = _field(f, mid, t)
        return span(a, mid, ua, um, depth + 1) + span(mid, b, um, ub, depth + 1)

    total = 0.0
    for k in range(m):
        total += span(P[k], P[(k + 1) % m], samples[k], samples[(k + 1) % m], 0)
    turns = total / (2.0 * math.pi)
    winding = int(round(turns))
    residual = abs(turns - winding)
    if residual >= residual_tol:
        raise RefinementError(f"winding {turns:.4f} is not close to an integer")
    return winding, residual


def euler_degree_2d(
    f: DCFunction,
    r: float,
    grid: float = 0.05,
    refine: float = REFINE,
    residual_tol: float = RESIDUAL,
    threads: Optional[int] = None,
) -> EulerResult:
    """chi({f <= r}) as the total winding of the subgradient field along the level loops."""
    loops = level_loops_2d(f, r, grid)
    if not loops.loops:
        return EulerResult(0, [], "degree", r, note=loops.note or "empty level set")
    results = parallel_map(
        lambda lp: loop_winding(f, lp, refine, residual_tol), loops.loops, threads
    )
    windings = [w for w, _ in results]
    chi = int(sum(windings))
    logger.info(f"Degree method: chi={chi} from windings {windings}")
    return EulerResult(chi, windings, "degree", r, [res for _, res in results])


def _face_counts(marked: np.ndarray) -> List[int]:
    """Faces of each dimension of the cubical complex spanned by marked cells."""
    d = marked.ndim
    P = np.pad(marked, 1)
    counts = [0] * (d + 1)
    for S in itertools.product((False, True), repeat=d):
        arr = P
        for axis, along in enumerate(S):
            n = marked.shape[axis]
            if along:
                arr = arr.take(np.arange(1, n + 1), axis=axis)
            else:
                arr = arr.take(np.arange(0, n + 1), axis=axis) | arr.take(
                    np.arange(1, n + 2), axis=axis
                )
        counts[sum(S)] += int(arr.sum())
    return counts


def euler_cubical(
    f: DCFunction,
    r: float,
    grid: float,
    box: Optional[Tuple[ArrayLike, ArrayLike]] = None,
    threads: Optional[int] = None,
) -> EulerResult:
    """
    chi of the cubical complex of grid cells whose center satisfies f <= r.

    In the plane the box defaults to the padded exact bounding box of the
    sublevel set; other dimensions need an explicit box.

    Raises:
        ValidationError: grid <= 0, or no box outside the plane.
        UnboundedSublevelError: a marked cell touches the box boundary.
    """
    if not grid > 0:
        raise ValidationError("grid spacing must be positive")
    if box is None:
        if f.dim != 2:
            raise ValidationError("euler_cubical needs an explicit box outside the plane")
        found = sublevel_box(f, r, pad=2.0 * grid)
        if found is None:
            return EulerResult(0, [0, 0, 0], "cubical", r, note="empty sublevel set")
        lo, hi = found
    else:
        lo = np.asarray(box[0], dtype=float).reshape(-1)
        hi = np.asarray(box[1], dtype=float).reshape(-1)
        if lo.shape[0] != f.dim or hi.shape[0] != f.dim or np.any(hi <= lo):
            raise ValidationError("box does not match the function dimension")

    origin = (np.floor(lo / grid) + GRID_OFFSET) * grid
    shape = tuple(int(n) for n in np.ceil((hi - origin) / grid))
    axes = [origin[k] + (np.arange(shape[k]) + 0.5) * grid for k in range(f.dim)]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.dim)
    parts = parallel_map(
        lambda sl: np.asarray(f(centers[sl]), dtype=float) <= r,
        chunked(len(centers), CHUNK),
        threads,
    )
    marked = np.concatenate(parts).reshape(shape)

    border = np.zeros(shape, dtype=bool)
    for axis in range(f.dim):
        idx = [slice(None)] * f.dim
        idx[axis] = 0
        border[tuple(idx)] = True
        idx[axis] = -1
        border[tuple(idx)] = True
    if np.any(marked & border):
        raise UnboundedSublevelError(r)

    counts = _face_counts(marked)
    chi = int(sum((-1) ** k * c for k, c in enumerate(counts)))
    logger.info(f"Cubical method: chi={chi} with face counts {counts}")
    return EulerResult(chi, counts, "cubical", r)
