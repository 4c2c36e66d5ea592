"""Level-set tracing by marching squares on an offset grid."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.arrangement import sublevel_bbox
from ..core.dc import DCFunction
from ..exceptions import UnboundedSublevelError, UnsupportedDimensionError, ValidationError

logger = logging.getLogger(__name__)

GRID_OFFSET = 0.381966011250105  # 2 - golden ratio
PROBE_RADIUS = 100.0
BISECT_STEPS = 64

EdgeKey = Tuple[str, int, int]


@dataclass
class LevelLoops:
    """Closed polylines of {f = level}; outer loops counterclockwise."""

    loops: List[np.ndarray]
    level: float
    grid: float
    note: str = ""

    def __len__(self) -> int:
        return len(self.loops)


def sublevel_box(
    f: DCFunction, r: float, pad: float = 0.0, probe_radius: float = PROBE_RADIUS
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Exact bounding box of {f <= r}, padded; None if the set is empty.

    Raises:
        UnboundedSublevelError: the set reaches the probe box.
    """
    if f.dim != 2:
        raise UnsupportedDimensionError("sublevel_box", f.dim, "d = 2")
    lo = np.full(2, -probe_radius)
    hi = np.full(2, probe_radius)
    bb = sublevel_bbox(f, r, lo, hi)
    if bb is None:
        return None
    b_lo, b_hi, touches = bb
    if touches:
        raise UnboundedSublevelError(r)
    return b_lo - pad, b_hi + pad


def grid_axis(lo: float, hi: float, h: float) -> np.ndarray:
    """Nodes (floor(lo/h) + i + offset) h covering [lo, hi]."""
    start = math.floor(lo / h)
    count = int(math.ceil((hi - lo) / h)) + 2
    return (start + np.arange(count) + GRID_OFFSET) * h


def _bisect_crossings(
    f: DCFunction, inside: np.ndarray, outside: np.ndarray, r: float
) -> np.ndarray:
    a = inside.copy()
    b = outside.copy()
    for _ in range(BISECT_STEPS):
        mid = 0.5 * (a + b)
        ins = np.asarray(f(mid), dtype=float) <= r
        a[ins] = mid[ins]
        b[~ins] = mid[~ins]
    return 0.5 * (a + b)


def level_loops_2d(
    f: DCFunction, r: float, grid: float = 0.05, probe_radius: float = PROBE_RADIUS
) -> LevelLoops:
    """
    Closed loops approximating {f = r}; inside means f <= r.

    Crossings on grid edges are bisected to |f - r| well below 1e-10. Saddle
    cells are resolved by the value at the cell center. Segments run from the
    exit to the entry crossing of each cell, so the sublevel set is on the
    left of every loop.

    Raises:
        ValidationError: grid <= 0.
        UnboundedSublevelError: {f <= r} not bounded.
    """
    if not grid > 0:
        raise ValidationError("grid spacing must be positive")
    box = sublevel_box(f, r, pad=2.0 * grid, probe_radius=probe_radius)
    if box is None:
        return LevelLoops([], r, grid, note="empty sublevel set")
    lo, hi = box
    xs = grid_axis(lo[0], hi[0], grid)
    ys = grid_axis(lo[1], hi[1], grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    F = np.asarray(f(np.stack([X, Y], axis=-1).reshape(-1, 2)), dtype=float).reshape(X.shape)
    inside = F <= r
    if not inside.any():
        return LevelLoops([], r, grid, note="no grid node below the level")

    nx, ny = inside.shape

    # crossing points per edge key
    keys: List[EdgeKey] = []
    a_pts, b_pts = [], []
    hmask = inside[:-1, :] != inside[1:, :]
    for i, j in zip(*np.nonzero(hmask)):
        p, q = (i, j), (i + 1, j)
        if not inside[p]:
            p, q = q, p
        keys.append(("h", int(i), int(j)))
        a_pts.append((xs[p[0]], ys[p[1]]))
        b_pts.append((xs[q[0]], ys[q[1]]))
    vmask = inside[:, :-1] != inside[:, 1:]
    for i, j in zip(*np.nonzero(vmask)):
        p, q = (i, j), (i, j + 1)
        if not inside[p]:
            p, q = q, p
        keys.append(("v", int(i), int(j)))
        a_pts.append((xs[p[0]], ys[p[1]]))
        b_pts.append((xs[q[0]], ys[q[1]]))
    if not keys:
        return LevelLoops([], r, grid, note="no level crossing on the grid")
    pts = _bisect_crossings(f, np.array(a_pts), np.array(b_pts), r)
    point_of: Dict[EdgeKey, np.ndarray] = dict(zip(keys, pts))

    # cells touching a crossing; corners and edges in counterclockwise order
    cell_mask = hmask[:, :-1] | hmask[:, 1:] | vmask[:-1, :] | vmask[1:, :]
    nxt: Dict[EdgeKey, EdgeKey] = {}
    for i, j in zip(*np.nonzero(cell_mask)):
        corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
        edges: List[EdgeKey] = [("h", i, j), ("v", i + 1, j), ("h", i, j + 1), ("v", i, j)]
        ins = [bool(inside[c]) for c in corners]
        exits, entries = [], []
        for k in range(4):
            a, b = ins[k], ins[(k + 1) % 4]
            if a and not b:
                exits.append(k)
            elif b and not a:
                entries.append(k)
        if len(exits) == 1:
            nxt[_key(edges[exits[0]])] = _key(edges[entries[0]])
            continue
        center = np.array([0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])])
        center_in = float(f(center)) <= r
        for k in exits:
            if center_in:
                partner = min(entries, key=lambda e: (e - k) % 4)
            else:
                partner = min(entries, key=lambda e: (k - e) % 4)
            nxt[_key(edges[k])] = _key(edges[partner])

    loops: List[np.ndarray] = []
    seen = set()
    for start in sorted(nxt):
        if start in seen:
            continue
        chain = [start]
        seen.add(start)
        cur = nxt[start]
        while cur != start:
            if cur in seen or cur not in nxt:
                raise ValidationError("level curve tracing produced an open chain")
            chain.append(cur)
            seen.add(cur)
            cur = nxt[cur]
        loop = np.array([point_of[k] for k in chain] + [point_of[start]])
        loops.append(loop)

    logger.info(f"Traced {len(loops)} level loop(s) at r={r} on a {nx}x{ny} grid")
    return LevelLoops(loops, r, grid)


def _key(edge: EdgeKey) -> EdgeKey:
    return (edge[0], int(edge[1]), int(edge[2]))
