"""Planar arrangement engine for polyhedral DC functions.

Cells are convex polygons obtained by Sutherland-Hodgman clipping of a
bounding box against the half-planes that make one g-piece and one h-piece
maximal. Strata (open cells, open edges split at every vertex, vertices)
carry the indices of the cells whose closure contains them, so the Clarke
hull on a stratum is the hull of those cells' gradients.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..exceptions import UnsupportedDimensionError, ValidationError
from .affine import ArrayLike, MaxAffine
from .dc import DCFunction
from .polytope import VPolytope

logger = logging.getLogger(__name__)

AREA_TOL = 1e-12  # relative to box area
SNAP_TOL = 1e-9  # relative to box size


def as_box(lo: ArrayLike, hi: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    lo_a = np.asarray(lo, dtype=float).reshape(-1)
    hi_a = np.asarray(hi, dtype=float).reshape(-1)
    if lo_a.shape != (2,) or hi_a.shape != (2,) or np.any(hi_a <= lo_a):
        raise ValidationError(f"invalid planar box {lo_a.tolist()} .. {hi_a.tolist()}")
    return lo_a, hi_a


def box_polygon(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]], dtype=float)


def polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(poly: np.ndarray) -> np.ndarray:
    area = polygon_area(poly)
    if abs(area) < 1e-300:
        return poly.mean(axis=0)
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6.0 * area)


def _dedupe_ring(pts: List[np.ndarray], eps: float) -> np.ndarray:
    out: List[np.ndarray] = []
    for p in pts:
        if not out or np.abs(p - out[-1]).max() > eps:
            out.append(p)
    while len(out) > 1 and np.abs(out[0] - out[-1]).max() <= eps:
        out.pop()
    return np.array(out) if out else np.zeros((0, 2))


def clip_halfplane(poly: np.ndarray, n: np.ndarray, c: float) -> np.ndarray:
    """Clip a convex CCW polygon to {x : n.x <= c}."""
    m = len(poly)
    if m == 0:
        return poly
    scale = max(1.0, float(np.abs(poly).max())) * max(1.0, float(np.abs(n).max()))
    eps = 1e-13 * scale
    s = poly @ n - c
    s[np.abs(s) <= eps] = 0.0
    if np.all(s <= 0):
        return poly
    if np.all(s > 0):
        return np.zeros((0, 2))
    out: List[np.ndarray] = []
    for k in range(m):
        p, q = poly[k], poly[(k + 1) % m]
        sp, sq = s[k], s[(k + 1) % m]
        if sp <= 0:
            out.append(p)
        if (sp < 0 < sq) or (sq < 0 < sp):
            t = sp / (sp - sq)
            out.append(p + t * (q - p))
    return _dedupe_ring(out, eps)


def clip_convex(poly: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Intersection of two convex CCW polygons."""
    out = poly
    m = len(other)
    for k in range(m):
        if len(out) == 0:
            break
        q0, q1 = other[k], other[(k + 1) % m]
        e = q1 - q0
        n = np.array([e[1], -e[0]])
        out = clip_halfplane(out, n, float(n @ q0))
    return out


def max_affine_cells(m: MaxAffine, lo: np.ndarray, hi: np.ndarray) -> List[Tuple[int, np.ndarray]]:
    """Polygons (within the box) where each piece of m is maximal, positive area only."""
    if m.dim != 2:
        raise UnsupportedDimensionError("planar arrangement", m.dim, "d = 2")
    base = box_polygon(lo, hi)
    min_area = AREA_TOL * float(np.prod(hi - lo))
    cells = []
    for i in range(len(m)):
        poly = base
        for j in range(len(m)):
            if j == i:
                continue
            n = m.A[j] - m.A[i]
            c = float(m.b[i] - m.b[j])
            if not n.any():
                if c < 0:
                    poly = np.zeros((0, 2))
                    break
                continue
            poly = clip_halfplane(poly, n, c)
            if len(poly) == 0:
                break
        if len(poly) >= 3 and polygon_area(poly) > min_area:
            cells.append((i, poly))
    return cells


@dataclass(frozen=True, eq=False)
class Cell:
    """Region where g-piece gi and h-piece hj are both maximal; f is affine there."""

    gi: int
    hj: int
    polygon: np.ndarray
    grad: np.ndarray
    offset: float

    def value(self, pts: ArrayLike) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.grad + self.offset

    @property
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.polygon.min(axis=0), self.polygon.max(axis=0)


def overlay_cells(f: DCFunction, lo: ArrayLike, hi: ArrayLike) -> List[Cell]:
    """All joint-activity cells of f = g - h inside the box."""
    lo_a, hi_a = as_box(lo, hi)
    if f.dim != 2:
        raise UnsupportedDimensionError("planar arrangement", f.dim, "d = 2")
    g_cells = max_affine_cells(f.g, lo_a, hi_a)
    h_cells = max_affine_cells(f.h, lo_a, hi_a)
    min_area = AREA_TOL * float(np.prod(hi_a - lo_a))

    h_boxes = [(Q.min(axis=0), Q.max(axis=0)) for _, Q in h_cells]
    cells: List[Cell] = []
    for i, P in g_cells:
        p_lo, p_hi = P.min(axis=0), P.max(axis=0)
        for (j, Q), (q_lo, q_hi) in zip(h_cells, h_boxes):
            if np.any(p_hi < q_lo) or np.any(q_hi < p_lo):
                continue
            R = clip_convex(P, Q)
            if len(R) >= 3 and polygon_area(R) > min_area:
                cells.append(
                    Cell(i, j, R, f.g.A[i] - f.h.A[j], float(f.g.b[i] - f.h.b[j]))
                )
    logger.debug(
        f"Overlay: {len(g_cells)} g-cells x {len(h_cells)} h-cells -> {len(cells)} joint cells"
    )
    return cells


def common_refinement(
    first: Sequence[Cell], second: Sequence[Cell], lo: ArrayLike, hi: ArrayLike
) -> List[Cell]:
    """
    Pairwise intersections of two cell lists over the same box.

    The returned cells carry indices into first and second in place of
    piece indices, and the gradient and offset of the sum of both functions.
    """
    lo_a, hi_a = as_box(lo, hi)
    min_area = AREA_TOL * float(np.prod(hi_a - lo_a))
    out: List[Cell] = []
    for ia, ca in enumerate(first):
        a_lo, a_hi = ca.bounds
        for ib, cb in enumerate(second):
            b_lo, b_hi = cb.bounds
            if np.any(a_hi < b_lo) or np.any(b_hi < a_lo):
                continue
            R = clip_convex(ca.polygon, cb.polygon)
            if len(R) >= 3 and polygon_area(R) > min_area:
                out.append(Cell(ia, ib, R, ca.grad + cb.grad, ca.offset + cb.offset))
    return out


@dataclass(frozen=True, eq=False)
class Stratum:
    """An open cell, open edge or vertex of the arrangement."""

    kind: str
    point: np.ndarray
    incident: Tuple[int, ...]
    geometry: np.ndarray
    on_boundary: bool = False

    def hull(self, cells: Sequence[Cell]) -> VPolytope:
        """Clarke hull on the stratum: hull of incident cell gradients."""
        return VPolytope(np.array([cells[k].grad for k in self.incident])).pruned()

    def value_range(self, cells: Sequence[Cell]) -> Tuple[float, float]:
        """Closed range of f over the stratum closure (f is affine on it)."""
        vals = cells[self.incident[0]].value(self.geometry)
        return float(vals.min()), float(vals.max())


@dataclass
class _EdgeAcc:
    a: int
    b: int
    incident: set = field(default_factory=set)


def strata(cells: Sequence[Cell], lo: ArrayLike, hi: ArrayLike) -> List[Stratum]:
    """
    Enumerate cells, edges (split at every vertex) and vertices.

    Args:
        cells: Output of overlay_cells for the same box.
        lo, hi: The box corners.
    """
    lo_a, hi_a = as_box(lo, hi)
    snap = SNAP_TOL * float((hi_a - lo_a).max())
    if not cells:
        return []

    raw = np.vstack([c.polygon for c in cells])
    tree = cKDTree(raw)
    parent = np.arange(len(raw))

    def find(k: int) -> int:
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for a, b in sorted(tree.query_pairs(snap)):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(k) for k in range(len(raw))])
    uniq, vid_of_raw = np.unique(roots, return_inverse=True)
    V = raw[uniq]

    edges: Dict[Tuple[int, int], _EdgeAcc] = {}
    vertex_cells: Dict[int, set] = {}
    offset = 0
    for ci, cell in enumerate(cells):
        m = len(cell.polygon)
        ids = vid_of_raw[offset:offset + m]
        offset += m
        for k in range(m):
            u, w = int(ids[k]), int(ids[(k + 1) % m])
            if u == w:
                continue
            p, q = V[u], V[w]
            d = q - p
            L2 = float(d @ d)
            t = ((V - p) @ d) / L2
            perp = np.abs((V[:, 0] - p[0]) * d[1] - (V[:, 1] - p[1]) * d[0]) / np.sqrt(L2)
            inner = np.flatnonzero((perp <= snap) & (t > 0) & (t < 1))
            inner = [int(z) for z in inner if z not in (u, w)]
            chain = [u] + sorted(inner, key=lambda z: t[z]) + [w]
            for z in chain:
                vertex_cells.setdefault(z, set()).add(ci)
            for a, b in zip(chain[:-1], chain[1:]):
                key = (min(a, b), max(a, b))
                acc = edges.setdefault(key, _EdgeAcc(key[0], key[1]))
                acc.incident.add(ci)

    def on_box(pt: np.ndarray) -> bool:
        return bool(np.any(np.abs(pt - lo_a) <= snap) or np.any(np.abs(pt - hi_a) <= snap))

    def same_side(p: np.ndarray, q: np.ndarray) -> bool:
        for axis in range(2):
            for bound in (lo_a[axis], hi_a[axis]):
                if abs(p[axis] - bound) <= snap and abs(q[axis] - bound) <= snap:
                    return True
        return False

    out: List[Stratum] = []
    for ci, cell in enumerate(cells):
        out.append(Stratum("cell", polygon_centroid(cell.polygon), (ci,), cell.polygon, False))
    for key in sorted(edges):
        acc = edges[key]
        seg = np.array([V[acc.a], V[acc.b]])
        out.append(
            Stratum("edge", seg.mean(axis=0), tuple(sorted(acc.incident)), seg, same_side(*seg))
        )
    for vid in sorted(vertex_cells):
        pt = V[vid]
        out.append(
            Stratum("vertex", pt, tuple(sorted(vertex_cells[vid])), pt[None, :], on_box(pt))
        )
    return out


def sublevel_pieces(cells: Sequence[Cell], c: float) -> List[np.ndarray]:
    """Per-cell parts of {f <= c}; degenerate parts (segments, points) are kept."""
    parts = []
    for cell in cells:
        n = cell.grad
        if not n.any():
            if cell.offset <= c:
                parts.append(cell.polygon)
            continue
        piece = clip_halfplane(cell.polygon, n, c - cell.offset)
        if len(piece):
            parts.append(piece)
    return parts


def sublevel_bbox(
    f: DCFunction, c: float, lo: ArrayLike, hi: ArrayLike, cells: Optional[Sequence[Cell]] = None
) -> Optional[Tuple[np.ndarray, np.ndarray, bool]]:
    """
    Exact bounding box of {f <= c} within the box.

    Returns:
        (lo, hi, touches_box) or None when the sublevel set misses the box.
    """
    lo_a, hi_a = as_box(lo, hi)
    if cells is None:
        cells = overlay_cells(f, lo_a, hi_a)
    parts = sublevel_pieces(cells, c)
    if not parts:
        return None
    pts = np.vstack(parts)
    snap = SNAP_TOL * float((hi_a - lo_a).max())
    touches = bool(np.any(pts <= lo_a + snap) or np.any(pts >= hi_a - snap))
    return pts.min(axis=0), pts.max(axis=0), touches
