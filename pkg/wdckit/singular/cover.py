"""Segment covers of singular sets and aura boundaries in the plane."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..aura.regularity import check_weak_regularity
from ..core.affine import ArrayLike, MaxAffine
from ..core.arrangement import Cell, as_box, max_affine_cells, overlay_cells, strata
from ..core.dc import DCFunction
from ..core.polytope import VPolytope
from ..exceptions import ConsistencyError, UnsupportedDimensionError, ValidationError
from ..topology.level import level_loops_2d, sublevel_box
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

LINE_TOL = 1e-9
LEVEL_PROBE = 1e-7
PROBE_GRID = 0.05
BOX_PAD = 0.5

Pair = Tuple[int, int]


@dataclass
class SegmentCover:
    """
    Finitely many segments (p, q), zero-length for isolated points, each
    with the piece pairs whose seam carries it.
    """

    segments: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    provenance: List[Tuple[Pair, ...]] = field(default_factory=list)
    clipped: bool = False
    note: str = ""

    def __len__(self) -> int:
        return len(self.segments)

    def lengths(self) -> np.ndarray:
        return np.array([float(np.linalg.norm(q - p)) for p, q in self.segments])

    def proper(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Segments of positive length."""
        return [s for s, n in zip(self.segments, self.lengths()) if n > 0]

    def points(self) -> List[np.ndarray]:
        """Zero-length segments, as points."""
        return [p for (p, _), n in zip(self.segments, self.lengths()) if n == 0]

    def distance(self, points: ArrayLike) -> np.ndarray:
        """Euclidean distance from each point to the nearest segment (inf if empty)."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if not self.segments:
            return np.full(len(P), np.inf)
        best = np.full(len(P), np.inf)
        for p, q in self.segments:
            d = q - p
            L2 = float(d @ d)
            t = np.zeros(len(P)) if L2 == 0 else np.clip(((P - p) @ d) / L2, 0.0, 1.0)
            best = np.minimum(best, np.linalg.norm(P - (p + t[:, None] * d), axis=1))
        return best

    def contains(self, point: ArrayLike, tol: float = 1e-9) -> bool:
        return bool(self.distance(point)[0] <= tol)


def _line_in_polygon(
    poly: np.ndarray, n: np.ndarray, c: float
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Extreme points of {n.x = c} within a convex polygon."""
    tol = 1e-12 * max(1.0, float(np.abs(poly).max())) * max(1.0, float(np.abs(n).max()))
    s = poly @ n - c
    s[np.abs(s) <= tol] = 0.0
    m = len(poly)
    pts = [poly[k] for k in range(m) if s[k] == 0.0]
    for k in range(m):
        a, b = s[k], s[(k + 1) % m]
        if a * b < 0:
            t = a / (a - b)
            pts.append(poly[k] + t * (poly[(k + 1) % m] - poly[k]))
    if not pts:
        return None
    P = np.array(pts)
    d = np.array([-n[1], n[0]])
    proj = P @ d
    return P[int(np.argmin(proj))], P[int(np.argmax(proj))]


def merge_collinear(
    segments: Sequence[Tuple[np.ndarray, np.ndarray]],
    provenance: Sequence[Tuple[Pair, ...]],
    tol: float,
) -> Tuple[List[Tuple[np.ndarray, np.ndarray]], List[Tuple[Pair, ...]]]:
    """Merge contiguous collinear segments, pooling their provenance."""
    groups: List[Tuple[np.ndarray, float, List[int]]] = []
    for k, (p, q) in enumerate(segments):
        d = q - p
        L = float(np.linalg.norm(d))
        if L == 0:
            continue
        d = d / L
        if d[0] < 0 or (d[0] == 0 and d[1] < 0):
            d = -d
        c = float(np.array([-d[1], d[0]]) @ p)
        for gd, gc, members in groups:
            if np.abs(gd - d).max() <= LINE_TOL and abs(gc - c) <= tol:
                members.append(k)
                break
        else:
            groups.append((d, c, [k]))

    out_s: List[Tuple[np.ndarray, np.ndarray]] = []
    out_p: List[Tuple[Pair, ...]] = []
    for d, _, members in groups:
        spans = []
        for k in members:
            p, q = segments[k]
            a, b = (p, q) if p @ d <= q @ d else (q, p)
            spans.append((float(a @ d), float(b @ d), a, b, k))
        spans.sort(key=lambda s: (s[0], s[1]))
        cur = list(spans[0])
        pairs = set(provenance[cur[4]])
        for s in spans[1:]:
            if s[0] <= cur[1] + tol:
                if s[1] > cur[1]:
                    cur[1], cur[3] = s[1], s[3]
                pairs.update(provenance[s[4]])
                continue
            out_s.append((cur[2], cur[3]))
            out_p.append(tuple(sorted(pairs)))
            cur = list(s)
            pairs = set(provenance[s[4]])
        out_s.append((cur[2], cur[3]))
        out_p.append(tuple(sorted(pairs)))
    return out_s, out_p


def _on_box(p: np.ndarray, lo: np.ndarray, hi: np.ndarray, tol: float) -> bool:
    return bool(np.any(np.abs(p - lo) <= tol) or np.any(np.abs(p - hi) <= tol))


def _assemble(
    segs: List[Tuple[np.ndarray, np.ndarray]],
    prov: List[Tuple[Pair, ...]],
    points: List[Tuple[np.ndarray, Tuple[Pair, ...]]],
    lo: np.ndarray,
    hi: np.ndarray,
    keep_covered_points: bool,
) -> SegmentCover:
    tol = LINE_TOL * float((hi - lo).max())
    merged, pairs = merge_collinear(segs, prov, tol)
    cover = SegmentCover(list(merged), list(pairs))
    proper = SegmentCover(list(merged), list(pairs))
    for pt, pp in points:
        if not keep_covered_points and proper.contains(pt, tol):
            continue
        twin = next(
            (
                k
                for k in range(len(merged), len(cover.segments))
                if np.abs(cover.segments[k][0] - pt).max() <= tol
            ),
            None,
        )
        if twin is not None:
            cover.provenance[twin] = tuple(sorted(set(cover.provenance[twin]) | set(pp)))
            continue
        cover.segments.append((pt, pt.copy()))
        cover.provenance.append(pp)
    cover.clipped = any(
        _on_box(p, lo, hi, tol) or _on_box(q, lo, hi, tol) for p, q in cover.segments
    )
    if cover.clipped:
        cover.note = "seams clipped to the box"
    return cover


def _box(box: Tuple[ArrayLike, ArrayLike]) -> Tuple[np.ndarray, np.ndarray]:
    return as_box(box[0], box[1])


def singular_set_pwa_2d(
    g: MaxAffine, eps: float, box: Tuple[ArrayLike, ArrayLike], threads: Optional[int] = None
) -> SegmentCover:
    """
    Seams and vertices of a planar max-affine function where the Clarke hull
    has diameter > eps, clipped to the box.

    Contiguous collinear seams are merged. Vertices where three or more pieces
    meet and the condition holds are reported as zero-length segments.
    """
    if g.dim != 2:
        raise UnsupportedDimensionError("singular_set_pwa_2d", g.dim, "d = 2")
    if not eps > 0:
        raise ValidationError("eps must be positive")
    lo, hi = _box(box)
    cells = [
        Cell(i, 0, poly, g.A[i].copy(), float(g.b[i])) for i, poly in max_affine_cells(g, lo, hi)
    ]
    found = [s for s in strata(cells, lo, hi) if s.kind != "cell" and not s.on_boundary]
    diams = parallel_map(lambda s: s.hull(cells).diameter(), found, threads)

    segs, prov, points = [], [], []
    for s, diam in zip(found, diams):
        if not diam > eps:
            continue
        pieces = sorted({cells[k].gi for k in s.incident})
        if s.kind == "vertex" and len(pieces) < 3:
            continue
        pairs = tuple((a, b) for i, a in enumerate(pieces) for b in pieces[i + 1:])
        if s.kind == "edge":
            segs.append((s.geometry[0].copy(), s.geometry[1].copy()))
            prov.append(pairs)
        else:
            points.append((s.point.copy(), pairs))
    cover = _assemble(segs, prov, points, lo, hi, keep_covered_points=True)
    logger.info(f"Singular set at eps={eps}: {len(cover)} segment(s)")
    return cover


def _large_vertex(hull: VPolytope, eps: float) -> bool:
    return bool(np.linalg.norm(hull.vertices, axis=1).max() > eps)


def zero_set_large_subdiff_2d(
    f: DCFunction, eps: float, box: Tuple[ArrayLike, ArrayLike]
) -> SegmentCover:
    """
    Points of {f = 0} in the box whose Clarke hull has a vertex of norm > eps.

    On each cell f is affine, so its zero set there is a segment of the line
    grad.x + offset = 0; edges and vertices on which f vanishes are added
    when their hull qualifies. Points already on a segment are dropped.
    """
    if f.dim != 2:
        raise UnsupportedDimensionError("zero_set_large_subdiff_2d", f.dim, "d = 2")
    if not eps > 0:
        raise ValidationError("eps must be positive")
    lo, hi = _box(box)
    cells = overlay_cells(f, lo, hi)
    scale = 1.0 + float(np.abs(np.concatenate([lo, hi])).max()) * (1.0 + f.lipschitz())
    ztol = 1e-12 * scale

    segs, prov, points = [], [], []
    for cell in cells:
        if not np.linalg.norm(cell.grad) > eps:
            continue
        hit = _line_in_polygon(cell.polygon, cell.grad, -cell.offset)
        if hit is None:
            continue
        p, q = hit
        if np.linalg.norm(q - p) > 0:
            segs.append((p, q))
            prov.append(((cell.gi, cell.hj),))
        else:
            points.append((p, ((cell.gi, cell.hj),)))

    for s in strata(cells, lo, hi):
        if s.kind == "cell" or s.on_boundary:
            continue
        v_lo, v_hi = s.value_range(cells)
        if abs(v_lo) > ztol or abs(v_hi) > ztol or not _large_vertex(s.hull(cells), eps):
            continue
        pairs = tuple(
            sorted({(cells[k].gi, cells[k].hj) for k in s.incident if cells[k].grad.any()})
        )
        if s.kind == "edge":
            segs.append((s.geometry[0].copy(), s.geometry[1].copy()))
            prov.append(pairs)
        else:
            points.append((s.point.copy(), pairs))
    cover = _assemble(segs, prov, points, lo, hi, keep_covered_points=False)
    logger.info(f"Zero-set cover at eps={eps}: {len(cover)} segment(s)")
    return cover


def boundary_cover_2d(
    f: DCFunction,
    box: Optional[Tuple[ArrayLike, ArrayLike]] = None,
    grid: float = PROBE_GRID,
    threads: Optional[int] = None,
) -> SegmentCover:
    """
    Cover of the boundary of {f <= 0} for a planar aura: the zero-set cover at
    half the weak-regularity margin, checked against the level loops of
    f = 1e-7, which must lie within 10 * 1e-7 / margin of the cover.

    Raises:
        ValidationError: f is not an aura (margin 0).
        UnboundedSublevelError: {f <= 0} is unbounded.
        ConsistencyError: a traced level point is far from the cover.
    """
    if f.dim != 2:
        raise UnsupportedDimensionError("boundary_cover_2d", f.dim, "d = 2")
    report = check_weak_regularity(f, 0.0, threads=threads)
    if not report.margin > 0:
        raise ValidationError(f"not an aura: weak-regularity margin is {report.margin}")
    margin = report.margin if math.isfinite(report.margin) else f.lipschitz()
    if box is None:
        found = sublevel_box(f, 0.0, pad=BOX_PAD)
        if found is None:
            raise ValidationError("the zero set is empty")
        box = found
    cover = zero_set_large_subdiff_2d(f, 0.5 * margin, box)

    loops = level_loops_2d(f, LEVEL_PROBE, grid)
    reach = 10.0 * LEVEL_PROBE / margin + 1e-9
    for loop in loops.loops:
        far = cover.distance(loop) > reach
        if far.any():
            bad = loop[int(np.argmax(far))]
            raise ConsistencyError(f"level point {bad.tolist()} is not covered within {reach:.3g}")
    if not loops.loops:
        cover.note = (cover.note + "; " if cover.note else "") + "no level loop to probe"
    return cover
