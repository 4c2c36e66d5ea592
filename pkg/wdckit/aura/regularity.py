"""Weak-regularity margins of DC auras."""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.affine import ArrayLike
from ..core.arrangement import Cell, Stratum, overlay_cells, strata, sublevel_bbox, sublevel_pieces
from ..core.dc import DCFunction
from ..core.polytope import min_norm_point
from ..core.sampling import SamplingPlan
from ..core.subdiff import ACTIVITY_TOL, CLARKE_MAX_DIM, subdiff
from ..exceptions import UnboundedSublevelError, ValidationError
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

MODES = ("exact-pwa-2d", "sampled")
PROBE_RADIUS = 100.0
VIOLATION_THRESHOLD = 1e-6
FACE_PROBES = 64


@dataclass(frozen=True)
class AuraReport:
    """Margin of weak regularity of f at level c over the shell c < f < c + shell_width."""

    level: float
    shell_width: float
    samples: int
    margin: float
    mode: str
    violations: Tuple[Tuple[float, ...], ...] = ()
    witness: Optional[Tuple[float, ...]] = None
    note: str = ""

    @property
    def regular(self) -> bool:
        return self.margin > 0 and not self.violations


def scaled_report(report: AuraReport, lam: float) -> AuraReport:
    """Report for lam * f at level lam * c with shell lam * eps (lam > 0)."""
    if not lam > 0:
        raise ValidationError("scaling factor must be positive")
    return replace(
        report,
        level=lam * report.level,
        shell_width=lam * report.shell_width,
        margin=lam * report.margin,
    )


def _meets_shell(lo: float, hi: float, c: float, top: float) -> bool:
    if hi - lo <= 1e-15 * (1.0 + abs(hi)):
        return c < lo < top
    return max(lo, c) < min(hi, top)


def shell_strata(
    f: DCFunction,
    c: float,
    eps_probe: float,
    lo: ArrayLike,
    hi: ArrayLike,
    cells: Optional[Sequence[Cell]] = None,
    threads: Optional[int] = None,
) -> List[Tuple[Stratum, float]]:
    """
    Strata of the planar arrangement meeting the open shell, each with the
    norm of the min-norm point of its Clarke hull.

    Strata lying on the box boundary are skipped: their incident cells are
    cut off by the box.
    """
    if cells is None:
        cells = overlay_cells(f, lo, hi)
    top = c + eps_probe
    hits = [
        s
        for s in strata(cells, lo, hi)
        if not s.on_boundary and _meets_shell(*s.value_range(cells), c, top)
    ]

    def norm_of(s: Stratum) -> float:
        return float(np.linalg.norm(min_norm_point(s.hull(cells))))

    norms = parallel_map(norm_of, hits, threads)
    return list(zip(hits, norms))


def _probe_box(dim: int, radius: float) -> Tuple[np.ndarray, np.ndarray]:
    return np.full(dim, -radius), np.full(dim, radius)


def _boundary_witness(f: DCFunction, c: float, radius: float) -> Optional[np.ndarray]:
    """A point of the probe-box boundary with f <= c, if sampling finds one."""
    d = f.dim
    corners = np.array(np.meshgrid(*[[-radius, radius]] * d)).reshape(d, -1).T
    faces = [corners]
    if d > 1:
        inner = SamplingPlan.centered(d - 1, radius, FACE_PROBES).points()
        for axis in range(d):
            for side in (-radius, radius):
                pts = np.insert(inner, axis, side, axis=1)
                faces.append(pts)
    pts = np.vstack(faces)
    vals = np.asarray(f(pts), dtype=float)
    bad = np.flatnonzero(vals <= c)
    return pts[bad[0]] if bad.size else None


def check_weak_regularity(
    f: DCFunction,
    c: float = 0.0,
    eps_probe: float = 0.1,
    plan: Optional[SamplingPlan] = None,
    mode: Optional[str] = None,
    window: Optional[Tuple[ArrayLike, ArrayLike]] = None,
    probe_radius: float = PROBE_RADIUS,
    threshold: float = VIOLATION_THRESHOLD,
    tol: float = ACTIVITY_TOL,
    threads: Optional[int] = None,
) -> AuraReport:
    """
    Smallest min-norm Clarke subgradient over the shell {c < f < c + eps_probe}.

    Args:
        f: Polyhedral DC function.
        c: Level.
        eps_probe: Shell width.
        plan: Sample points for the sampled mode.
        mode: "exact-pwa-2d" (default for d = 2) or "sampled".
        window: Restrict the search to this box; skips the boundedness probe.
        probe_radius: Half-width of the boundedness probe box.
        threshold: Min-norm values below this are reported as violations.
        tol: Activity tolerance for the sampled mode.
        threads: Worker cap.

    Raises:
        ValidationError: eps_probe <= 0, unknown mode, or an empty sublevel set.
        UnboundedSublevelError: the sublevel set reaches the probe box.
    """
    if not eps_probe > 0:
        raise ValidationError("shell width must be positive")
    if mode is None:
        mode = "exact-pwa-2d" if f.dim == 2 else "sampled"
    if mode not in MODES:
        raise ValidationError(f"unknown regularity mode {mode!r}; expected one of {MODES}")

    if window is not None:
        lo = np.asarray(window[0], dtype=float)
        hi = np.asarray(window[1], dtype=float)
    else:
        lo, hi = _probe_box(f.dim, probe_radius)

    if mode == "exact-pwa-2d":
        return _exact_2d(f, c, eps_probe, lo, hi, window is not None, threshold, threads)
    return _sampled(f, c, eps_probe, plan, lo, hi, window is not None, threshold, tol, threads)


def _exact_2d(
    f: DCFunction,
    c: float,
    eps_probe: float,
    lo: np.ndarray,
    hi: np.ndarray,
    windowed: bool,
    threshold: float,
    threads: Optional[int],
) -> AuraReport:
    if f.dim != 2:
        raise ValidationError("exact-pwa-2d mode needs a planar function")
    cells = overlay_cells(f, lo, hi)
    if not windowed:
        level = c
        bbox = sublevel_bbox(f, c, lo, hi, cells)
        if bbox is None:
            # nothing below c; the shell can still meet {f <= c + eps}
            level = c + eps_probe
            bbox = sublevel_bbox(f, level, lo, hi, cells)
        if bbox is None:
            logger.info(f"Empty shell ({c}, {c + eps_probe}); margin reported as infinite")
            return AuraReport(c, eps_probe, 0, math.inf, "exact-pwa-2d", note="empty shell")
        if bbox[2]:
            pts = np.vstack(sublevel_pieces(cells, level))
            on_edge = np.any((pts <= lo + 1e-9) | (pts >= hi - 1e-9), axis=1)
            raise UnboundedSublevelError(c, pts[np.flatnonzero(on_edge)[0]].tolist())

    hits = shell_strata(f, c, eps_probe, lo, hi, cells, threads)
    if not hits:
        logger.info(f"Empty shell ({c}, {c + eps_probe}); margin reported as infinite")
        return AuraReport(c, eps_probe, 0, math.inf, "exact-pwa-2d", note="empty shell")

    norms = np.array([n for _, n in hits])
    best = int(np.argmin(norms))
    violations = tuple(
        tuple(float(v) for v in s.point) for s, n in hits if n < threshold
    )
    margin = float(norms[best])
    logger.info(f"Exact margin {margin:.6g} over {len(hits)} strata")
    return AuraReport(
        level=c,
        shell_width=eps_probe,
        samples=len(hits),
        margin=margin,
        mode="exact-pwa-2d",
        violations=violations,
        witness=tuple(float(v) for v in hits[best][0].point),
    )


def _sampled(
    f: DCFunction,
    c: float,
    eps_probe: float,
    plan: Optional[SamplingPlan],
    lo: np.ndarray,
    hi: np.ndarray,
    windowed: bool,
    threshold: float,
    tol: float,
    threads: Optional[int],
) -> AuraReport:
    if not windowed:
        witness = _boundary_witness(f, c, float(hi[0]))
        if witness is not None:
            raise UnboundedSublevelError(c, witness.tolist())
    if plan is None:
        plan = SamplingPlan(lo, hi)
        pts = plan.points()
        near = pts[np.asarray(f(pts), dtype=float) < c + eps_probe]
        if len(near):
            # zoom onto the region below the shell top
            span = np.maximum(near.max(axis=0) - near.min(axis=0), 1e-6)
            box_lo = np.maximum(near.min(axis=0) - 0.1 * span - (hi - lo) / 64, lo)
            box_hi = np.minimum(near.max(axis=0) + 0.1 * span + (hi - lo) / 64, hi)
            plan = SamplingPlan(box_lo, box_hi, plan.count, plan.seed)
    elif plan.dim != f.dim:
        raise ValidationError(f"sampling plan of dimension {plan.dim} for a {f.dim}-d function")

    pts = plan.points()
    vals = np.asarray(f(pts), dtype=float)
    shell = pts[(vals > c) & (vals < c + eps_probe)]
    if len(shell) == 0:
        return AuraReport(c, eps_probe, 0, math.inf, "sampled", note="empty shell")

    sub_mode = "clarke" if f.dim <= CLARKE_MAX_DIM else "outer"

    def norm_at(x: np.ndarray) -> float:
        return float(np.linalg.norm(min_norm_point(subdiff(f, x, sub_mode, tol).hull)))

    norms = np.array(parallel_map(norm_at, list(shell), threads))
    best = int(np.argmin(norms))
    violations = tuple(tuple(float(v) for v in x) for x, n in zip(shell, norms) if n < threshold)
    note = "" if sub_mode == "clarke" else "outer estimate of the Clarke hull"
    logger.info(f"Sampled margin {norms[best]:.6g} over {len(shell)} shell samples")
    return AuraReport(
        level=c,
        shell_width=eps_probe,
        samples=int(len(shell)),
        margin=float(norms[best]),
        mode="sampled",
        violations=violations,
        witness=tuple(float(v) for v in shell[best]),
        note=note,
    )
