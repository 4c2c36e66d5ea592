"""Deterministic SVG plots of loops, traces, sectors, covers and fractal approximations."""

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..core.affine import ArrayLike  # noqa: E402
from ..fractal.ifs import FractalApprox  # noqa: E402
from ..planar.model import PlanarLocalModel  # noqa: E402
from ..planar.sectors import gauge_crossing  # noqa: E402
from ..retraction.flow import RetractionTrace  # noqa: E402
from ..singular.cover import SegmentCover  # noqa: E402
from ..topology.level import LevelLoops  # noqa: E402

logger = logging.getLogger(__name__)

HASH_SALT = "wdckit"
FIGSIZE = (5.0, 5.0)
ARC_POINTS = 181

PathLike = Union[str, Path]


def _save(fig: "plt.Figure", path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": HASH_SALT, "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"Wrote {path}")
    return path


def _axes(title: str) -> Tuple["plt.Figure", "plt.Axes"]:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.set_aspect("equal")
    ax.set_title(title)
    return fig, ax


def render_loops(loops: LevelLoops, path: PathLike) -> Path:
    fig, ax = _axes(f"level {loops.level:g}")
    for k, loop in enumerate(loops.loops):
        closed = np.vstack([loop, loop[:1]])
        ax.plot(closed[:, 0], closed[:, 1], lw=1.0, label=f"loop {k}")
    if loops.loops:
        ax.legend(loc="upper right", fontsize="small")
    return _save(fig, path)


def render_traces(
    traces: Sequence[RetractionTrace], path: PathLike, loops: Optional[LevelLoops] = None
) -> Path:
    """Planar traces, start points hollow and endpoints filled, over optional level loops."""
    fig, ax = _axes("retraction")
    if loops is not None:
        for loop in loops.loops:
            closed = np.vstack([loop, loop[:1]])
            ax.plot(closed[:, 0], closed[:, 1], color="0.6", lw=0.8)
    for trace in traces:
        P = trace.points
        ax.plot(P[:, 0], P[:, 1], lw=0.8)
        ax.plot(*P[0], marker="o", mfc="none", color="k", ms=3)
        ax.plot(*P[-1], marker="o", color="k", ms=3)
    return _save(fig, path)


def render_sectors(M: PlanarLocalModel, path: PathLike) -> Path:
    """Boundary branches of the model inside its ball, with the ball outline."""
    fig, ax = _axes(M.kind)
    base = np.asarray(M.base)
    theta = np.linspace(0.0, 2.0 * np.pi, ARC_POINTS)
    ax.plot(base[0] + M.radius * np.cos(theta), base[1] + M.radius * np.sin(theta), color="0.7")
    ax.plot(*base, marker="o", color="k", ms=3)
    for b in M.branches():
        t_end = gauge_crossing(b.fn, M.radius, "right")
        ts = np.linspace(0.0, t_end, ARC_POINTS)
        W = b.world(ts, base)
        style = {"on": "-", "above": "--", "below": ":"}[b.side]
        ax.plot(W[:, 0], W[:, 1], style, lw=1.2)
    return _save(fig, path)


def render_cover(
    cover: SegmentCover, path: PathLike, box: Optional[Tuple[ArrayLike, ArrayLike]] = None
) -> Path:
    fig, ax = _axes(f"{len(cover)} segment(s)")
    if box is not None:
        lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
        rect = np.array([lo, [hi[0], lo[1]], hi, [lo[0], hi[1]], lo])
        ax.plot(rect[:, 0], rect[:, 1], color="0.7")
    for p, q in cover.segments:
        if np.array_equal(p, q):
            ax.plot(*p, marker="o", color="C3", ms=4)
        else:
            ax.plot([p[0], q[0]], [p[1], q[1]], color="C0", lw=1.5)
    return _save(fig, path)


def render_fractal(approx: FractalApprox, path: PathLike, hull: Optional[ArrayLike] = None) -> Path:
    fig, ax = _axes(f"depth {approx.depth}")
    if hull is not None:
        T = np.asarray(hull, dtype=float)
        T = np.vstack([T, T[:1]])
        ax.plot(T[:, 0], T[:, 1], color="0.7", lw=0.8)
    P = approx.points
    ax.plot(P[:, 0], P[:, 1], lw=0.6, color="k")
    ax.axis("off")
    return _save(fig, path)

