"""Subdifferentials of polyhedral DC functions."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from ..exceptions import ConsistencyError, UnsupportedDimensionError, ValidationError
from .affine import ArrayLike, MaxAffine
from .dc import DCFunction
from .polytope import VPolytope

logger = logging.getLogger(__name__)

ACTIVITY_TOL = 1e-9
CELL_TOL = 1e-8
CLARKE_MAX_DIM = 3
EXACTNESS = ("convex-exact", "clarke-exact", "outer-estimate")
MODES = ("convex-part", "outer", "clarke")


@dataclass(frozen=True)
class SubdiffResult:
    """A subdifferential hull and how exact it is."""

    hull: VPolytope
    exactness: str

    def __post_init__(self) -> None:
        if self.exactness not in EXACTNESS:
            raise ValidationError(f"unknown exactness tag {self.exactness!r}")


def active_sets(
    f: DCFunction, x: ArrayLike, tol: float = ACTIVITY_TOL
) -> Tuple[np.ndarray, np.ndarray]:
    """Active g- and h-piece indices at x, relative to tol*(1+|f(x)|)."""
    pt = np.asarray(x, dtype=float).reshape(-1)
    if pt.shape[0] != f.dim:
        raise ValidationError(f"point of dimension {pt.shape[0]} for a {f.dim}-d function")
    scale = abs(float(f(pt)))
    return f.g.active(pt, tol, scale), f.h.active(pt, tol, scale)


def _strictly_max_cone(m: MaxAffine, idx: np.ndarray, i: int) -> Optional[np.ndarray]:
    """Rows (n, d+1) of the cone inequalities making piece i strictly maximal among idx.

    Returns None when some tied piece has the same gradient but a larger offset.
    """
    rows: List[np.ndarray] = []
    for k in idx:
        if k == i:
            continue
        diff = m.A[k] - m.A[i]
        n = float(np.linalg.norm(diff))
        if n == 0.0:
            if m.b[k] >= m.b[i]:
                return None
            continue
        rows.append(np.append(diff / n, 1.0))
    return np.array(rows) if rows else np.zeros((0, m.dim + 1))


def _joint_cell_is_full(rows: np.ndarray, dim: int, cell_tol: float) -> bool:
    """Maximize the min slack s over directions z in the unit box; full iff s > cell_tol."""
    if rows.shape[0] == 0:
        return True
    cost = np.zeros(dim + 1)
    cost[-1] = -1.0
    bounds = [(-1.0, 1.0)] * dim + [(None, 1.0)]
    res = linprog(cost, A_ub=rows, b_ub=np.zeros(rows.shape[0]), bounds=bounds, method="highs")
    return res.status == 0 and -res.fun > cell_tol


def subdiff(
    f: DCFunction,
    x: ArrayLike,
    mode: str = "clarke",
    tol: float = ACTIVITY_TOL,
    cell_tol: float = CELL_TOL,
) -> SubdiffResult:
    """
    Subdifferential of f at x.

    Args:
        f: Polyhedral DC function.
        x: Point in R^d.
        mode: "convex-part" (hull of active g gradients), "outer" (hull of
            pairwise differences of active g and h gradients) or "clarke"
            (gradients of full-dimensional joint-activity cells, d <= 3).
        tol: Relative activity tolerance.
        cell_tol: LP slack certifying a full-dimensional cell.

    Raises:
        ValidationError: dimension mismatch or unknown mode.
        UnsupportedDimensionError: clarke mode with d > 3.
    """
    if mode not in MODES:
        raise ValidationError(f"unknown subdiff mode {mode!r}; expected one of {MODES}")
    if tol <= 0:
        raise ValidationError("activity tolerance must be positive")
    I, J = active_sets(f, x, tol)

    if mode == "convex-part":
        return SubdiffResult(VPolytope(f.g.A[I]).pruned(), "convex-exact")

    if mode == "outer":
        hull = VPolytope(f.g.A[I]).minus(VPolytope(f.h.A[J]))
        return SubdiffResult(hull, "outer-estimate")

    if f.dim > CLARKE_MAX_DIM:
        raise UnsupportedDimensionError("clarke subdifferential", f.dim, "d <= 3")

    if len(I) == 1 and len(J) == 1:
        return SubdiffResult(VPolytope.point(f.g.A[I[0]] - f.h.A[J[0]]), "clarke-exact")

    g_cones = {int(i): _strictly_max_cone(f.g, I, int(i)) for i in I}
    h_cones = {int(j): _strictly_max_cone(f.h, J, int(j)) for j in J}
    grads = []
    for i, gi in g_cones.items():
        if gi is None:
            continue
        for j, hj in h_cones.items():
            if hj is None:
                continue
            if _joint_cell_is_full(np.vstack([gi, hj]), f.dim, cell_tol):
                grads.append(f.g.A[i] - f.h.A[j])

    if not grads:
        pt = [float(v) for v in np.ravel(x)]
        raise ConsistencyError(f"no full-dimensional activity cell found at {pt}")
    return SubdiffResult(VPolytope(np.array(grads)).pruned(), "clarke-exact")
