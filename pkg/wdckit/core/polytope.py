"""Vertex-represented polytopes and Wolfe's minimum-norm-point algorithm."""

import logging
from dataclasses import dataclass
from typing import List, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..exceptions import ValidationError
from .affine import ArrayLike

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12
WOLFE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of finitely many points; vertices is a read-only (m, d) array."""

    vertices: np.ndarray

    def __post_init__(self) -> None:
        V = np.asarray(self.vertices, dtype=float)
        if V.ndim == 1:
            V = V.reshape(1, -1)
        if V.ndim != 2 or V.shape[0] == 0 or V.shape[1] == 0:
            raise ValidationError("VPolytope needs a nonempty (m, d) vertex array")
        if not np.all(np.isfinite(V)):
            raise ValidationError("VPolytope vertices must be finite")
        V = V.copy()
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)

    @classmethod
    def point(cls, p: ArrayLike) -> "VPolytope":
        return cls(np.asarray(p, dtype=float).reshape(1, -1))

    @property
    def dim(self) -> int:
        return int(self.vertices.shape[1])

    def __len__(self) -> int:
        return int(self.vertices.shape[0])

    def is_singleton(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.ptp(self.vertices, axis=0) <= tol))

    def pruned(self) -> "VPolytope":
        """Keep only extreme points, in their original order."""
        V = self.vertices
        _, first = np.unique(V, axis=0, return_index=True)
        idx = np.sort(first)
        V = V[idx]
        if V.shape[0] == 1:
            return VPolytope(V)

        Y = V - V.mean(axis=0)
        _, s, Vt = np.linalg.svd(Y, full_matrices=False)
        rank = int(np.sum(s > RANK_TOL * max(1.0, s[0])))
        if rank == 0:
            return VPolytope(V[:1])
        if rank == 1:
            t = Y @ Vt[0]
            ends = sorted({int(np.argmin(t)), int(np.argmax(t))})
            return VPolytope(V[ends])
        if V.shape[0] == rank + 1:
            return VPolytope(V)  # simplex

        Z = Y @ Vt[:rank].T
        try:
            hull = ConvexHull(Z)
        except QhullError:
            logger.debug("Qhull failed on a degenerate hull; keeping all vertices")
            return VPolytope(V)
        return VPolytope(V[np.sort(hull.vertices)])

    def minus(self, other: "VPolytope") -> "VPolytope":
        """Hull of all pairwise differences p - q (Minkowski difference of hulls)."""
        if other.dim != self.dim:
            raise ValidationError("polytope dimensions differ")
        D = (self.vertices[:, None, :] - other.vertices[None, :, :]).reshape(-1, self.dim)
        return VPolytope(D).pruned()

    def diameter(self) -> float:
        V = self.vertices
        if V.shape[0] == 1:
            return 0.0
        diff = V[:, None, :] - V[None, :, :]
        return float(np.sqrt((diff**2).sum(axis=-1)).max())

    def max_norm(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def min_norm(self, tol_opt: float = WOLFE_TOL) -> float:
        return float(np.linalg.norm(min_norm_point(self, tol_opt)))

    def distance_to(self, p: ArrayLike, tol_opt: float = WOLFE_TOL) -> float:
        """Euclidean distance from p to the hull."""
        shifted = VPolytope(self.vertices - np.asarray(p, dtype=float).reshape(1, -1))
        return shifted.min_norm(tol_opt)

    def excess_over(self, other: "VPolytope") -> float:
        """Directed Hausdorff excess: max over own vertices of distance to other."""
        return max(other.distance_to(v) for v in self.vertices)

    def __repr__(self) -> str:
        return f"VPolytope({self.vertices.tolist()})"


def _affine_minimizer(B: np.ndarray) -> np.ndarray:
    """Weights (summing to 1) of the min-norm point of the affine hull of rows of B."""
    k = B.shape[0]
    M = np.zeros((k + 1, k + 1))
    M[0, 1:] = 1.0
    M[1:, 0] = 1.0
    M[1:, 1:] = B @ B.T
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[1:]


def min_norm_point(
    P: Union[VPolytope, ArrayLike],
    tol_opt: float = WOLFE_TOL,
) -> np.ndarray:
    """
    Point of minimum Euclidean norm in the convex hull of the vertices.

    Wolfe's algorithm with a deterministic start (first vertex of least norm)
    and linear-oracle vertex choice. The result p satisfies
    <p, v> >= |p|^2 - tol_opt * max(1, max|v|^2) for every vertex v.

    Args:
        P: VPolytope or (m, d) array of points.
        tol_opt: Optimality tolerance of the Wolfe certificate.

    Returns:
        The min-norm point as a length-d array.
    """
    V = P.vertices if isinstance(P, VPolytope) else np.atleast_2d(np.asarray(P, dtype=float))
    if V.shape[0] == 0:
        raise ValidationError("min_norm_point of an empty point set")
    if V.shape[0] == 1:
        return V[0].copy()

    scale = max(1.0, float((V**2).sum(axis=1).max()))
    tol = tol_opt * scale

    corral: List[int] = [int(np.argmin((V**2).sum(axis=1)))]
    lam = np.array([1.0])
    x = V[corral[0]].copy()

    for _ in range(50 * V.shape[0] + 100):
        dots = V @ x
        j = int(np.argmin(dots))
        if x @ x - dots[j] <= tol or j in corral:
            break
        corral.append(j)
        lam = np.append(lam, 0.0)

        while True:
            B = V[corral]
            alpha = _affine_minimizer(B)
            if np.all(alpha > 1e-15):
                lam = alpha
                x = alpha @ B
                break
            # line search toward the affine minimizer, dropping a vertex
            neg = alpha <= 1e-15
            denom = lam[neg] - alpha[neg]
            ratios = np.where(denom > 0, lam[neg] / np.where(denom > 0, denom, 1.0), np.inf)
            theta = float(min(1.0, ratios.min()))
            lam = theta * alpha + (1.0 - theta) * lam
            keep = lam > 1e-15
            if not keep.any():
                keep[int(np.argmax(lam))] = True
            corral = [c for c, k in zip(corral, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ V[corral]
            if len(corral) == 1:
                break

    gap = x @ x - float((V @ x).min())
    if gap > tol:
        logger.debug(f"Wolfe certificate gap {gap:.3e} exceeds tolerance {tol:.3e}")
    return x
