"""Affine maps and their pointwise maxima (convex polyhedral functions)."""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from scipy.optimize import linprog

from ..exceptions import ValidationError

logger = logging.getLogger(__name__)

ArrayLike = Union[Sequence[float], np.ndarray]

# Dominance pruning by LP only kicks in above this many pieces
PRUNE_THRESHOLD = 64
DOMINANCE_SLACK = 1e-12


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AffineMap:
    """The affine function x -> a.x + b on R^d."""

    a: np.ndarray
    b: float = 0.0

    def __post_init__(self) -> None:
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        if a.ndim != 1 or a.size == 0:
            raise ValidationError("affine gradient must be a nonempty vector")
        if not (np.all(np.isfinite(a)) and np.isfinite(self.b)):
            raise ValidationError("affine map entries must be finite")
        object.__setattr__(self, "a", _readonly(a))
        object.__setattr__(self, "b", float(self.b))

    @property
    def dim(self) -> int:
        return int(self.a.shape[0])

    def __call__(self, x: ArrayLike) -> Union[float, np.ndarray]:
        pts = np.asarray(x, dtype=float)
        val = pts @ self.a + self.b
        return float(val) if pts.ndim == 1 else val

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffineMap):
            return NotImplemented
        return bool(np.array_equal(self.a, other.a) and self.b == other.b)

    def __hash__(self) -> int:
        return hash((self.a.tobytes(), self.b))

    def __repr__(self) -> str:
        return f"AffineMap(a={self.a.tolist()}, b={self.b!r})"


@dataclass(frozen=True, eq=False)
class MaxAffine:
    """
    Convex piecewise-affine function max_i (A[i].x + b[i]).

    Pieces are stored as a read-only (k, d) gradient matrix and (k,) offsets.
    Exact duplicates are removed keeping first occurrence; above
    PRUNE_THRESHOLD pieces, pieces that are nowhere strictly maximal are
    removed by linear programming.
    """

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
            raise ValidationError("MaxAffine needs a nonempty (k, d) gradient matrix")
        if A.shape[0] != b.shape[0]:
            raise ValidationError(f"{A.shape[0]} gradients but {b.shape[0]} offsets")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValidationError("MaxAffine entries must be finite")

        A, b = _dedupe(A, b)
        if A.shape[0] > PRUNE_THRESHOLD:
            A, b = _prune_dominated(A, b)

        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "b", _readonly(b))

    @classmethod
    def from_pieces(cls, pieces: Iterable[AffineMap]) -> "MaxAffine":
        """Build from a list of AffineMap of equal dimension."""
        plist = list(pieces)
        if not plist:
            raise ValidationError("MaxAffine needs at least one piece")
        dims = {p.dim for p in plist}
        if len(dims) != 1:
            raise ValidationError(f"pieces have mixed dimensions {sorted(dims)}")
        return cls(np.stack([p.a for p in plist]), np.array([p.b for p in plist]))

    @classmethod
    def constant(cls, value: float, dim: int) -> "MaxAffine":
        return cls(np.zeros((1, dim)), np.array([float(value)]))

    @property
    def dim(self) -> int:
        return int(self.A.shape[1])

    def __len__(self) -> int:
        return int(self.A.shape[0])

    @property
    def pieces(self) -> List[AffineMap]:
        return [AffineMap(a, b) for a, b in zip(self.A, self.b)]

    def values(self, x: ArrayLike) -> np.ndarray:
        """Per-piece values: shape (k,) for a point, (n, k) for a batch."""
        pts = np.asarray(x, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValidationError(f"point of dimension {pts.shape[-1]} for a {self.dim}-d function")
        return pts @ self.A.T + self.b

    def __call__(self, x: ArrayLike) -> Union[float, np.ndarray]:
        vals = self.values(x)
        out = vals.max(axis=-1)
        return float(out) if vals.ndim == 1 else out

    def active(self, x: ArrayLike, tol: float = 1e-9, scale: Optional[float] = None) -> np.ndarray:
        """
        Indices of pieces within tol*(1+scale) of the max at a single point.

        Args:
            x: Point in R^d.
            tol: Relative activity tolerance.
            scale: Magnitude used for the relative test (defaults to |max|).
        """
        vals = self.values(np.asarray(x, dtype=float).reshape(-1))
        top = vals.max()
        s = abs(top) if scale is None else abs(scale)
        return np.flatnonzero(vals >= top - tol * (1.0 + s))

    def __add__(self, other: "MaxAffine") -> "MaxAffine":
        """Pointwise sum: the piecewise product of the two piece lists."""
        if not isinstance(other, MaxAffine):
            return NotImplemented
        if other.dim != self.dim:
            raise ValidationError(f"cannot add {self.dim}-d and {other.dim}-d functions")
        A = (self.A[:, None, :] + other.A[None, :, :]).reshape(-1, self.dim)
        b = (self.b[:, None] + other.b[None, :]).reshape(-1)
        return MaxAffine(A, b)

    def union(self, other: "MaxAffine") -> "MaxAffine":
        """Pointwise max: concatenation of the piece lists."""
        if other.dim != self.dim:
            raise ValidationError(f"cannot take max of {self.dim}-d and {other.dim}-d functions")
        return MaxAffine(np.vstack([self.A, other.A]), np.concatenate([self.b, other.b]))

    def scaled(self, lam: float) -> "MaxAffine":
        """Multiply by a nonnegative scalar."""
        if not np.isfinite(lam) or lam < 0:
            raise ValidationError(f"MaxAffine can only be scaled by finite lam >= 0, got {lam}")
        if lam == 0:
            return MaxAffine.constant(0.0, self.dim)
        return MaxAffine(self.A * lam, self.b * lam)

    def shifted(self, c: float) -> "MaxAffine":
        return MaxAffine(self.A, self.b + float(c))

    def precompose(self, M: ArrayLike, c: ArrayLike) -> "MaxAffine":
        """The function y -> self(M y + c), with M of shape (d, d_new)."""
        M = np.asarray(M, dtype=float)
        c = np.asarray(c, dtype=float).reshape(-1)
        if M.ndim != 2 or M.shape[0] != self.dim or c.shape[0] != self.dim:
            raise ValidationError(
                f"precompose needs M of shape ({self.dim}, m) and c of length {self.dim}"
            )
        return MaxAffine(self.A @ M, self.A @ c + self.b)

    def lipschitz(self) -> float:
        """Largest Euclidean norm of a piece gradient."""
        return float(np.linalg.norm(self.A, axis=1).max())

    def __repr__(self) -> str:
        return f"MaxAffine(dim={self.dim}, pieces={len(self)})"


def _dedupe(A: np.ndarray, b: np.ndarray) -> "tuple[np.ndarray, np.ndarray]":
    rows = np.hstack([A, b[:, None]])
    _, first = np.unique(rows, axis=0, return_index=True)
    keep = np.sort(first)
    return A[keep], b[keep]


def _prune_dominated(A: np.ndarray, b: np.ndarray) -> "tuple[np.ndarray, np.ndarray]":
    """Drop pieces that are nowhere strictly maximal among the remaining ones."""
    k, d = A.shape
    alive = np.ones(k, dtype=bool)
    for i in range(k):
        others = np.flatnonzero(alive)
        others = others[others != i]
        if others.size == 0:
            break
        # maximize t subject to (a_j - a_i).x + t <= b_i - b_j, t <= 1
        A_ub = np.hstack([A[others] - A[i], np.ones((others.size, 1))])
        b_ub = b[i] - b[others]
        cost = np.zeros(d + 1)
        cost[-1] = -1.0
        bounds = [(None, None)] * d + [(None, 1.0)]
        res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if res.status == 0 and -res.fun <= DOMINANCE_SLACK:
            alive[i] = False
    dropped = int(k - alive.sum())
    if dropped:
        logger.debug(f"Dominance pruning removed {dropped} of {k} pieces")
    return A[alive], b[alive]
