"""Polyhedral difference-of-convex functions and their calculus."""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ValidationError
from .affine import AffineMap, ArrayLike, MaxAffine

logger = logging.getLogger(__name__)

COMBINE_MODES = ("add", "scale", "max", "min", "affine_precompose")


@dataclass(frozen=True, eq=False)
class DCFunction:
    """f = g - h with g, h convex max-of-affine functions on R^d."""

    g: MaxAffine
    h: MaxAffine

    def __post_init__(self) -> None:
        if self.g.dim != self.h.dim:
            raise ValidationError(f"DC components have dimensions {self.g.dim} and {self.h.dim}")

    @classmethod
    def from_pieces(
        cls,
        g_pieces: Iterable[Union[AffineMap, Tuple[ArrayLike, float]]],
        h_pieces: Iterable[Union[AffineMap, Tuple[ArrayLike, float]]],
    ) -> "DCFunction":
        """Build from lists of AffineMap or (a, b) pairs."""

        def to_max(pieces: Iterable[Union[AffineMap, Tuple[ArrayLike, float]]]) -> MaxAffine:
            maps = [p if isinstance(p, AffineMap) else AffineMap(p[0], p[1]) for p in pieces]
            return MaxAffine.from_pieces(maps)

        return cls(to_max(g_pieces), to_max(h_pieces))

    @classmethod
    def affine(cls, a: ArrayLike, b: float = 0.0) -> "DCFunction":
        a = np.atleast_1d(np.asarray(a, dtype=float))
        return cls(MaxAffine(a[None, :], [b]), MaxAffine.constant(0.0, a.shape[0]))

    @classmethod
    def constant(cls, value: float, dim: int) -> "DCFunction":
        return cls(MaxAffine.constant(value, dim), MaxAffine.constant(0.0, dim))

    @classmethod
    def convex(cls, g: MaxAffine) -> "DCFunction":
        return cls(g, MaxAffine.constant(0.0, g.dim))

    @property
    def dim(self) -> int:
        return self.g.dim

    @property
    def piece_counts(self) -> Tuple[int, int]:
        return len(self.g), len(self.h)

    def __call__(self, x: ArrayLike) -> Union[float, np.ndarray]:
        pts = np.asarray(x, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValidationError(f"point of dimension {pts.shape[-1]} for a {self.dim}-d function")
        out = self.g.values(pts).max(axis=-1) - self.h.values(pts).max(axis=-1)
        return float(out) if pts.ndim == 1 else out

    def lipschitz(self) -> float:
        """Lipschitz bound max|a_i| + max|c_j| from the piece gradients."""
        return self.g.lipschitz() + self.h.lipschitz()

    def restrict_line(self, p: ArrayLike, q: ArrayLike) -> "DCFunction":
        """The 1-d function t -> f(p + t (q - p))."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        return combine("affine_precompose", self, (q - p)[:, None], p)

    def __repr__(self) -> str:
        return f"DCFunction(dim={self.dim}, g={len(self.g)} pieces, h={len(self.h)} pieces)"


def eval_dc(f: DCFunction, x: ArrayLike) -> float:
    """Evaluate f = g - h at a single point."""
    pt = np.asarray(x, dtype=float).reshape(-1)
    if pt.shape[0] != f.dim:
        raise ValidationError(f"point of dimension {pt.shape[0]} for a {f.dim}-d function")
    return float(f(pt))


def _check_same_dim(funcs: Sequence[DCFunction]) -> int:
    if not funcs:
        raise ValidationError("combine needs at least one function")
    for fn in funcs:
        if not isinstance(fn, DCFunction):
            raise ValidationError(f"expected DCFunction, got {type(fn).__name__}")
    dims = {fn.dim for fn in funcs}
    if len(dims) != 1:
        raise ValidationError(f"operands have mixed dimensions {sorted(dims)}")
    return dims.pop()


def _sum_all(parts: Sequence[MaxAffine], dim: int) -> MaxAffine:
    total = MaxAffine.constant(0.0, dim)
    for part in parts:
        total = total + part
    return total


def _max_all(funcs: Sequence[DCFunction], dim: int) -> DCFunction:
    # max_i (g_i - h_i) = max_i (g_i + sum_{j != i} h_j) - sum_j h_j
    H = _sum_all([fn.h for fn in funcs], dim)
    G = None
    for i, fn in enumerate(funcs):
        term = fn.g + _sum_all([o.h for j, o in enumerate(funcs) if j != i], dim)
        G = term if G is None else G.union(term)
    assert G is not None
    return DCFunction(G, H)


def combine(mode: str, *args: object) -> DCFunction:
    """
    Combine DC functions, returning a DC representation of the result.

    Modes:
        add: combine("add", f1, f2, ...) -> f1 + f2 + ...
        scale: combine("scale", f, lam); negative lam swaps g and h.
        max: combine("max", f1, f2, ...) -> pointwise max.
        min: combine("min", f1, f2, ...) -> pointwise min.
        affine_precompose: combine("affine_precompose", f, M, c) -> y -> f(M y + c).

    Raises:
        ValidationError: unknown mode, empty argument list, dimension mismatch.
    """
    if mode not in COMBINE_MODES:
        raise ValidationError(f"unknown combine mode {mode!r}; expected one of {COMBINE_MODES}")
    if not args:
        raise ValidationError(f"combine({mode!r}) needs arguments")

    if mode == "scale":
        if len(args) != 2:
            raise ValidationError("combine('scale', f, lam) takes exactly two arguments")
        fn, lam = args
        dim = _check_same_dim([fn])  # type: ignore[list-item]
        lam = float(lam)  # type: ignore[arg-type]
        if not np.isfinite(lam):
            raise ValidationError("scale factor must be finite")
        if lam == 0:
            return DCFunction.constant(0.0, dim)
        if lam > 0:
            return DCFunction(fn.g.scaled(lam), fn.h.scaled(lam))  # type: ignore[attr-defined]
        return DCFunction(fn.h.scaled(-lam), fn.g.scaled(-lam))  # type: ignore[attr-defined]

    if mode == "affine_precompose":
        if len(args) != 3:
            raise ValidationError("combine('affine_precompose', f, M, c) takes three arguments")
        fn, M, c = args
        _check_same_dim([fn])  # type: ignore[list-item]
        return DCFunction(fn.g.precompose(M, c), fn.h.precompose(M, c))  # type: ignore

    funcs: List[DCFunction] = list(args)  # type: ignore[arg-type]
    dim = _check_same_dim(funcs)
    if len(funcs) == 1:
        return funcs[0]

    if mode == "add":
        return DCFunction(
            _sum_all([fn.g for fn in funcs], dim), _sum_all([fn.h for fn in funcs], dim)
        )

    if mode == "max":
        out = _max_all(funcs, dim)
    else:
        # min_i f_i = -max_i(-f_i)
        negated = [DCFunction(fn.h, fn.g) for fn in funcs]
        m = _max_all(negated, dim)
        out = DCFunction(m.h, m.g)

    logger.debug(f"combine({mode}) of {len(funcs)} functions -> pieces {out.piece_counts}")
    return out
