"""Planar reference auras with known Euler characteristics."""

from typing import Sequence

import numpy as np

from ..aura.constructors import aura_distance_polytope, min_aura
from ..core.affine import ArrayLike, MaxAffine
from ..core.dc import DCFunction, combine
from ..core.polytope import VPolytope
from ..exceptions import ValidationError

SQUARE_PAIR = ((-3.0, 0.0), (3.0, 0.0))
SQUARE_TRIPLE = ((-4.0, 0.0), (0.0, 0.0), (4.0, 0.0))
HOLES = ((-1.5, 0.0), (1.5, 0.0))


def _l1(center: ArrayLike = (0.0, 0.0)) -> MaxAffine:
    """|x - center|_1 as the max of the four sign forms."""
    c = np.asarray(center, dtype=float).reshape(2)
    S = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
    return MaxAffine(S, -(S @ c))


def square_aura(center: ArrayLike = (0.0, 0.0), half: float = 1.0) -> DCFunction:
    """max(|x - center|_inf - half, 0); chi = 1."""
    if not half > 0:
        raise ValidationError("square half-side must be positive")
    c = np.asarray(center, dtype=float).reshape(2)
    corners = c + half * np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    return aura_distance_polytope(VPolytope(corners), "sup")


def annulus_aura(inner: float = 1.0, outer: float = 2.0) -> DCFunction:
    """max(inner - |x|_1, |x|_1 - outer, 0), a diamond annulus; chi = 0."""
    if not 0 < inner < outer:
        raise ValidationError("annulus radii must satisfy 0 < inner < outer")
    norm = _l1()
    hole = DCFunction(MaxAffine.constant(inner, 2), norm)
    rim = DCFunction.convex(norm.shifted(-outer))
    return combine("max", hole, rim, DCFunction.constant(0.0, 2))


def squares_aura(centers: Sequence[ArrayLike] = SQUARE_PAIR, half: float = 1.0) -> DCFunction:
    """Union of disjoint unit squares through min; chi = number of squares."""
    if not centers:
        raise ValidationError("squares_aura needs at least one center")
    return min_aura(*(square_aura(c, half) for c in centers))


def holed_square_aura(
    outer_half: float = 3.0, holes: Sequence[ArrayLike] = HOLES, radius: float = 0.5
) -> DCFunction:
    """Square minus open l1 balls around each hole center; chi = 1 - len(holes)."""
    parts = [DCFunction.convex(_sup_norm().shifted(-outer_half))]
    for h in holes:
        parts.append(DCFunction(MaxAffine.constant(radius, 2), _l1(h)))
    parts.append(DCFunction.constant(0.0, 2))
    return combine("max", *parts)


def point_aura(center: ArrayLike = (0.0, 0.0)) -> DCFunction:
    """|x - center|_1, the aura of a single point."""
    return DCFunction.convex(_l1(center))


def _sup_norm() -> MaxAffine:
    eye = np.eye(2)
    return MaxAffine(np.vstack([eye, -eye]), np.zeros(4))
