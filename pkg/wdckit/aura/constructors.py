"""Constructors of polyhedral DC auras for canonical sets."""

import itertools
import logging
import math
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..core.affine import ArrayLike, MaxAffine
from ..core.dc import DCFunction, combine
from ..core.lattice import lattice_max, lattice_to_dc
from ..core.polytope import VPolytope
from ..core.pwl import breakpoints_1d, end_slopes, pwl_1d
from ..exceptions import ConsistencyError, UnsupportedDimensionError, ValidationError

if TYPE_CHECKING:
    from ..planar.sectors import OpenSectorSpec

logger = logging.getLogger(__name__)

NORMS = ("sup", "l1")
NORMAL_DIGITS = 12


def _ball_vertices(dim: int, norm: str) -> np.ndarray:
    if norm == "sup":
        return np.array(list(itertools.product((-1.0, 1.0), repeat=dim)))
    eye = np.eye(dim)
    return np.vstack([eye, -eye])


def _dual_norm(n: np.ndarray, norm: str) -> np.ndarray:
    return np.abs(n).sum(axis=-1) if norm == "sup" else np.abs(n).max(axis=-1)


def _check_norm(norm: str) -> None:
    if norm not in NORMS:
        raise ValidationError(f"unknown polyhedral norm {norm!r}; expected one of {NORMS}")


def aura_distance_polytope(P: VPolytope, norm: str = "sup") -> DCFunction:
    """
    Polyhedral distance to a polytope, as a convex DC function.

    The pieces come from the facets of P + B (B the unit ball of the norm):
    each facet normal n gives u.x - sigma_P(u) with u = n / |n|_dual. The
    constant 0 is added when P is full-dimensional.

    Raises:
        UnsupportedDimensionError: d > 3.
    """
    _check_norm(norm)
    d = P.dim
    if d > 3:
        raise UnsupportedDimensionError("aura_distance_polytope", d, "d <= 3")
    V = P.pruned().vertices

    if d == 1:
        lo, hi = float(V.min()), float(V.max())
        A = [[1.0], [-1.0]]
        b = [-hi, lo]
        if hi > lo:
            A.append([0.0])
            b.append(0.0)
        return DCFunction.convex(MaxAffine(np.array(A), np.array(b)))

    B = _ball_vertices(d, norm)
    pts = (V[:, None, :] + B[None, :, :]).reshape(-1, d)
    try:
        hull = ConvexHull(pts)
    except QhullError as e:
        raise ConsistencyError(f"facet enumeration of P + B failed: {e}") from e
    normals = np.unique(np.round(hull.equations[:, :d], NORMAL_DIGITS), axis=0)
    U = normals / _dual_norm(normals, norm)[:, None]
    offsets = -(V @ U.T).max(axis=0)

    rank = np.linalg.matrix_rank(V - V.mean(axis=0)) if len(V) > 1 else 0
    if rank == d:
        U = np.vstack([U, np.zeros(d)])
        offsets = np.append(offsets, 0.0)
    logger.debug(f"Distance aura ({norm}) of {len(V)}-vertex polytope: {len(U)} pieces")
    return DCFunction.convex(MaxAffine(U, offsets))


def aura_ball_cap(
    f: DCFunction, center: ArrayLike, radius: float, norm: str = "sup"
) -> DCFunction:
    """max(f, dist(x, B(center, radius))): agrees with f >= 0 on the ball, bounded sublevels."""
    _check_norm(norm)
    if not radius > 0:
        raise ValidationError("ball cap radius must be positive")
    c = np.asarray(center, dtype=float).reshape(-1)
    if c.shape[0] != f.dim:
        raise ValidationError(f"center of dimension {c.shape[0]} for a {f.dim}-d function")
    # the dual ball's extreme points give the norm as a max of linear forms
    U = _ball_vertices(f.dim, "l1" if norm == "sup" else "sup")
    cap = MaxAffine(np.vstack([U, np.zeros(f.dim)]), np.append(-(U @ c) - radius, 0.0))
    return combine("max", f, DCFunction.convex(cap))


def _lift_x(phi: DCFunction) -> DCFunction:
    """(x, y) -> phi(x)."""
    return combine("affine_precompose", phi, np.array([[1.0, 0.0]]), np.zeros(1))


def aura_hypograph(phi: DCFunction) -> DCFunction:
    """
    F(x, y) = max(y - phi(x), 0), whose zero set is the hypograph of phi.

    Wherever F > 0, every Clarke gradient has second coordinate 1.
    """
    if phi.dim != 1:
        raise ValidationError("aura_hypograph needs a 1-d function")
    gap = combine("add", DCFunction.affine([0.0, 1.0]), combine("scale", _lift_x(phi), -1.0))
    return lattice_to_dc(lattice_max(gap, DCFunction.constant(0.0, 2)))


def rotate_about(f: DCFunction, angle: float, base: ArrayLike) -> DCFunction:
    """World function p -> f(R(-angle)(p - base)) for f given in frame coordinates."""
    c, s = math.cos(angle), math.sin(angle)
    M = np.array([[c, s], [-s, c]])
    b = np.asarray(base, dtype=float).reshape(2)
    return combine("affine_precompose", f, M, -M @ b)


def _extend_left(fn: DCFunction, slope_left: float) -> DCFunction:
    """fn on [0, inf), continued with slope_left on (-inf, 0]."""
    bps = breakpoints_1d(fn)
    knots = np.concatenate([[0.0], bps[bps > 0]])
    values = np.asarray(fn(knots[:, None]), dtype=float)
    return pwl_1d(knots, values, slope_left, end_slopes(fn)[1])


def aura_degenerate_sector(
    g_lo: DCFunction,
    h_hi: DCFunction,
    angle: float = 0.0,
    base: ArrayLike = (0.0, 0.0),
    strict_tangent: bool = True,
) -> DCFunction:
    """
    Aura of the closed sector {x >= 0, g_lo(x) <= y <= h_hi(x)} in a rotated frame.

    Built as max(g_e - y, y - h_e, 0) where g_e, h_e extend the bounds to
    x < 0 with slopes -1 and +1; on x < 0 this is the l1 norm of (x, y).

    Raises:
        ValidationError: g_lo > h_hi somewhere on [0, inf), nonzero values at
            0, or (with strict_tangent) nonzero right slopes at 0.
    """
    from ..planar.sectors import DegenerateSectorSpec, validate_sector

    for name, fn in (("g_lo", g_lo), ("h_hi", h_hi)):
        if fn.dim != 1:
            raise ValidationError(f"{name} must be a 1-d function")

    bps = np.union1d(breakpoints_1d(g_lo), breakpoints_1d(h_hi))
    reach = max(1.0, 2.0 * float(bps.max(initial=0.0)))
    report = validate_sector(
        DegenerateSectorSpec(angle, reach, g_lo, h_hi, strict_tangent=strict_tangent)
    )
    if not report.passed:
        raise ValidationError(f"invalid degenerate sector at x={report.abscissa}: {report.reason}")
    if end_slopes(g_lo)[1] > end_slopes(h_hi)[1]:
        raise ValidationError("g_lo exceeds h_hi for large x")

    g_e = _lift_x(_extend_left(g_lo, -1.0))
    h_e = _lift_x(_extend_left(h_hi, 1.0))
    y = DCFunction.affine([0.0, 1.0])
    below = combine("add", g_e, combine("scale", y, -1.0))
    above = combine("add", y, combine("scale", h_e, -1.0))
    G = lattice_to_dc(lattice_max(below, above, DCFunction.constant(0.0, 2)))
    return rotate_about(G, angle, base)


def aura_sector_complement(
    sectors: Sequence["OpenSectorSpec"], base: ArrayLike = (0.0, 0.0)
) -> DCFunction:
    """
    max_i F_i with F_i the hypograph aura of sector i in its rotated frame.

    The zero set within the common ball is the complement of the union of the
    open sectors.

    Raises:
        ValidationError: empty list, an invalid sector, or overlapping sectors.
    """
    from ..planar.sectors import check_disjoint, validate_sector

    if not sectors:
        raise ValidationError("aura_sector_complement needs at least one sector")
    for k, spec in enumerate(sectors):
        report = validate_sector(spec)
        if not report.passed:
            raise ValidationError(f"sector {k} invalid at x={report.abscissa}: {report.reason}")
    overlap = check_disjoint(sectors)
    if overlap is not None:
        raise ValidationError(f"sectors overlap at radius {overlap:.6g}")
    parts = [rotate_about(aura_hypograph(s.phi), s.angle, base) for s in sectors]
    return combine("max", *parts)


def min_aura(*auras: DCFunction) -> DCFunction:
    """Pointwise min: an aura of the union when the zero sets are far apart."""
    return combine("min", *auras)
