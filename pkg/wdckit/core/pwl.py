"""One-dimensional piecewise-linear helpers: slopes, breakpoints, exact builders."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..exceptions import ValidationError
from .affine import ArrayLike, MaxAffine
from .dc import DCFunction

logger = logging.getLogger(__name__)

SLOPE_TOL = 1e-12


def _require_1d(f: DCFunction) -> None:
    if f.dim != 1:
        raise ValidationError(f"expected a 1-d DC function, got dimension {f.dim}")


def one_sided_slope_1d(f: DCFunction, x: float, side: str, tol: float = 1e-9) -> float:
    """
    Exact one-sided derivative of a 1-d polyhedral DC function.

    The active piece on the right is the tied piece of largest slope, on the
    left the one of smallest slope; this is read from the piece data.

    Args:
        f: 1-d DC function.
        x: Abscissa.
        side: "left" or "right".
        tol: Relative activity tolerance.
    """
    _require_1d(f)
    if side not in ("left", "right"):
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    pt = np.array([float(x)])
    scale = abs(float(f(pt)))
    ga = f.g.A[f.g.active(pt, tol, scale), 0]
    ha = f.h.A[f.h.active(pt, tol, scale), 0]
    if side == "right":
        return float(ga.max() - ha.max())
    return float(ga.min() - ha.min())


def envelope_breakpoints(m: MaxAffine) -> np.ndarray:
    """Abscissae where the maximizing line of a 1-d MaxAffine changes."""
    a = m.A[:, 0]
    b = m.b
    order = np.lexsort((b, a))
    stack: List[int] = []
    for idx in order:
        if stack and a[stack[-1]] == a[idx]:
            stack.pop()  # equal slope: later entry has the larger offset
        while len(stack) >= 2:
            i, j = stack[-2], stack[-1]
            x_ij = (b[i] - b[j]) / (a[j] - a[i])
            x_ik = (b[i] - b[idx]) / (a[idx] - a[i])
            if x_ik <= x_ij:
                stack.pop()
            else:
                break
        stack.append(int(idx))
    return np.array(
        [(b[i] - b[j]) / (a[j] - a[i]) for i, j in zip(stack[:-1], stack[1:])], dtype=float
    )


def breakpoints_1d(f: DCFunction) -> np.ndarray:
    """Sorted abscissae where the slope of f actually changes."""
    _require_1d(f)
    cand = np.unique(np.concatenate([envelope_breakpoints(f.g), envelope_breakpoints(f.h)]))
    keep = []
    for x in cand:
        left = one_sided_slope_1d(f, x, "left")
        right = one_sided_slope_1d(f, x, "right")
        if abs(right - left) > SLOPE_TOL * (1.0 + abs(left) + abs(right)):
            keep.append(x)
    return np.array(keep, dtype=float)


def end_slopes(f: DCFunction) -> Tuple[float, float]:
    """Slopes of f at -infinity and +infinity."""
    _require_1d(f)
    return (
        float(f.g.A[:, 0].min() - f.h.A[:, 0].min()),
        float(f.g.A[:, 0].max() - f.h.A[:, 0].max()),
    )


def _convex_lines(
    x0: float, v0: float, s0: float, knots: np.ndarray, jumps: np.ndarray
) -> MaxAffine:
    """Max of the interval lines of a convex PWL starting with slope s0 through (x0, v0)."""
    slopes = [s0]
    icpts = [v0 - s0 * x0]
    for xk, dk in zip(knots, jumps):
        val = slopes[-1] * xk + icpts[-1]
        slopes.append(slopes[-1] + dk)
        icpts.append(val - slopes[-1] * xk)
    return MaxAffine(np.array(slopes)[:, None], np.array(icpts))


def pwl_1d(
    knots: ArrayLike,
    values: ArrayLike,
    slope_left: float,
    slope_right: float,
) -> DCFunction:
    """
    Exact DC representation of a continuous piecewise-linear function.

    The function interpolates values at strictly increasing knots and
    continues linearly with slope_left / slope_right outside. Positive slope
    jumps go into g, negative ones into h.
    """
    x = np.atleast_1d(np.asarray(knots, dtype=float))
    v = np.atleast_1d(np.asarray(values, dtype=float))
    if x.size == 0 or x.shape != v.shape:
        raise ValidationError("pwl_1d needs matching nonempty knots and values")
    if np.any(np.diff(x) <= 0):
        raise ValidationError("pwl_1d knots must be strictly increasing")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        raise ValidationError("pwl_1d data must be finite")

    sigma = np.concatenate([[slope_left], np.diff(v) / np.diff(x), [slope_right]])
    jumps = np.diff(sigma)
    up = np.where(jumps > 0, jumps, 0.0)
    down = np.where(jumps < 0, -jumps, 0.0)

    pos = up > 0
    g = _convex_lines(x[0], v[0], float(slope_left), x[pos], up[pos])
    neg = down > 0
    if neg.any():
        h = _convex_lines(x[0], 0.0, 0.0, x[neg], down[neg])
    else:
        h = MaxAffine.constant(0.0, 1)
    return DCFunction(g, h)


def pwl_data(f: DCFunction) -> Tuple[np.ndarray, np.ndarray, float, float]:
    """Knots, knot values and end slopes of a 1-d function (knot 0 if affine)."""
    bps = breakpoints_1d(f)
    if bps.size == 0:
        bps = np.array([0.0])
    s_lo, s_hi = end_slopes(f)
    return bps, np.asarray(f(bps[:, None]), dtype=float), s_lo, s_hi


def truncate_1d(
    f: DCFunction,
    lo: float,
    hi: float,
    slope_lo: Optional[float] = None,
    slope_hi: Optional[float] = None,
) -> DCFunction:
    """
    f on [lo, hi], continued linearly outside.

    Args:
        slope_lo: Slope used left of lo (default: f's right slope at lo).
        slope_hi: Slope used right of hi (default: f's left slope at hi).
    """
    _require_1d(f)
    if not lo < hi:
        raise ValidationError("truncate_1d needs lo < hi")
    bps = breakpoints_1d(f)
    inner = bps[(bps > lo) & (bps < hi)]
    knots = np.concatenate([[lo], inner, [hi]])
    values = np.asarray(f(knots[:, None]), dtype=float)
    s_lo = one_sided_slope_1d(f, lo, "right") if slope_lo is None else slope_lo
    s_hi = one_sided_slope_1d(f, hi, "left") if slope_hi is None else slope_hi
    return pwl_1d(knots, values, s_lo, s_hi)
