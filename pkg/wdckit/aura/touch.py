"""Weak touching of two auras and the aura sum."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from ..core.arrangement import common_refinement, overlay_cells, strata
from ..core.dc import DCFunction, combine
from ..core.polytope import VPolytope
from ..core.sampling import SamplingPlan
from ..core.subdiff import CLARKE_MAX_DIM, subdiff
from ..exceptions import ValidationError, WeakTouchError

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-9
TOUCH_ANGLE = 1e-6
PROBE_RADIUS = 100.0
WEIGHT_CAP = 1e6


@dataclass(frozen=True)
class WeakTouchReport:
    """Outcome of a weak-touch probe; the witness normal v is a unit vector."""

    touched: bool
    witness_point: Optional[Tuple[float, ...]] = None
    witness_normal: Optional[Tuple[float, ...]] = None
    probes: int = 0
    exact: bool = False


def _unit_rows(V: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(V, axis=1)
    keep = n > ZERO_TOL
    return V[keep] / n[keep, None]


def antipodal_direction(
    P: VPolytope, Q: VPolytope, touch_angle: float = TOUCH_ANGLE
) -> Optional[np.ndarray]:
    """
    A unit v with v in the directions of P minus {0} and -v in those of Q minus {0}.

    The directions of a hull minus the origin are those of the cone spanned by
    its vertices, so this asks for a nonzero u = sum lam_i p_i = -sum mu_j q_j
    with lam, mu >= 0. Each coordinate of u is maximized and minimized over
    |u|_inf <= 1; a touch is reported when some optimum exceeds touch_angle.
    """
    Pn = _unit_rows(P.vertices)
    Qn = _unit_rows(Q.vertices)
    if len(Pn) == 0 or len(Qn) == 0:
        return None
    m, k, d = len(Pn), len(Qn), P.dim
    # variables: lam (m), mu (k), u (d)
    A_eq = np.zeros((2 * d, m + k + d))
    A_eq[:d, :m] = Pn.T
    A_eq[:d, m + k:] = -np.eye(d)
    A_eq[d:, m:m + k] = Qn.T
    A_eq[d:, m + k:] = np.eye(d)
    b_eq = np.zeros(2 * d)
    bounds = [(0.0, WEIGHT_CAP)] * (m + k) + [(-1.0, 1.0)] * d
    for axis in range(d):
        for sign in (1.0, -1.0):
            cost = np.zeros(m + k + d)
            cost[m + k + axis] = -sign
            res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
            if res.status == 0 and -res.fun > touch_angle:
                u = res.x[m + k:]
                return np.asarray(u / np.linalg.norm(u))
    return None


def _zero_candidates_2d(
    f: DCFunction, g: DCFunction, lo: np.ndarray, hi: np.ndarray
) -> List[Tuple[np.ndarray, VPolytope, VPolytope]]:
    """Strata representatives of the common refinement lying in both zero sets."""
    fc = overlay_cells(f, lo, hi)
    gc = overlay_cells(g, lo, hi)
    cells = common_refinement(fc, gc, lo, hi)
    out = []
    for s in strata(cells, lo, hi):
        if s.on_boundary:
            continue
        fa = fc[cells[s.incident[0]].gi].value(s.point[None, :])[0]
        ga = gc[cells[s.incident[0]].hj].value(s.point[None, :])[0]
        if abs(fa) > ZERO_TOL or abs(ga) > ZERO_TOL:
            continue
        hf = VPolytope(np.array([fc[cells[i].gi].grad for i in s.incident])).pruned()
        hg = VPolytope(np.array([gc[cells[i].hj].grad for i in s.incident])).pruned()
        out.append((s.point, hf, hg))
    return out


def weak_touch(
    f: DCFunction,
    g: DCFunction,
    plan: Optional[SamplingPlan] = None,
    touch_angle: float = TOUCH_ANGLE,
    probe_radius: float = PROBE_RADIUS,
) -> WeakTouchReport:
    """
    Look for a common zero x and a unit v with v in the normalized hull of f
    at x and -v in that of g.

    In the plane every stratum of the common arrangement is probed, which
    decides the question for polyhedral inputs within the box (the plan's box,
    else the probe box). Plan samples are probed in every dimension; an
    untouched answer from samples alone is a semidecision.
    """
    if f.dim != g.dim:
        raise ValidationError(f"cannot compare {f.dim}-d and {g.dim}-d auras")
    d = f.dim
    candidates: List[Tuple[np.ndarray, VPolytope, VPolytope]] = []
    exact = False
    if d == 2:
        if plan is not None:
            lo, hi = plan.box
        else:
            lo, hi = np.full(2, -probe_radius), np.full(2, probe_radius)
        candidates.extend(_zero_candidates_2d(f, g, lo, hi))
        exact = True

    if plan is not None:
        if plan.dim != d:
            raise ValidationError(f"sampling plan of dimension {plan.dim} for {d}-d auras")
        pts = plan.points()
        both = (np.abs(np.asarray(f(pts))) <= ZERO_TOL) & (np.abs(np.asarray(g(pts))) <= ZERO_TOL)
        sub_mode = "clarke" if d <= CLARKE_MAX_DIM else "outer"
        for x in pts[both]:
            candidates.append((x, subdiff(f, x, sub_mode).hull, subdiff(g, x, sub_mode).hull))

    for x, hf, hg in candidates:
        v = antipodal_direction(hf, hg, touch_angle)
        if v is not None:
            logger.info(f"Weak touch at {x.tolist()} with normal {v.tolist()}")
            return WeakTouchReport(
                True,
                tuple(float(t) for t in x),
                tuple(float(t) for t in v),
                len(candidates),
                exact,
            )
    logger.debug(f"No weak touch among {len(candidates)} common zero probes")
    return WeakTouchReport(False, probes=len(candidates), exact=exact)


def aura_sum(
    f: DCFunction, g: DCFunction, plan: Optional[SamplingPlan] = None, **kwargs: float
) -> Tuple[DCFunction, WeakTouchReport]:
    """
    f + g together with the weak-touch evidence.

    Raises:
        WeakTouchError: the auras touch weakly.
    """
    report = weak_touch(f, g, plan, **kwargs)
    if report.touched:
        raise WeakTouchError(report)
    return combine("add", f, g), report
