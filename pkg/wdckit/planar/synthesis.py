"""Polyhedral DC auras for the planar local models."""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from ..aura.constructors import aura_degenerate_sector, aura_sector_complement
from ..aura.regularity import AuraReport, check_weak_regularity
from ..core.dc import DCFunction
from ..core.pwl import truncate_1d
from ..core.sampling import SamplingPlan
from ..exceptions import ConsistencyError
from ..topology.shapes import point_aura
from .model import PlanarLocalModel
from .sectors import gauge_crossing

logger = logging.getLogger(__name__)

PROBES = 10_000
ZERO_TOL = 1e-12
SHELL = 0.1
# asymmetric probe box keeps Halton points off lines through the base point
BOX_SKEW = 1.234e-4


def _bounded(fn: DCFunction, rho: float) -> DCFunction:
    """fn on [0, x(rho)] continued flat, so no breakpoint lies beyond the ball."""
    t = gauge_crossing(fn, rho, "right")
    return truncate_1d(fn, 0.0, t, slope_hi=0.0)


def membership_mismatches(
    F: DCFunction, M: PlanarLocalModel, probes: int = PROBES, seed: int = 0
) -> Tuple[int, int]:
    """(mismatches, probes used): points of B(base, radius) where {F = 0} and M disagree."""
    base = np.asarray(M.base)
    lo = base - M.radius * (1.0 + BOX_SKEW)
    hi = base + M.radius * (1.0 - BOX_SKEW)
    pts = SamplingPlan(lo, hi, probes, seed).points()
    pts = pts[np.linalg.norm(pts - base, axis=1) < M.radius]
    zero = np.asarray(F(pts), dtype=float) <= ZERO_TOL
    return int(np.count_nonzero(zero != M.contains(pts))), len(pts)


def build_planar_aura(
    M: PlanarLocalModel,
    probes: int = PROBES,
    seed: int = 0,
    shell: float = SHELL,
    threads: Optional[int] = None,
) -> Tuple[DCFunction, AuraReport]:
    """
    DC aura of the modeled set inside B(base, radius), with its margin report.

    The isolated point gets |y - x|_1, a degenerate sector its sector aura,
    a complement the max of the sector hypograph auras. The zero set is
    checked against M.contains on a Halton probe set, and the exact margin
    is taken over the square inscribed in the ball.

    Raises:
        ValidationError: the model does not validate.
        ConsistencyError: probe mismatch or zero margin.
    """
    M.validate()
    if M.kind == "isolated-point":
        F = point_aura(M.base)
    elif M.kind == "degenerate":
        spec = M.degenerate
        assert spec is not None
        F = aura_degenerate_sector(
            _bounded(spec.g_lo, spec.radius),
            _bounded(spec.h_hi, spec.radius),
            spec.angle,
            M.base,
            strict_tangent=spec.strict_tangent,
        )
    else:
        F = aura_sector_complement(M.sectors, M.base)

    bad, used = membership_mismatches(F, M, probes, seed)
    if bad:
        raise ConsistencyError(f"aura zero set disagrees with the model on {bad} of {used} probes")

    half = M.radius / math.sqrt(2.0)
    base = np.asarray(M.base)
    report = check_weak_regularity(
        F, 0.0, shell, window=(base - half, base + half), threads=threads
    )
    if not report.margin > 0:
        raise ConsistencyError(f"aura of the {M.kind} model has margin {report.margin}")
    logger.info(f"Planar aura for {M.kind} model: margin {report.margin:.6g}, {used} probes")
    return F, report
