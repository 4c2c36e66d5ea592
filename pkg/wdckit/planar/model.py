"""Raw germ data and the three local models of a planar locally WDC set."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.affine import ArrayLike
from ..core.dc import DCFunction, combine
from ..core.pwl import breakpoints_1d, end_slopes, one_sided_slope_1d
from ..exceptions import ValidationError
from .sectors import (
    ORIGIN_TOL,
    TWO_PI,
    DegenerateSectorSpec,
    OpenSectorSpec,
    gauge_crossing,
    rotation,
    validate_sector,
)

logger = logging.getLogger(__name__)

SIDES = ("below", "above", "on")
KINDS = ("isolated-point", "degenerate", "complement")
MATCH_TOL = 1e-9
MATCH_SAMPLES = 8


@dataclass(frozen=True, eq=False)
class Branch:
    """
    Boundary curve t -> (t, fn(t)), t >= 0, drawn in the frame rotated by angle.

    side tells where the set lies: "below" is clockwise of the curve, "above"
    counterclockwise, "on" means the set is the curve itself locally.
    """

    fn: DCFunction
    angle: float
    side: str

    def __post_init__(self) -> None:
        if not isinstance(self.fn, DCFunction) or self.fn.dim != 1:
            raise ValidationError("branch curve must be a 1-d DC function")
        if self.side not in SIDES:
            raise ValidationError(f"unknown branch side {self.side!r}; expected one of {SIDES}")
        if not math.isfinite(self.angle):
            raise ValidationError("branch angle must be finite")
        if abs(float(self.fn(np.zeros(1)))) > ORIGIN_TOL:
            raise ValidationError("branch curve must pass through the base point")

    @property
    def tangent(self) -> float:
        """World angle of the one-sided tangent at the base point, in [0, 2 pi)."""
        s = one_sided_slope_1d(self.fn, 0.0, "right")
        t = (self.angle + math.atan(s)) % TWO_PI
        return 0.0 if TWO_PI - t <= MATCH_TOL else t

    def world(self, ts: ArrayLike, base: ArrayLike = (0.0, 0.0)) -> np.ndarray:
        t = np.atleast_1d(np.asarray(ts, dtype=float))
        Q = np.column_stack([t, np.asarray(self.fn(t[:, None]), dtype=float)])
        return np.asarray(base, dtype=float) + Q @ rotation(self.angle).T

    def at_radius(self, rho: float, base: ArrayLike = (0.0, 0.0)) -> np.ndarray:
        return self.world([gauge_crossing(self.fn, rho, "right")], base)[0]

    def with_side(self, side: str) -> "Branch":
        return Branch(self.fn, self.angle, side)


@dataclass(frozen=True)
class RawGerm:
    """Boundary curves of a closed planar set through the point x, inside B(x, rho)."""

    x: Tuple[float, float]
    rho: float
    branches: Tuple[Branch, ...] = ()

    def __post_init__(self) -> None:
        x = tuple(float(v) for v in np.asarray(self.x, dtype=float).reshape(-1))
        if len(x) != 2:
            raise ValidationError("germ base point must be planar")
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ValidationError("germ radius must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "branches", tuple(self.branches))


def mirror(phi: DCFunction) -> DCFunction:
    """t -> -phi(-t): the left half of a sector boundary as a branch rotated by pi."""
    flipped = combine("affine_precompose", phi, np.array([[-1.0]]), np.zeros(1))
    return combine("scale", flipped, -1.0)


def same_curve(a: Branch, b: Branch, rho: float) -> bool:
    """Whether two branches trace the same curve up to radius rho."""
    if abs((a.tangent - b.tangent + math.pi) % TWO_PI - math.pi) > MATCH_TOL:
        return False
    for k in range(1, MATCH_SAMPLES + 1):
        r = rho * k / MATCH_SAMPLES
        if np.linalg.norm(a.at_radius(r) - b.at_radius(r)) > MATCH_TOL * (1.0 + rho):
            return False
    return True


def same_function(f: DCFunction, g: DCFunction) -> bool:
    knots = np.union1d(breakpoints_1d(f), breakpoints_1d(g))
    knots = np.union1d(knots, [0.0])
    if not np.allclose(f(knots[:, None]), g(knots[:, None]), rtol=0.0, atol=MATCH_TOL):
        return False
    return bool(np.allclose(end_slopes(f), end_slopes(g), rtol=0.0, atol=MATCH_TOL))


@dataclass(frozen=True, eq=False)
class PlanarLocalModel:
    """
    M cap B(base, radius) as one of: the point itself, a degenerate closed
    sector, or the complement of pairwise disjoint open sectors.
    """

    kind: str
    base: Tuple[float, float]
    radius: float
    degenerate: Optional[DegenerateSectorSpec] = None
    sectors: Tuple[OpenSectorSpec, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        base = tuple(float(v) for v in np.asarray(self.base, dtype=float).reshape(-1))
        if len(base) != 2:
            raise ValidationError("model base point must be planar")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError("model radius must be positive")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "sectors", tuple(self.sectors))
        if self.kind == "degenerate" and self.degenerate is None:
            raise ValidationError("a degenerate model needs its sector")
        if self.kind == "complement" and not self.sectors:
            raise ValidationError("a complement model needs at least one open sector")

    @classmethod
    def isolated(cls, base: ArrayLike, radius: float) -> "PlanarLocalModel":
        return cls("isolated-point", tuple(base), radius)  # type: ignore[arg-type]

    @classmethod
    def degenerate_sector(cls, base: ArrayLike, spec: DegenerateSectorSpec) -> "PlanarLocalModel":
        return cls("degenerate", tuple(base), spec.radius, degenerate=spec)  # type: ignore

    @classmethod
    def complement(
        cls, base: ArrayLike, sectors: Sequence[OpenSectorSpec]
    ) -> "PlanarLocalModel":
        radius = min(s.radius for s in sectors)
        return cls("complement", tuple(base), radius, sectors=tuple(sectors))  # type: ignore

    def validate(self) -> None:
        """Raise ValidationError if a sector spec fails its exact check."""
        specs: List = [self.degenerate] if self.degenerate is not None else list(self.sectors)
        for k, spec in enumerate(specs):
            report = validate_sector(spec)
            if not report.passed:
                raise ValidationError(
                    f"sector {k} of the {self.kind} model fails at x={report.abscissa}: "
                    f"{report.reason}"
                )

    def contains(self, points: ArrayLike) -> np.ndarray:
        """Membership in the modeled set; False outside B(base, radius)."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        rel = np.linalg.norm(P - np.asarray(self.base), axis=1)
        inside = rel <= self.radius
        if self.kind == "isolated-point":
            return inside & (rel <= ORIGIN_TOL)
        if self.kind == "degenerate":
            assert self.degenerate is not None
            return inside & self.degenerate.contains(P, self.base)
        hit = np.zeros(len(P), dtype=bool)
        for s in self.sectors:
            hit |= s.contains(P, self.base)
        return inside & ~hit

    def branches(self) -> List[Branch]:
        """Boundary branches through the base point, shared sector sides merged to "on"."""
        if self.kind == "isolated-point":
            return []
        if self.kind == "degenerate":
            spec = self.degenerate
            assert spec is not None
            if same_function(spec.g_lo, spec.h_hi):
                return [Branch(spec.g_lo, spec.angle, "on")]
            return [Branch(spec.g_lo, spec.angle, "above"), Branch(spec.h_hi, spec.angle, "below")]

        out: List[Branch] = []
        for s in self.sectors:
            for cand in (
                Branch(s.phi, s.angle, "below"),
                Branch(mirror(s.phi), s.angle + math.pi, "above"),
            ):
                twin = next(
                    (k for k, b in enumerate(out) if same_curve(b, cand, self.radius)), None
                )
                if twin is None:
                    out.append(cand)
                else:
                    out[twin] = out[twin].with_side("on")
        return out

    def to_germ(self) -> RawGerm:
        return RawGerm(self.base, self.radius, tuple(self.branches()))
