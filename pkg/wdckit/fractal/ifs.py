"""The two-map self-similar curve and its polyline approximations."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..core.affine import ArrayLike
from ..exceptions import DepthOverflowError, ValidationError
from ..utils.parallel import chunked

logger = logging.getLogger(__name__)

MAX_DEPTH = 20
CHUNK = 4096

Similarity = Callable[[np.ndarray], np.ndarray]


def reflection(theta: float) -> np.ndarray:
    """Reflection about the line through the origin at angle theta."""
    c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return np.array([[c, s], [s, -c]])


@dataclass(frozen=True)
class IFSSpec:
    """
    Triangle H = conv{V-, V+, V} with base angles alpha and the two
    similarities mapping H onto the sub-triangles at V- and V+.
    """

    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < math.pi / 8):
            raise ValidationError(f"alpha must lie in (0, pi/8), got {self.alpha}")

    @classmethod
    def from_degrees(cls, alpha_deg: float) -> "IFSSpec":
        return cls(math.radians(alpha_deg))

    @property
    def ratio(self) -> float:
        """Similarity ratio a = 1 / (2 cos alpha), in (1/2, 1)."""
        return 1.0 / (2.0 * math.cos(self.alpha))

    @property
    def gamma(self) -> float:
        """Obtuse angle B- V B+ = pi - 4 alpha."""
        return math.pi - 4.0 * self.alpha

    @property
    def v_minus(self) -> np.ndarray:
        return np.array([-0.5, 0.0])

    @property
    def v_plus(self) -> np.ndarray:
        return np.array([0.5, 0.0])

    @property
    def apex(self) -> np.ndarray:
        return np.array([0.0, 0.5 * math.tan(self.alpha)])

    @property
    def b_minus(self) -> np.ndarray:
        return np.array([-(0.5 - 0.25 / math.cos(self.alpha) ** 2), 0.0])

    @property
    def b_plus(self) -> np.ndarray:
        return -self.b_minus

    def triangle(self) -> np.ndarray:
        return np.array([self.v_minus, self.v_plus, self.apex])

    def sub_triangles(self) -> Tuple[np.ndarray, np.ndarray]:
        """(H-, H+) = (conv{V-, B-, V}, conv{V+, B+, V})."""
        return (
            np.array([self.v_minus, self.b_minus, self.apex]),
            np.array([self.v_plus, self.b_plus, self.apex]),
        )

    @property
    def diameter(self) -> float:
        T = self.triangle()
        return float(max(np.linalg.norm(T[i] - T[j]) for i in range(3) for j in range(i)))

    def maps(self) -> Tuple[Similarity, Similarity]:
        """(phi-, phi+), orientation-reversing with ratio a, fixing V- and V+."""
        a = self.ratio
        lo, hi = self.v_minus, self.v_plus
        R_lo = a * reflection(0.5 * self.alpha)
        R_hi = a * reflection(math.pi - 0.5 * self.alpha)

        def phi_minus(x: np.ndarray) -> np.ndarray:
            return lo + (np.asarray(x, dtype=float) - lo) @ R_lo.T

        def phi_plus(x: np.ndarray) -> np.ndarray:
            return hi + (np.asarray(x, dtype=float) - hi) @ R_hi.T

        return phi_minus, phi_plus


@dataclass
class FractalApprox:
    """Depth-n polyline from V- to V+ through the images of the base segment."""

    points: np.ndarray
    depth: int
    hausdorff_bound: float

    @property
    def segments(self) -> np.ndarray:
        """Array of shape (2^n, 2, 2): consecutive point pairs."""
        return np.stack([self.points[:-1], self.points[1:]], axis=1)

    def __len__(self) -> int:
        return len(self.points) - 1


def ifs_generate(spec: IFSSpec, depth: int) -> FractalApprox:
    """
    Images of V-V+ under all depth-fold compositions of phi- and phi+.

    Raises:
        DepthOverflowError: depth outside 0..20.
    """
    if not (0 <= depth <= MAX_DEPTH):
        raise DepthOverflowError(f"depth {depth} outside 0..{MAX_DEPTH}")
    phi_minus, phi_plus = spec.maps()
    pts = np.array([spec.v_minus, spec.v_plus])
    for _ in range(depth):
        pts = np.concatenate([phi_minus(pts), phi_plus(pts)[1:]])
    bound = spec.ratio**depth * spec.diameter
    logger.debug(f"IFS depth {depth}: {len(pts) - 1} segments, Hausdorff bound {bound:.3g}")
    return FractalApprox(pts, depth, bound)


def hausdorff_dim(spec: IFSSpec) -> float:
    """ln(1/2) / ln(a), in (1, 2)."""
    return math.log(0.5) / math.log(spec.ratio)


def _segment_feet(P: np.ndarray, seg: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Distances (m, s) and nearest points (m, s, 2) from points to segments."""
    p, q = seg[:, 0], seg[:, 1]
    d = q - p
    L2 = np.maximum((d**2).sum(axis=1), np.finfo(float).tiny)
    rel = P[:, None, :] - p[None, :, :]
    t = np.clip((rel * d[None]).sum(axis=2) / L2[None], 0.0, 1.0)
    feet = p[None] + t[..., None] * d[None]
    return np.linalg.norm(P[:, None, :] - feet, axis=2), feet


def distance_to_approx(
    points: ArrayLike, approx: FractalApprox, chunk: int = CHUNK
) -> np.ndarray:
    """Distance from each point to the polyline."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    seg = approx.segments
    out = np.empty(len(P))
    for sl in chunked(len(P), chunk):
        dist, _ = _segment_feet(P[sl], seg)
        out[sl] = dist.min(axis=1)
    return out


def projection_fan(
    x: ArrayLike, approx: FractalApprox, fan_tol: float, dist: Optional[float] = None
) -> np.ndarray:
    """
    Unit vectors (x - y) / |x - y| for the nearest points y on every segment
    within dist(x, approx) + fan_tol.
    """
    P = np.asarray(x, dtype=float).reshape(1, 2)
    d, feet = _segment_feet(P, approx.segments)
    d, feet = d[0], feet[0]
    if dist is None:
        dist = float(d.min())
    if not dist > 0:
        raise ValidationError("projection fan of a point on the approximation")
    near = feet[d <= dist + fan_tol]
    vec = P[0] - near
    vec = vec / np.linalg.norm(vec, axis=1)[:, None]
    return np.unique(np.round(vec, 15), axis=0)
