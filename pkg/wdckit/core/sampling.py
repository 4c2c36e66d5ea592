"""Deterministic low-discrepancy sampling plans."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.stats import qmc

from ..exceptions import ValidationError
from .affine import ArrayLike


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """Unscrambled Halton points in a box; the seed fast-forwards the sequence."""

    box_lo: np.ndarray
    box_hi: np.ndarray
    count: int = 4096
    seed: int = 0

    def __post_init__(self) -> None:
        lo = np.atleast_1d(np.asarray(self.box_lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.box_hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1 or np.any(hi <= lo):
            raise ValidationError("sampling box needs lo < hi componentwise")
        if self.count < 1:
            raise ValidationError("sampling plan needs a positive count")
        if self.seed < 0:
            raise ValidationError("sampling seed must be nonnegative")
        object.__setattr__(self, "box_lo", lo)
        object.__setattr__(self, "box_hi", hi)

    @classmethod
    def centered(cls, dim: int, radius: float, count: int = 4096, seed: int = 0) -> "SamplingPlan":
        r = float(radius)
        return cls(np.full(dim, -r), np.full(dim, r), count, seed)

    @property
    def dim(self) -> int:
        return int(self.box_lo.shape[0])

    @property
    def box(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.box_lo, self.box_hi

    def points(self) -> np.ndarray:
        sampler = qmc.Halton(d=self.dim, scramble=False)
        sampler.fast_forward(1 + self.seed)
        return qmc.scale(sampler.random(self.count), self.box_lo, self.box_hi)


def random_points(
    lo: ArrayLike, hi: ArrayLike, count: int, seed: int = 0
) -> np.ndarray:
    """Uniform pseudo-random points in a box from a seeded generator."""
    lo_a = np.asarray(lo, dtype=float)
    hi_a = np.asarray(hi, dtype=float)
    rng = np.random.default_rng(seed)
    return lo_a + (hi_a - lo_a) * rng.random((count, lo_a.shape[0]))
