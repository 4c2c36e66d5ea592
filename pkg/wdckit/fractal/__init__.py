"""Self-similar curve with a Lipschitz aura: generation and the numerical subgradient bound."""

from .ifs import (
    FractalApprox,
    IFSSpec,
    distance_to_approx,
    hausdorff_dim,
    ifs_generate,
    projection_fan,
    reflection,
)
from .regularity import FractalReport, fractal_regularity_check, judge_bound, shell_grid

__all__ = [
    "FractalApprox",
    "IFSSpec",
    "distance_to_approx",
    "hausdorff_dim",
    "ifs_generate",
    "projection_fan",
    "reflection",
    "FractalReport",
    "fractal_regularity_check",
    "judge_bound",
    "shell_grid",
]
