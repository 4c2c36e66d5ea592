"""DC auras: constructors, weak-regularity margins, weak touching."""

from .constructors import (
    aura_ball_cap,
    aura_degenerate_sector,
    aura_distance_polytope,
    aura_hypograph,
    aura_sector_complement,
    min_aura,
    rotate_about,
)
from .regularity import AuraReport, check_weak_regularity, scaled_report, shell_strata
from .touch import WeakTouchReport, antipodal_direction, aura_sum, weak_touch

__all__ = [
    "aura_ball_cap",
    "aura_degenerate_sector",
    "aura_distance_polytope",
    "aura_hypograph",
    "aura_sector_complement",
    "min_aura",
    "rotate_about",
    "AuraReport",
    "check_weak_regularity",
    "scaled_report",
    "shell_strata",
    "WeakTouchReport",
    "antipodal_direction",
    "aura_sum",
    "weak_touch",
]
