"""Configuration management for wdckit."""

import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from dotenv import load_dotenv

if sys.version_info >= (3, 11):
    import tomllib
else:
    try:
        import tomli as tomllib
    except ImportError:
        tomllib = None


@dataclass
class ToleranceConfig:
    """Numerical tolerances shared by the polyhedral core."""

    activity: float = 1e-9  # piece active when within activity*(1+|f(x)|) of the max
    cell: float = 1e-8  # LP slack certifying a full-dimensional joint-activity cell
    wolfe: float = 1e-10  # min-norm point optimality certificate
    touch_angle: float = 1e-6  # radians
    zero: float = 1e-12


@dataclass
class AuraConfig:
    """Weak-regularity probing."""

    probe_radius: float = 100.0  # half-width of the boundedness probe box
    violation_threshold: float = 1e-6
    samples: int = 4096  # sampled mode / weak-touch plan size
    seed: int = 0
    shell: float = 0.1  # default epsilon_probe


@dataclass
class RetractionDefaults:
    """Defaults for the descent flow."""

    step: float = 0.01
    max_iter: int = 1_000_000
    sufficient_decrease: float = 0.9
    bisect_tol: float = 1e-12


@dataclass
class TopologyConfig:
    """Level tracing and Euler characteristic."""

    grid: float = 0.05
    refine: float = math.pi / 2  # cap on per-step angle increments
    residual: float = 0.1
    seam_perturb: float = 1e-9


@dataclass
class PlanarConfig:
    """Planar classification and synthesis."""

    probes: int = 10_000
    max_halvings: int = 60


@dataclass
class FractalConfig:
    """Self-similar example defaults."""

    alpha_deg: float = 18.0
    depth: int = 8
    grid: float = 0.005
    shell: Tuple[float, float] = (0.02, 0.2)
    tolerance: float = 0.02


@dataclass
class Config:
    """Main configuration."""

    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    aura: AuraConfig = field(default_factory=AuraConfig)
    retraction: RetractionDefaults = field(default_factory=RetractionDefaults)
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    planar: PlanarConfig = field(default_factory=PlanarConfig)
    fractal: FractalConfig = field(default_factory=FractalConfig)
    threads: Optional[int] = None
    log_file: Optional[Path] = None

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        """Create Config from dictionary."""
        fractal = dict(data.get("fractal", {}))
        if "shell" in fractal:
            fractal["shell"] = tuple(fractal["shell"])
        return cls(
            tolerances=ToleranceConfig(**data.get("tolerances", {})),
            aura=AuraConfig(**data.get("aura", {})),
            retraction=RetractionDefaults(**data.get("retraction", {})),
            topology=TopologyConfig(**data.get("topology", {})),
            planar=PlanarConfig(**data.get("planar", {})),
            fractal=FractalConfig(**fractal),
            threads=data.get("threads", env_threads()),
            log_file=Path(data["log_file"]) if data.get("log_file") else None,
        )


def env_threads() -> Optional[int]:
    """Worker cap from WDCKIT_THREADS, if set."""
    load_dotenv()
    raw = os.environ.get("WDCKIT_THREADS")
    if not raw:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        return None


def default_config_path() -> Path:
    """Config path from WDCKIT_CONFIG, else the per-user default."""
    load_dotenv()
    env = os.environ.get("WDCKIT_CONFIG")
    if env:
        return Path(env).expanduser()
    return Path.home() / ".config" / "wdckit" / "config.toml"


def load_config(path: Optional[Path] = None) -> Config:
    """
    Load configuration from TOML file.

    Args:
        path: Path to config file (defaults to default_config_path()).

    Returns:
        Config object (defaults if file doesn't exist).
    """
    if path is None:
        path = default_config_path()

    if not path.exists() or tomllib is None:
        return Config(threads=env_threads())

    with open(path, "rb") as f:
        data = tomllib.load(f)

    return Config.from_dict(data)


def get_default_config_toml() -> str:
    """Return default configuration as TOML string."""
    return '''# wdckit configuration

# Worker cap for parallel sweeps (omit for the executor default)
# threads = 4

# Uncomment to enable file logging
# log_file = "~/.local/share/wdckit/wdckit.log"

[tolerances]
activity = 1e-9       # relative activity tolerance for affine pieces
cell = 1e-8           # LP slack certifying full-dimensional cells
wolfe = 1e-10         # min-norm point certificate
touch_angle = 1e-6    # radians
zero = 1e-12

[aura]
probe_radius = 100.0  # boundedness probe box half-width
violation_threshold = 1e-6
samples = 4096
seed = 0
shell = 0.1

[retraction]
step = 0.01
max_iter = 1000000
sufficient_decrease = 0.9
bisect_tol = 1e-12

[topology]
grid = 0.05
refine = 1.5707963267948966   # pi/2
residual = 0.1
seam_perturb = 1e-9

[planar]
probes = 10000
max_halvings = 60

[fractal]
alpha_deg = 18.0
depth = 8
grid = 0.005
shell = [0.02, 0.2]
tolerance = 0.02
'''
