"""Tests for the min-norm descent retraction and its checks."""

import math
from typing import Dict, Tuple

import numpy as np
import pytest

from wdckit.aura import check_weak_regularity
from wdckit.core.dc import DCFunction
from wdckit.exceptions import RegularityError, ValidationError
from wdckit.retraction import (
    RetractionConfig,
    boundary_path,
    descent_direction,
    diameter,
    retract,
    retract_many,
    verify_trace,
)

SQUARE_MARGIN = 1 / math.sqrt(2.0)

Shapes = Dict[str, Tuple[DCFunction, int]]


@pytest.fixture
def cfg() -> RetractionConfig:
    return RetractionConfig(eps_reg=SQUARE_MARGIN)


def test_config_validation() -> None:
    with pytest.raises(ValidationError):
        RetractionConfig(eps_reg=0.0)
    with pytest.raises(ValidationError):
        RetractionConfig(eps_reg=1.0, step=-1.0)
    with pytest.raises(ValidationError):
        RetractionConfig(eps_reg=1.0, sufficient_decrease=1.5)


def test_config_from_report(square: DCFunction) -> None:
    report = check_weak_regularity(square)
    cfg = RetractionConfig.from_report(report, step=0.05)
    assert cfg.eps_reg == pytest.approx(SQUARE_MARGIN, abs=1e-12)
    assert cfg.step == 0.05


def test_descent_direction_on_diagonal(square: DCFunction) -> None:
    d = descent_direction(square, [2.0, 2.0], 0.5)
    np.testing.assert_allclose(d, [1 / math.sqrt(2.0)] * 2, atol=1e-9)
    with pytest.raises(RegularityError):
        descent_direction(square, [2.0, 2.0], 0.9)


def test_retract_off_axis(square: DCFunction, cfg: RetractionConfig) -> None:
    trace = retract(square, [3.0, 0.5], cfg)
    np.testing.assert_allclose(trace.endpoint, [1.0, 0.5], atol=1e-6)
    assert square(trace.endpoint) <= trace.tol_level
    assert trace.total_time == pytest.approx(1.0, abs=1e-6)
    report = verify_trace(trace, cfg, square)
    assert report.passed, report.failures


def test_retract_along_diagonal(square: DCFunction, cfg: RetractionConfig) -> None:
    trace = retract(square, [3.0, 3.0], cfg)
    np.testing.assert_allclose(trace.endpoint, [1.0, 1.0], atol=1e-6)
    assert np.all(np.diff(trace.values) < 0)
    assert verify_trace(trace, cfg, square).passed


def test_start_inside_is_a_fixed_point(square: DCFunction, cfg: RetractionConfig) -> None:
    trace = retract(square, [0.2, -0.3], cfg)
    assert len(trace.samples) == 1
    assert trace.steps == 0


def test_regularity_violation_is_raised(square: DCFunction) -> None:
    with pytest.raises(RegularityError):
        retract(square, [3.0, 3.0], RetractionConfig(eps_reg=0.9))


def test_negative_start_is_rejected(cfg: RetractionConfig) -> None:
    with pytest.raises(ValidationError):
        retract(DCFunction.affine([1.0, 0.0]), [-1.0, 0.0], cfg)


def test_retract_many_keeps_order(square: DCFunction, cfg: RetractionConfig) -> None:
    starts = [[3.0, 0.0], [0.0, -2.0], [0.0, 0.0]]
    traces = retract_many(square, starts, cfg, threads=2)
    ends = np.array([t.endpoint for t in traces])
    np.testing.assert_allclose(ends, [[1.0, 0.0], [0.0, -1.0], [0.0, 0.0]], atol=1e-6)


def test_verify_flags_a_wrong_margin(square: DCFunction, cfg: RetractionConfig) -> None:
    trace = retract(square, [3.0, 0.5], cfg)
    report = verify_trace(trace, RetractionConfig(eps_reg=10.0), square)
    assert not report.passed
    assert report.failures


def test_boundary_path_around_square(square: DCFunction, cfg: RetractionConfig) -> None:
    curve = [[1.0, 0.0], [2.0, 1.0], [0.0, 2.0], [-2.0, 1.0], [-1.0, 0.0]]
    path = boundary_path(square, curve, cfg)
    assert path.passed
    assert path.input_diameter == pytest.approx(4.0)
    assert np.all(np.abs(np.abs(path.points).max(axis=1) - 1.0) <= 1e-6)
    assert path.output_diameter <= path.bound
    assert path.delta_bound == pytest.approx(6.0 * 1.0 / SQUARE_MARGIN)


def test_boundary_path_needs_zero_endpoints(square: DCFunction, cfg: RetractionConfig) -> None:
    with pytest.raises(ValidationError):
        boundary_path(square, [[2.0, 0.0], [-1.0, 0.0]], cfg)
    with pytest.raises(ValidationError):
        boundary_path(square, [[1.0, 0.0]], cfg)


def test_diameter() -> None:
    assert diameter([[0.0, 0.0]]) == 0.0
    assert diameter([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]]) == pytest.approx(5.0)


def _shell_starts(f: DCFunction, width: float, count: int, seed: int) -> np.ndarray:
    pts = np.random.default_rng(seed).uniform(-6.0, 6.0, (400_000, 2))
    vals = np.asarray(f(pts), dtype=float)
    starts = pts[(vals > 1e-6) & (vals < width)]
    assert len(starts) >= count
    return starts[:count]


@pytest.mark.parametrize(
    "name", ["square", "annulus", "two_squares", "three_squares", "holed_square"]
)
def test_shell_starts_retract_within_bounds(name: str, shapes: Shapes) -> None:
    f, _ = shapes[name]
    report = check_weak_regularity(f)
    assert report.regular
    cfg = RetractionConfig.from_report(report, step=0.02)
    starts = _shell_starts(f, 0.1, 100, seed=sum(map(ord, name)))
    for trace in retract_many(f, starts, cfg):
        checked = verify_trace(trace, cfg, f, tol=1e-6)
        assert checked.passed, checked.failures
        f0 = float(trace.values[0])
        assert trace.total_time <= 1.1 * f0 / report.margin
        assert f(trace.endpoint) <= trace.tol_level


def _exterior_curve(rng: np.random.Generator) -> np.ndarray:
    """Polyline outside the unit square whose ends lie on its boundary."""
    lo = rng.uniform(0.0, 2.0 * math.pi)
    thetas = np.sort(lo + rng.uniform(0.1, 1.9 * math.pi) * np.linspace(0.0, 1.0, 20))
    dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    rim = dirs / np.abs(dirs).max(axis=1, keepdims=True)
    scale = np.concatenate([[1.0], rng.uniform(1.05, 2.5, len(thetas) - 2), [1.0]])
    return rim * scale[:, None]


def test_exterior_curves_respect_the_diameter_bound(
    square: DCFunction, cfg: RetractionConfig
) -> None:
    rng = np.random.default_rng(46)
    for _ in range(50):
        curve = _exterior_curve(rng)
        path = boundary_path(square, curve, cfg)
        assert path.passed
        assert path.output_diameter <= 6.0 / SQUARE_MARGIN * path.input_diameter + 1e-6
        assert np.all(np.abs(path.points).max(axis=1) <= 1.0 + 1e-6)
