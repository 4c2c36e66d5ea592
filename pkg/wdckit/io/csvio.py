"""CSV tables for retraction traces and level loops."""

import csv
import logging
from pathlib import Path
from typing import Sequence, Union

from ..retraction.flow import RetractionTrace
from ..topology.level import LevelLoops

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def write_trace_csv(trace: RetractionTrace, path: PathLike) -> Path:
    """Columns t, x0..x{d-1}, f; one row per trace sample."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dim = len(trace.start)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *(f"x{i}" for i in range(dim)), "f"])
        for s in trace.samples:
            w.writerow([repr(float(s.t)), *(repr(float(v)) for v in s.x), repr(float(s.fx))])
    logger.debug(f"Wrote {len(trace.samples)} trace rows to {path}")
    return path


def write_traces_csv(traces: Sequence[RetractionTrace], path: PathLike) -> Path:
    """Several traces in one table, with a leading trace index column."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dim = len(traces[0].start) if traces else 0
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["trace", "t", *(f"x{i}" for i in range(dim)), "f"])
        for k, trace in enumerate(traces):
            for s in trace.samples:
                w.writerow([k, repr(float(s.t)), *(repr(float(v)) for v in s.x), repr(float(s.fx))])
    return path


def write_loops_csv(loops: LevelLoops, path: PathLike) -> Path:
    """Columns loop, x, y; loops are listed without repeating the first point."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["loop", "x", "y"])
        for k, loop in enumerate(loops.loops):
            for x, y in loop:
                w.writerow([k, repr(float(x)), repr(float(y))])
    logger.debug(f"Wrote {len(loops)} loop(s) to {path}")
    return path
