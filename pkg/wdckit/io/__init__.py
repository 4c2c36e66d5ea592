"""Text-schema documents, CSV tables and SVG plots."""

from .csvio import write_loops_csv, write_trace_csv, write_traces_csv
from .schema import (
    KINDS,
    document,
    dumps,
    from_document,
    kind_of,
    read_document,
    tag,
    to_document,
    write_document,
)
from .svg import render_cover, render_fractal, render_loops, render_sectors, render_traces

__all__ = [
    "write_loops_csv",
    "write_trace_csv",
    "write_traces_csv",
    "KINDS",
    "document",
    "dumps",
    "from_document",
    "kind_of",
    "read_document",
    "tag",
    "to_document",
    "write_document",
    "render_cover",
    "render_fractal",
    "render_loops",
    "render_sectors",
    "render_traces",
]
