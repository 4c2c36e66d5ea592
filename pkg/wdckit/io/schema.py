"""
Versioned JSON documents for functions, models and reports.

Every document is an object whose "schema" entry reads "wdckit/<kind>@1".
Floats go through json's shortest round-trip repr, so functions read back
bit-exactly.
"""

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from ..core.affine import MaxAffine
from ..core.dc import DCFunction
from ..exceptions import SchemaError, ValidationError
from ..fractal.ifs import FractalApprox
from ..planar.classify import TypeTag
from ..planar.model import Branch, PlanarLocalModel, RawGerm
from ..planar.sectors import DegenerateSectorSpec, OpenSectorSpec
from ..retraction.flow import RetractionTrace
from ..singular.cover import SegmentCover
from ..topology.euler import EulerResult
from ..topology.level import LevelLoops

logger = logging.getLogger(__name__)

PREFIX = "wdckit/"
VERSION = 1
KINDS = (
    "dc",
    "model",
    "germ",
    "curve",
    "value",
    "subdiff",
    "aura-report",
    "touch-report",
    "trace",
    "path",
    "euler",
    "loops",
    "type-tag",
    "sweep",
    "sector-aura",
    "cover",
    "fractal",
    "fractal-report",
    "fractal-dim",
)

Document = Dict[str, Any]


def tag(kind: str) -> str:
    if kind not in KINDS:
        raise SchemaError(f"unknown document kind {kind!r}")
    return f"{PREFIX}{kind}@{VERSION}"


def kind_of(doc: Any) -> str:
    """Kind named by a document's schema tag."""
    if not isinstance(doc, dict) or not isinstance(doc.get("schema"), str):
        raise SchemaError("document has no schema tag")
    name = doc["schema"]
    if not name.startswith(PREFIX) or "@" not in name:
        raise SchemaError(f"malformed schema tag {name!r}")
    kind, _, version = name[len(PREFIX):].rpartition("@")
    if kind not in KINDS:
        raise SchemaError(f"unknown schema kind {kind!r}")
    if version != str(VERSION):
        raise SchemaError(f"unsupported version {version!r} of {kind!r}")
    return kind


def plain(value: Any) -> Any:
    """Numpy arrays and scalars to lists and Python numbers, recursively."""
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


def document(kind: str, payload: Dict[str, Any]) -> Document:
    return {"schema": tag(kind), **plain(payload)}


def _field(doc: Dict[str, Any], key: str) -> Any:
    try:
        return doc[key]
    except (KeyError, TypeError) as e:
        raise SchemaError(f"missing field {key!r}") from e


def _max_affine(m: MaxAffine) -> Dict[str, Any]:
    return {"pieces": [{"a": a.tolist(), "b": float(b)} for a, b in zip(m.A, m.b)]}


def _read_max_affine(doc: Dict[str, Any], dim: int) -> MaxAffine:
    """Pieces as a list of {a: [..], b}; every gradient has dim entries."""
    pieces = _field(doc, "pieces")
    if not isinstance(pieces, list) or not pieces:
        raise SchemaError("pieces must be a non-empty list")
    A = np.array([np.asarray(_field(p, "a"), dtype=float) for p in pieces])
    if A.ndim != 2 or A.shape[1] != dim:
        raise SchemaError(f"piece gradients must have {dim} entries")
    b = np.array([float(_field(p, "b")) for p in pieces])
    return MaxAffine(A, b)


def dc_payload(f: DCFunction) -> Dict[str, Any]:
    return {"dim": f.dim, "g": _max_affine(f.g), "h": _max_affine(f.h)}


def read_dc(doc: Dict[str, Any]) -> DCFunction:
    try:
        dim = int(_field(doc, "dim"))
        g = _read_max_affine(_field(doc, "g"), dim)
        h = _read_max_affine(_field(doc, "h"), dim)
        return DCFunction(g, h)
    except (ValueError, TypeError, ValidationError) as e:
        raise SchemaError(f"malformed DC function: {e}") from e


def _sector_payload(s: Union[OpenSectorSpec, DegenerateSectorSpec]) -> Dict[str, Any]:
    if isinstance(s, OpenSectorSpec):
        return {"angle": s.angle, "radius": s.radius, "phi": dc_payload(s.phi)}
    return {
        "angle": s.angle,
        "radius": s.radius,
        "g_lo": dc_payload(s.g_lo),
        "h_hi": dc_payload(s.h_hi),
        "strict_tangent": s.strict_tangent,
    }


def model_payload(M: PlanarLocalModel) -> Dict[str, Any]:
    return {
        "kind": M.kind,
        "base": list(M.base),
        "radius": M.radius,
        "degenerate": None if M.degenerate is None else _sector_payload(M.degenerate),
        "sectors": [_sector_payload(s) for s in M.sectors],
    }


def read_model(doc: Dict[str, Any]) -> PlanarLocalModel:
    try:
        deg = doc.get("degenerate")
        spec = None
        if deg is not None:
            spec = DegenerateSectorSpec(
                float(_field(deg, "angle")),
                float(_field(deg, "radius")),
                read_dc(_field(deg, "g_lo")),
                read_dc(_field(deg, "h_hi")),
                bool(deg.get("strict_tangent", True)),
            )
        sectors = [
            OpenSectorSpec(
                float(_field(s, "angle")), float(_field(s, "radius")), read_dc(_field(s, "phi"))
            )
            for s in doc.get("sectors", [])
        ]
        return PlanarLocalModel(
            str(_field(doc, "kind")),
            tuple(_field(doc, "base")),
            float(_field(doc, "radius")),
            degenerate=spec,
            sectors=tuple(sectors),
        )
    except (ValueError, TypeError, AttributeError, ValidationError) as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError(f"malformed planar model: {e}") from e


def germ_payload(germ: RawGerm) -> Dict[str, Any]:
    return {
        "x": list(germ.x),
        "rho": germ.rho,
        "branches": [
            {"fn": dc_payload(b.fn), "angle": b.angle, "side": b.side} for b in germ.branches
        ],
    }


def read_germ(doc: Dict[str, Any]) -> RawGerm:
    try:
        branches = [
            Branch(read_dc(_field(b, "fn")), float(_field(b, "angle")), str(_field(b, "side")))
            for b in doc.get("branches", [])
        ]
        return RawGerm(tuple(_field(doc, "x")), float(_field(doc, "rho")), tuple(branches))
    except (ValueError, TypeError, AttributeError, ValidationError) as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError(f"malformed germ: {e}") from e


def read_curve(doc: Dict[str, Any]) -> np.ndarray:
    pts = np.asarray(_field(doc, "points"), dtype=float)
    if pts.ndim != 2 or len(pts) < 1:
        raise SchemaError("curve points must be a non-empty list of coordinate lists")
    return pts


def tag_payload(t: TypeTag) -> Dict[str, Any]:
    return {
        "value": t.value,
        "r": t.r,
        "u": t.u,
        "U": None if t.U is None else dc_payload(t.U),
        "L": None if t.L is None else dc_payload(t.L),
    }


def trace_payload(trace: RetractionTrace) -> Dict[str, Any]:
    return {
        "lip_f": trace.lip_f,
        "eps_reg": trace.eps_reg,
        "tol_level": trace.tol_level,
        "steps": trace.steps,
        "halvings": trace.halvings,
        "samples": [{"t": s.t, "x": s.x, "f": s.fx} for s in trace.samples],
    }


def cover_payload(cover: SegmentCover) -> Dict[str, Any]:
    return {
        "segments": [[p, q] for p, q in cover.segments],
        "provenance": [[list(pair) for pair in pp] for pp in cover.provenance],
        "clipped": cover.clipped,
        "note": cover.note,
    }


def loops_payload(loops: LevelLoops) -> Dict[str, Any]:
    return {"level": loops.level, "grid": loops.grid, "loops": loops.loops, "note": loops.note}


def fractal_payload(approx: FractalApprox) -> Dict[str, Any]:
    return {
        "depth": approx.depth,
        "hausdorff_bound": approx.hausdorff_bound,
        "points": approx.points,
    }


def to_document(obj: Any, kind: Optional[str] = None) -> Document:
    """Document for a domain value; report dataclasses need their kind."""
    if isinstance(obj, DCFunction):
        return document("dc", dc_payload(obj))
    if isinstance(obj, PlanarLocalModel):
        return document("model", model_payload(obj))
    if isinstance(obj, RawGerm):
        return document("germ", germ_payload(obj))
    if isinstance(obj, TypeTag):
        return document("type-tag", tag_payload(obj))
    if isinstance(obj, RetractionTrace):
        return document("trace", trace_payload(obj))
    if isinstance(obj, SegmentCover):
        return document("cover", cover_payload(obj))
    if isinstance(obj, LevelLoops):
        return document("loops", loops_payload(obj))
    if isinstance(obj, FractalApprox):
        return document("fractal", fractal_payload(obj))
    if isinstance(obj, EulerResult):
        return document("euler", dataclasses.asdict(obj))
    if kind is not None and dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return document(kind, dataclasses.asdict(obj))
    raise SchemaError(f"no document kind for {type(obj).__name__}")


READERS = {
    "dc": read_dc,
    "model": read_model,
    "germ": read_germ,
    "curve": read_curve,
}


def from_document(doc: Any, expect: Optional[Sequence[str]] = None) -> Any:
    """
    Domain value of an input document (dc, model, germ or curve).

    Raises:
        SchemaError: unknown or unexpected tag, or a malformed body.
    """
    kind = kind_of(doc)
    if expect is not None and kind not in expect:
        raise SchemaError(f"expected a {' or '.join(expect)} document, got {kind!r}")
    if kind not in READERS:
        raise SchemaError(f"{kind!r} documents are output only")
    return READERS[kind](doc)


def dumps(doc: Document) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_document(path: Union[str, Path], doc: Document) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc), encoding="utf-8")
    logger.debug(f"Wrote {kind_of(doc)} document to {path}")
    return path


def read_document(path: Union[str, Path], expect: Optional[Sequence[str]] = None) -> Any:
    """Parse a JSON file and return its domain value."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} is not valid JSON: {e}") from e
    return from_document(doc, expect)

