"""Tests for JSON documents, CSV tables and SVG output."""

import csv
import json
import math
from pathlib import Path
from typing import Dict

import numpy as np
import pytest

from conftest import sup_norm
from wdckit.aura import check_weak_regularity
from wdckit.core.dc import DCFunction
from wdckit.exceptions import SchemaError
from wdckit.fractal import IFSSpec, ifs_generate
from wdckit.io import (
    dumps,
    from_document,
    kind_of,
    read_document,
    render_cover,
    render_fractal,
    render_loops,
    render_sectors,
    render_traces,
    tag,
    to_document,
    write_document,
    write_loops_csv,
    write_trace_csv,
    write_traces_csv,
)
from wdckit.planar import PlanarLocalModel
from wdckit.retraction import RetractionConfig, retract, retract_many
from wdckit.singular import singular_set_pwa_2d
from wdckit.topology import level_loops_2d


@pytest.fixture
def cfg() -> RetractionConfig:
    return RetractionConfig(eps_reg=1 / math.sqrt(2.0), step=0.05)


class TestSchema:
    def test_tag(self) -> None:
        assert tag("dc") == "wdckit/dc@1"
        with pytest.raises(SchemaError):
            tag("spline")

    def test_dc_round_trip(self, tmp_path: Path, holed_square: DCFunction) -> None:
        doc = to_document(holed_square)
        assert kind_of(doc) == "dc"
        back = from_document(json.loads(dumps(doc)))
        np.testing.assert_array_equal(back.g.A, holed_square.g.A)
        np.testing.assert_array_equal(back.h.b, holed_square.h.b)
        path = write_document(tmp_path / "out" / "f.json", doc)
        again = read_document(path, expect=["dc"])
        pts = np.random.default_rng(3).uniform(-3.0, 3.0, (200, 2))
        np.testing.assert_array_equal(again(pts), holed_square(pts))

    def test_dc_document_shape(self) -> None:
        doc = json.loads(dumps(to_document(sup_norm())))
        assert doc["dim"] == 2
        assert doc["g"]["pieces"][0] == {"a": [1.0, 0.0], "b": 0.0}
        assert len(doc["g"]["pieces"]) == 4
        assert doc["h"]["pieces"] == [{"a": [0.0, 0.0], "b": 0.0}]

    def test_reads_a_hand_written_document(self) -> None:
        text = (
            '{"schema": "wdckit/dc@1", "dim": 1,'
            ' "g": {"pieces": [{"a": [1], "b": 0}, {"a": [-1], "b": 0}]},'
            ' "h": {"pieces": [{"a": [0], "b": 0.5}]}}'
        )
        f = from_document(json.loads(text), expect=["dc"])
        np.testing.assert_allclose(f(np.array([[-2.0], [0.0], [3.0]])), [1.5, -0.5, 2.5])

    def test_model_round_trip(self, two_quadrants: PlanarLocalModel) -> None:
        back = from_document(json.loads(dumps(to_document(two_quadrants))), expect=["model"])
        assert back.kind == "complement"
        pts = np.random.default_rng(5).uniform(-0.9, 0.9, (500, 2))
        np.testing.assert_array_equal(back.contains(pts), two_quadrants.contains(pts))

    def test_germ_round_trip(self, two_quadrants: PlanarLocalModel) -> None:
        germ = two_quadrants.to_germ()
        back = from_document(to_document(germ))
        assert back.rho == germ.rho
        assert [b.side for b in back.branches] == [b.side for b in germ.branches]

    def test_report_needs_a_kind(self, square: DCFunction) -> None:
        report = check_weak_regularity(square)
        with pytest.raises(SchemaError):
            to_document(report)
        doc = json.loads(dumps(to_document(report, "aura-report")))
        assert doc["schema"] == "wdckit/aura-report@1"
        assert doc["margin"] == pytest.approx(1 / math.sqrt(2.0))

    @pytest.mark.parametrize(
        "doc",
        [
            {},
            {"schema": 3},
            {"schema": "other/dc@1"},
            {"schema": "wdckit/spline@1"},
            {"schema": "wdckit/dc@2"},
            {"schema": "wdckit/dc@1", "dim": 2},
            {"schema": "wdckit/dc@1", "dim": 2, "g": {"A": [[1.0, 0.0]], "b": [0.0]}, "h": {}},
            {"schema": "wdckit/dc@1", "dim": 2, "g": {"pieces": []}, "h": {"pieces": []}},
            {
                "schema": "wdckit/dc@1",
                "dim": 2,
                "g": {"pieces": [{"a": [1.0], "b": 0.0}]},
                "h": {"pieces": [{"a": [0.0, 0.0], "b": 0.0}]},
            },
            {"schema": "wdckit/euler@1", "chi": 1},
        ],
    )
    def test_bad_documents(self, doc: Dict[str, object]) -> None:
        with pytest.raises(SchemaError):
            from_document(doc)

    def test_unexpected_kind(self) -> None:
        with pytest.raises(SchemaError):
            from_document(to_document(sup_norm()), expect=["model"])

    def test_bad_files(self, tmp_path: Path) -> None:
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(SchemaError):
            read_document(bad)
        with pytest.raises(SchemaError):
            read_document(tmp_path / "missing.json")

    def test_curve(self) -> None:
        pts = from_document({"schema": "wdckit/curve@1", "points": [[1.0, 0.0], [0.0, 1.0]]})
        assert pts.shape == (2, 2)
        with pytest.raises(SchemaError):
            from_document({"schema": "wdckit/curve@1", "points": []})


class TestCsv:
    def test_trace(self, tmp_path: Path, square: DCFunction, cfg: RetractionConfig) -> None:
        trace = retract(square, [3.0, 0.5], cfg)
        path = write_trace_csv(trace, tmp_path / "trace.csv")
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "x0", "x1", "f"]
        assert len(rows) == len(trace.samples) + 1
        assert float(rows[-1][1]) == trace.endpoint[0]

    def test_traces(self, tmp_path: Path, square: DCFunction, cfg: RetractionConfig) -> None:
        traces = retract_many(square, [[3.0, 0.5], [-2.0, 2.0]], cfg)
        path = write_traces_csv(traces, tmp_path / "traces.csv")
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "trace"
        assert {r[0] for r in rows[1:]} == {"0", "1"}

    def test_loops(self, tmp_path: Path, annulus: DCFunction) -> None:
        loops = level_loops_2d(annulus, 0.25, 0.05)
        path = write_loops_csv(loops, tmp_path / "loops.csv")
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["loop", "x", "y"]
        assert len(rows) == 1 + sum(len(lp) for lp in loops.loops)


class TestSvg:
    def test_renders_are_deterministic(
        self,
        tmp_path: Path,
        square: DCFunction,
        two_quadrants: PlanarLocalModel,
        cfg: RetractionConfig,
    ) -> None:
        loops = level_loops_2d(square, 0.5, 0.1)
        traces = retract_many(square, [[3.0, 0.5], [0.0, -2.5]], cfg)
        cover = singular_set_pwa_2d(sup_norm().g, 1.0, ((-2.0, -2.0), (2.0, 2.0)))
        spec = IFSSpec.from_degrees(18.0)
        for run in ("a", "b"):
            d = tmp_path / run
            render_loops(loops, d / "loops.svg")
            render_traces(traces, d / "traces.svg", loops)
            render_sectors(two_quadrants, d / "sectors.svg")
            render_cover(cover, d / "cover.svg", ((-2.0, -2.0), (2.0, 2.0)))
            render_fractal(ifs_generate(spec, 5), d / "fractal.svg", spec.triangle())
        for name in ("loops", "traces", "sectors", "cover", "fractal"):
            first = (tmp_path / "a" / f"{name}.svg").read_bytes()
            assert first.startswith(b"<?xml")
            assert first == (tmp_path / "b" / f"{name}.svg").read_bytes(), name
