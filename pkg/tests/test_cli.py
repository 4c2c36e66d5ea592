"""Tests for the command-line surface and configuration loading."""

import json
from pathlib import Path
from typing import Callable

import pytest

from conftest import sup_norm
from wdckit.__main__ import dispatch
from wdckit.config import Config, get_default_config_toml, load_config
from wdckit.core.dc import DCFunction
from wdckit.io import read_document, to_document, write_document
from wdckit.planar import PlanarLocalModel
from wdckit.topology import annulus_aura, square_aura

Writer = Callable[[str, object], str]


@pytest.fixture(autouse=True)
def isolated_config(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("WDCKIT_CONFIG", str(tmp_path / "absent.toml"))
    monkeypatch.delenv("WDCKIT_THREADS", raising=False)


@pytest.fixture
def doc(tmp_path: Path) -> Writer:
    def write(name: str, obj: object) -> str:
        return str(write_document(tmp_path / name, to_document(obj)))

    return write


class TestConfig:
    def test_defaults_when_missing(self, tmp_path: Path) -> None:
        cfg = load_config(tmp_path / "nope.toml")
        assert cfg.topology.grid == 0.05
        assert cfg.fractal.shell == (0.02, 0.2)

    def test_default_toml_loads(self, tmp_path: Path) -> None:
        path = tmp_path / "config.toml"
        path.write_text(get_default_config_toml(), encoding="utf-8")
        assert load_config(path) == Config()

    def test_overrides(self, tmp_path: Path) -> None:
        path = tmp_path / "config.toml"
        path.write_text(
            'threads = 2\n[topology]\ngrid = 0.1\n[fractal]\nshell = [0.05, 0.3]\n',
            encoding="utf-8",
        )
        cfg = load_config(path)
        assert cfg.threads == 2
        assert cfg.topology.grid == 0.1
        assert cfg.fractal.shell == (0.05, 0.3)
        assert cfg.aura.shell == 0.1

    def test_env_threads(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("WDCKIT_THREADS", "3")
        assert load_config(tmp_path / "nope.toml").threads == 3


class TestDispatch:
    def test_show_config(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert dispatch(["--show-config"]) == 0
        assert "[tolerances]" in capsys.readouterr().out

    def test_usage_errors(self) -> None:
        assert dispatch([]) == 2
        assert dispatch(["no-such-command"]) == 2
        assert dispatch(["euler", "--fn", "f.json"]) == 2

    def test_missing_document(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        code = dispatch(["euler", "--fn", str(tmp_path / "missing.json"), "--level", "0"])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_eval(self, doc: Writer, capsys: pytest.CaptureFixture[str]) -> None:
        fn = doc("sq.json", square_aura())
        assert dispatch(["eval", "--fn", fn, "--point", "0", "0", "--point", "3", "0"]) == 0
        out = capsys.readouterr().out
        assert "f(0.0, 0.0) = " in out
        assert out.count("f(") == 2

    def test_eval_wrong_dimension(self, doc: Writer) -> None:
        fn = doc("sq.json", square_aura())
        assert dispatch(["eval", "--fn", fn, "--point", "1", "2", "3"]) == 2

    def test_subdiff(self, doc: Writer, capsys: pytest.CaptureFixture[str]) -> None:
        fn = doc("norm.json", sup_norm())
        assert dispatch(["subdiff", "--fn", fn, "--point", "0", "0"]) == 0
        assert "4 vertices (clarke-exact)" in capsys.readouterr().out

    def test_check_aura(
        self, doc: Writer, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        fn = doc("sq.json", square_aura())
        out_path = tmp_path / "report.json"
        assert dispatch(["check-aura", "--fn", fn, "--out", str(out_path)]) == 0
        assert capsys.readouterr().out.splitlines()[-1] == "regular"
        report = json.loads(out_path.read_text(encoding="utf-8"))
        assert report["schema"] == "wdckit/aura-report@1"

    def test_check_aura_rejects_a_half_plane(self, doc: Writer) -> None:
        fn = doc("half.json", DCFunction.affine([1.0, 0.0]))
        assert dispatch(["check-aura", "--fn", fn]) == 2

    def test_sum_aura_touching(self, doc: Writer, capsys: pytest.CaptureFixture[str]) -> None:
        a = doc("a.json", square_aura((0.0, 0.0)))
        b = doc("b.json", square_aura((2.0, 0.0)))
        assert dispatch(["sum-aura", "--fn", a, "--fn", b]) == 3
        assert "weak touch at" in capsys.readouterr().out

    def test_sum_aura_far_apart(self, doc: Writer, tmp_path: Path) -> None:
        a = doc("a.json", square_aura((-3.0, 0.0)))
        b = doc("b.json", square_aura((3.0, 0.0)))
        total = tmp_path / "sum.json"
        assert dispatch(["sum-aura", "--fn", a, "--fn", b, "--sum-out", str(total)]) == 0
        f = read_document(total, expect=["dc"])
        assert f([3.0, 0.5]) == pytest.approx(square_aura((-3.0, 0.0))([3.0, 0.5]))

    def test_sum_aura_needs_two(self, doc: Writer) -> None:
        assert dispatch(["sum-aura", "--fn", doc("a.json", square_aura())]) == 2

    def test_retract(
        self, doc: Writer, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        fn = doc("sq.json", square_aura())
        csv_path = tmp_path / "trace.csv"
        code = dispatch(
            ["retract", "--fn", fn, "--point", "3", "0.5", "--csv", str(csv_path)]
        )
        assert code == 0
        assert "ok" in capsys.readouterr().out
        assert csv_path.read_text(encoding="utf-8").startswith("t,x0,x1,f")

    def test_euler_methods(self, doc: Writer, capsys: pytest.CaptureFixture[str]) -> None:
        fn = doc("sq.json", square_aura())
        assert dispatch(["euler", "--fn", fn, "--level", "0.25"]) == 0
        assert dispatch(["euler", "--fn", fn, "--level", "0.25", "--method", "cubical"]) == 0
        out = capsys.readouterr().out
        assert out.count("chi=1") == 2

    def test_level_exports(self, doc: Writer, tmp_path: Path) -> None:
        fn = doc("sq.json", square_aura())
        svgs = [tmp_path / f"loops{k}.svg" for k in range(2)]
        for svg in svgs:
            assert dispatch(["level", "--fn", fn, "--level", "0.5", "--svg", str(svg)]) == 0
        assert svgs[0].read_bytes() == svgs[1].read_bytes()

    def test_out_is_reproducible(self, doc: Writer, tmp_path: Path) -> None:
        fn = doc("sq.json", square_aura())
        outs = [tmp_path / f"euler{k}.json" for k in range(2)]
        for out in outs:
            argv = ["--out", str(out), "euler", "--fn", fn, "--level", "0.25"]
            assert dispatch(argv) == 0
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_singular(self, doc: Writer, capsys: pytest.CaptureFixture[str]) -> None:
        fn = doc("norm.json", sup_norm())
        argv = ["singular", "--fn", fn, "--eps", "1", "--box", "-2", "-2", "2", "2"]
        assert dispatch(argv) == 0
        assert "3 segment(s) (clipped to the box)" in capsys.readouterr().out

    def test_singular_needs_a_convex_function(self, doc: Writer) -> None:
        fn = doc("annulus.json", annulus_aura())
        argv = ["singular", "--fn", fn, "--eps", "1", "--box", "-2", "-2", "2", "2"]
        assert dispatch(argv) == 2

    def test_classify_and_characterize(
        self,
        doc: Writer,
        two_quadrants: PlanarLocalModel,
        capsys: pytest.CaptureFixture[str],
    ) -> None:
        model = doc("model.json", two_quadrants)
        germ = doc("germ.json", two_quadrants.to_germ())
        assert dispatch(["classify", "--model", model, "--direction", "45"]) == 0
        assert dispatch(["characterize", "--germ", germ]) == 0
        out = capsys.readouterr().out
        assert "45 deg: T2" in out
        assert "condition (iii): complement" in out

    def test_fractal_dim(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert dispatch(["fractal-dim"]) == 0
        assert capsys.readouterr().out.startswith("dim=1.07")

    def test_fractal_depth_overflow(self) -> None:
        assert dispatch(["fractal-gen", "--depth", "25"]) == 2
