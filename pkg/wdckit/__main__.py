"""CLI entry point for wdckit."""

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import Config, default_config_path, get_default_config_toml, load_config
from .core.dc import DCFunction, combine
from .core.sampling import SamplingPlan
from .core.subdiff import subdiff
from .exceptions import ValidationError, WdcError
from .utils.logging import setup_logging

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace, Config], Tuple[int, Optional[Dict[str, Any]]]]


def _fn(args: argparse.Namespace) -> DCFunction:
    from .io.schema import read_document

    return read_document(args.fn, expect=("dc",))  # type: ignore[no-any-return]


def _points(raw: Optional[List[List[float]]], dim: int) -> np.ndarray:
    if not raw:
        raise ValidationError("at least one --point is required")
    pts = np.array(raw, dtype=float)
    if pts.shape[1] != dim:
        raise ValidationError(f"points must have {dim} coordinates, got {pts.shape[1]}")
    return pts


def _box(raw: Optional[List[float]], dim: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """--box lo_0 .. lo_{d-1} hi_0 .. hi_{d-1}."""
    if raw is None:
        return None
    if len(raw) != 2 * dim:
        raise ValidationError(f"--box needs {2 * dim} numbers for a {dim}-d function")
    lo, hi = np.array(raw[:dim]), np.array(raw[dim:])
    if np.any(hi <= lo):
        raise ValidationError("--box needs lo < hi componentwise")
    return lo, hi


def _probe_plan(f: DCFunction, cfg: Config, seed: int) -> Optional[SamplingPlan]:
    """Seeded plan over the probe box; None keeps the default zoomed plan (seed 0)."""
    if f.dim == 2 or seed == 0:
        return None
    R = cfg.aura.probe_radius
    return SamplingPlan(np.full(f.dim, -R), np.full(f.dim, R), cfg.aura.samples, seed)


def cmd_eval(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import document

    f = _fn(args)
    pts = _points(args.point, f.dim)
    vals = np.asarray(f(pts), dtype=float)
    for p, v in zip(pts, vals):
        print(f"f({', '.join(repr(float(c)) for c in p)}) = {float(v)!r}")
    return 0, document("value", {"points": pts, "values": vals})


def cmd_subdiff(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import document

    f = _fn(args)
    out = []
    for p in _points(args.point, f.dim):
        res = subdiff(f, p, args.mode, cfg.tolerances.activity)
        V = res.hull.vertices
        print(
            f"x = {p.tolist()}: {len(V)} vertices ({res.exactness}), "
            f"min-norm {res.hull.min_norm():.12g}"
        )
        for v in V:
            print(f"  {v.tolist()}")
        out.append({"point": p, "vertices": V, "exactness": res.exactness})
    return 0, document("subdiff", {"mode": args.mode, "results": out})


def cmd_check_aura(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .aura.regularity import check_weak_regularity
    from .io.schema import to_document

    f = _fn(args)
    shell = cfg.aura.shell if args.eps is None else args.eps
    report = check_weak_regularity(
        f,
        args.level,
        shell,
        plan=_probe_plan(f, cfg, args.seed),
        probe_radius=cfg.aura.probe_radius,
        threshold=cfg.aura.violation_threshold,
        tol=cfg.tolerances.activity,
        threads=args.threads,
    )
    print(f"mode: {report.mode}")
    print(f"margin: {report.margin!r}")
    print(f"samples: {report.samples}")
    if report.witness is not None:
        print(f"witness: {list(report.witness)}")
    print("regular" if report.regular else f"NOT regular ({len(report.violations)} violations)")
    return (0 if report.regular else 3), to_document(report, "aura-report")


def cmd_sum_aura(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .aura.touch import weak_touch
    from .io.schema import read_document, to_document, write_document

    if len(args.fn) != 2:
        raise ValidationError("sum-aura needs exactly two --fn inputs")
    f, g = (read_document(p, expect=("dc",)) for p in args.fn)
    report = weak_touch(f, g, _probe_plan(f, cfg, args.seed), cfg.tolerances.touch_angle)
    doc = to_document(report, "touch-report")
    if report.touched:
        at, normal = list(report.witness_point or ()), list(report.witness_normal or ())
        print(f"weak touch at {at}, normal {normal}")
        return 3, doc
    total = combine("add", f, g)
    print(f"sum accepted ({report.probes} common-zero probes, exact={report.exact})")
    if args.sum_out is not None:
        write_document(args.sum_out, to_document(total))
        print(f"sum written to {args.sum_out}")
    return 0, doc


def _retraction_config(f: DCFunction, cfg: Config, args: argparse.Namespace) -> Any:
    from .aura.regularity import check_weak_regularity
    from .retraction.flow import RetractionConfig

    report = check_weak_regularity(
        f,
        0.0,
        cfg.aura.shell if args.eps is None else args.eps,
        plan=_probe_plan(f, cfg, args.seed),
        probe_radius=cfg.aura.probe_radius,
        threads=args.threads,
    )
    return RetractionConfig.from_report(
        report,
        step=cfg.retraction.step,
        max_iter=cfg.retraction.max_iter,
        sufficient_decrease=cfg.retraction.sufficient_decrease,
        bisect_tol=cfg.retraction.bisect_tol,
    )


def cmd_retract(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.csvio import write_trace_csv, write_traces_csv
    from .io.schema import document, trace_payload
    from .retraction.flow import retract_many
    from .retraction.verify import verify_trace

    f = _fn(args)
    starts = _points(args.point, f.dim)
    rcfg = _retraction_config(f, cfg, args)
    traces = retract_many(f, list(starts), rcfg, args.threads)
    checks = [verify_trace(t, rcfg, f, seed=args.seed) for t in traces]
    for t, c in zip(traces, checks):
        print(
            f"{t.start.tolist()} -> {t.endpoint.tolist()}  time {t.total_time:.6g}  "
            f"{'ok' if c.passed else 'FAILED: ' + '; '.join(c.failures)}"
        )
    if args.csv is not None:
        if len(traces) == 1:
            write_trace_csv(traces[0], args.csv)
        else:
            write_traces_csv(traces, args.csv)
    if args.svg is not None and f.dim == 2:
        from .io.svg import render_traces

        render_traces(traces, args.svg)
    doc = document(
        "trace",
        {
            "eps_reg": rcfg.eps_reg,
            "traces": [trace_payload(t) for t in traces],
            "checks": [dataclasses.asdict(c) for c in checks],
        },
    )
    return (0 if all(c.passed for c in checks) else 3), doc


def cmd_boundary_path(
    args: argparse.Namespace, cfg: Config
) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import read_document, to_document
    from .retraction.verify import boundary_path

    f = _fn(args)
    curve = read_document(args.curve, expect=("curve",))
    rcfg = _retraction_config(f, cfg, args)
    path = boundary_path(f, list(curve), rcfg, args.threads)
    print(f"input diameter:  {path.input_diameter:.12g}")
    print(f"output diameter: {path.output_diameter:.12g} (bound {path.bound:.12g})")
    print("ok" if path.passed else "FAILED")
    return (0 if path.passed else 3), to_document(path, "path")


def cmd_euler(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import to_document
    from .topology.euler import euler_cubical, euler_degree_2d

    f = _fn(args)
    grid = cfg.topology.grid if args.grid is None else args.grid
    if args.method == "degree":
        res = euler_degree_2d(
            f, args.level, grid, cfg.topology.refine, cfg.topology.residual, args.threads
        )
    else:
        res = euler_cubical(f, args.level, grid, _box(args.box, f.dim), args.threads)
    print(f"chi={res.chi}")
    print(f"method: {res.method}, evidence {res.per_loop}")
    return 0, to_document(res)


def cmd_level(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import to_document
    from .topology.level import level_loops_2d

    f = _fn(args)
    grid = cfg.topology.grid if args.grid is None else args.grid
    loops = level_loops_2d(f, args.level, grid, cfg.aura.probe_radius)
    print(f"{len(loops)} loop(s) at level {args.level!r}")
    for k, loop in enumerate(loops.loops):
        print(f"  loop {k}: {len(loop)} points")
    if args.csv is not None:
        from .io.csvio import write_loops_csv

        write_loops_csv(loops, args.csv)
    if args.svg is not None:
        from .io.svg import render_loops

        render_loops(loops, args.svg)
    return 0, to_document(loops)


def cmd_classify(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import document, read_document, tag_payload, to_document
    from .planar.classify import classify_direction, sweep_directions

    M = read_document(args.model, expect=("model",))
    if args.direction is not None:
        theta = math.radians(args.direction)
        tag = classify_direction(M, (math.cos(theta), math.sin(theta)), cfg.planar.max_halvings)
        print(f"{args.direction:g} deg: {tag.value} (r={tag.r:.6g}, u={tag.u:.6g})")
        return 0, to_document(tag)
    sweep = sweep_directions(M, args.count, args.threads, cfg.planar.max_halvings)
    for angle, tag in sweep:
        print(f"{math.degrees(angle):10.4f} deg: {tag.value}")
    return 0, document(
        "sweep", {"directions": [{"angle": a, "tag": tag_payload(t)} for a, t in sweep]}
    )


def cmd_characterize(
    args: argparse.Namespace, cfg: Config
) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import read_document, to_document
    from .planar.classify import characterize_local

    germ = read_document(args.germ, expect=("germ",))
    M = characterize_local(germ)
    condition = {"isolated-point": "(i)", "degenerate": "(ii)", "complement": "(iii)"}[M.kind]
    print(
        f"condition {condition}: {M.kind}, radius {M.radius:.6g}, "
        f"{len(M.sectors)} open sector(s)"
    )
    if args.svg is not None:
        from .io.svg import render_sectors

        render_sectors(M, args.svg)
    return 0, to_document(M)


def cmd_sector_aura(
    args: argparse.Namespace, cfg: Config
) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import dc_payload, document, read_document
    from .planar.synthesis import build_planar_aura

    M = read_document(args.model, expect=("model",))
    F, report = build_planar_aura(M, cfg.planar.probes, args.seed, cfg.aura.shell, args.threads)
    print(f"{M.kind} model: margin {report.margin!r} over {report.samples} strata")
    if args.svg is not None:
        from .io.svg import render_sectors

        render_sectors(M, args.svg)
    return 0, document("sector-aura", {"aura": dc_payload(F), "margin": report.margin})


def _report_cover(cover: Any, args: argparse.Namespace) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .io.schema import to_document

    print(f"{len(cover)} segment(s){' (clipped to the box)' if cover.clipped else ''}")
    for (p, q), prov in zip(cover.segments, cover.provenance):
        print(f"  {p.tolist()} -> {q.tolist()}  pieces {[list(pair) for pair in prov]}")
    return 0, to_document(cover)


def cmd_singular(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .singular.cover import singular_set_pwa_2d

    f = _fn(args)
    if f.h.A.shape[0] != 1 or np.any(f.h.A != 0):
        raise ValidationError("singular expects a convex max-affine function (constant h)")
    box = _box(args.box, f.dim)
    if box is None:
        raise ValidationError("singular needs --box")
    cover = singular_set_pwa_2d(f.g, args.eps, box, args.threads)
    return _with_cover_svg(cover, args, box)


def cmd_zero_cover(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .singular.cover import zero_set_large_subdiff_2d

    f = _fn(args)
    box = _box(args.box, f.dim)
    if box is None:
        raise ValidationError("zero-cover needs --box")
    return _with_cover_svg(zero_set_large_subdiff_2d(f, args.eps, box), args, box)


def cmd_boundary_cover(
    args: argparse.Namespace, cfg: Config
) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .singular.cover import boundary_cover_2d

    f = _fn(args)
    box = _box(args.box, f.dim)
    grid = cfg.topology.grid if args.grid is None else args.grid
    return _with_cover_svg(boundary_cover_2d(f, box, grid, args.threads), args, box)


def _with_cover_svg(
    cover: Any, args: argparse.Namespace, box: Optional[Tuple[np.ndarray, np.ndarray]]
) -> Tuple[int, Optional[Dict[str, Any]]]:
    if args.svg is not None:
        from .io.svg import render_cover

        render_cover(cover, args.svg, box)
    return _report_cover(cover, args)


def _spec(args: argparse.Namespace, cfg: Config) -> Any:
    from .fractal.ifs import IFSSpec

    return IFSSpec.from_degrees(cfg.fractal.alpha_deg if args.alpha_deg is None else args.alpha_deg)


def cmd_fractal_gen(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .fractal.ifs import ifs_generate
    from .io.schema import to_document

    spec = _spec(args, cfg)
    depth = cfg.fractal.depth if args.depth is None else args.depth
    approx = ifs_generate(spec, depth)
    print(f"depth {depth}: {len(approx)} segments, Hausdorff bound {approx.hausdorff_bound:.6g}")
    if args.svg is not None:
        from .io.svg import render_fractal

        render_fractal(approx, args.svg, spec.triangle())
    return 0, to_document(approx)


def cmd_fractal_check(
    args: argparse.Namespace, cfg: Config
) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .fractal.regularity import fractal_regularity_check
    from .io.schema import to_document

    spec = _spec(args, cfg)
    depth = cfg.fractal.depth if args.depth is None else args.depth
    grid = cfg.fractal.grid if args.grid is None else args.grid
    shell = cfg.fractal.shell if args.shell is None else tuple(args.shell)
    report = fractal_regularity_check(
        spec, depth, grid, shell, threads=args.threads, tolerance=cfg.fractal.tolerance
    )
    print(f"min-norm: {report.min_norm!r}")
    print(f"bound: {report.bound!r} - slack {report.slack!r}")
    print(f"probes: {report.probes}")
    print(f"certified: {report.certified}")
    print("passed" if report.passed else "FAILED")
    return (0 if report.passed else 3), to_document(report, "fractal-report")


def cmd_fractal_dim(args: argparse.Namespace, cfg: Config) -> Tuple[int, Optional[Dict[str, Any]]]:
    from .fractal.ifs import hausdorff_dim
    from .io.schema import document

    spec = _spec(args, cfg)
    dim = hausdorff_dim(spec)
    print(f"dim={dim!r}")
    return 0, document("fractal-dim", {"alpha": spec.alpha, "ratio": spec.ratio, "dim": dim})


HANDLERS: Dict[str, Handler] = {
    "eval": cmd_eval,
    "subdiff": cmd_subdiff,
    "check-aura": cmd_check_aura,
    "sum-aura": cmd_sum_aura,
    "retract": cmd_retract,
    "boundary-path": cmd_boundary_path,
    "euler": cmd_euler,
    "level": cmd_level,
    "classify": cmd_classify,
    "characterize": cmd_characterize,
    "sector-aura": cmd_sector_aura,
    "singular": cmd_singular,
    "zero-cover": cmd_zero_cover,
    "boundary-cover": cmd_boundary_cover,
    "fractal-gen": cmd_fractal_gen,
    "fractal-check": cmd_fractal_check,
    "fractal-dim": cmd_fractal_dim,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wdckit",
        description="Polyhedral DC auras, retractions and planar WDC sets",
    )
    parser.add_argument(
        "--config", "-c", type=Path, default=None, help="Path to configuration file"
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    parser.add_argument(
        "--show-config", action="store_true", help="Show default configuration and exit"
    )

    # shared flags, accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    for target, default in ((parser, None), (common, argparse.SUPPRESS)):
        target.add_argument("--threads", type=int, default=default, help="Worker cap")
        target.add_argument(
            "--seed", type=int, default=default, help="Halton fast-forward for sampled probes"
        )
        target.add_argument(
            "--out", type=Path, default=default, help="Machine-readable report file"
        )

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    def fn(p: argparse.ArgumentParser, required: bool = True) -> None:
        p.add_argument("--fn", type=Path, required=required, help="DC function document")

    def point(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--point", type=float, nargs="+", action="append", help="Point coordinates (repeatable)"
        )

    def exports(p: argparse.ArgumentParser, csv: bool = False) -> None:
        p.add_argument("--svg", type=Path, default=None, help="SVG plot path")
        if csv:
            p.add_argument("--csv", type=Path, default=None, help="CSV table path")

    p = add("eval", "Evaluate f at points")
    fn(p)
    point(p)

    p = add("subdiff", "Subdifferential hull of f at points")
    fn(p)
    point(p)
    p.add_argument("--mode", choices=("clarke", "outer", "convex-part"), default="clarke")

    p = add("check-aura", "Weak-regularity margin at a level")
    fn(p)
    p.add_argument("--level", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=None, help="Shell width")

    p = add("sum-aura", "Sum of two auras, refused when they touch weakly")
    p.add_argument("--fn", type=Path, action="append", required=True, help="Aura document (twice)")
    p.add_argument("--sum-out", type=Path, default=None, help="Where to write the sum")

    p = add("retract", "Retract points onto the zero set")
    fn(p)
    point(p)
    p.add_argument("--eps", type=float, default=None, help="Shell width for the margin")
    exports(p, csv=True)

    p = add("boundary-path", "Retract a curve and check the diameter bound")
    fn(p)
    p.add_argument("--curve", type=Path, required=True, help="Curve document")
    p.add_argument("--eps", type=float, default=None, help="Shell width for the margin")

    p = add("euler", "Euler characteristic of a sublevel set")
    fn(p)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--method", choices=("degree", "cubical"), default="degree")
    p.add_argument("--grid", type=float, default=None)
    p.add_argument("--box", type=float, nargs="+", default=None, help="lo... hi... (cubical)")

    p = add("level", "Trace the level loops of f")
    fn(p)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--grid", type=float, default=None)
    exports(p, csv=True)

    p = add("classify", "Cone type of a planar model in a direction")
    p.add_argument("--model", type=Path, required=True, help="Planar model document")
    p.add_argument("--direction", type=float, default=None, help="Direction angle in degrees")
    p.add_argument("--count", type=int, default=64, help="Directions swept without --direction")

    p = add("characterize", "Local model of a germ")
    p.add_argument("--germ", type=Path, required=True, help="Germ document")
    exports(p)

    p = add("sector-aura", "DC aura of a planar model")
    p.add_argument("--model", type=Path, required=True, help="Planar model document")
    exports(p)

    for name, text in (
        ("singular", "Seams where the gradient hull has diameter > eps"),
        ("zero-cover", "Zero set points with a subgradient of norm > eps"),
    ):
        p = add(name, text)
        fn(p)
        p.add_argument("--eps", type=float, required=True)
        p.add_argument("--box", type=float, nargs=4, required=True, help="x0 y0 x1 y1")
        exports(p)

    p = add("boundary-cover", "Segment cover of an aura's boundary")
    fn(p)
    p.add_argument("--box", type=float, nargs=4, default=None, help="x0 y0 x1 y1")
    p.add_argument("--grid", type=float, default=None, help="Level-probe grid")
    exports(p)

    for name, text in (
        ("fractal-gen", "Polyline approximation of the self-similar curve"),
        ("fractal-check", "Numerical subgradient bound for the distance to the curve"),
        ("fractal-dim", "Hausdorff dimension of the self-similar curve"),
    ):
        p = add(name, text)
        p.add_argument("--alpha-deg", type=float, default=None)
        if name != "fractal-dim":
            p.add_argument("--depth", type=int, default=None)
        if name == "fractal-check":
            p.add_argument("--grid", type=float, default=None)
            p.add_argument("--shell", type=float, nargs=2, default=None)
        if name == "fractal-gen":
            exports(p)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.show_config:
        print(get_default_config_toml())
        return 0
    if args.command is None:
        parser.print_help()
        return 2

    try:
        cfg = load_config(args.config if args.config is not None else default_config_path())
        setup_logging(verbose=args.verbose, log_file=cfg.log_file)
        if args.threads is None:
            args.threads = cfg.threads
        if args.seed is None:
            args.seed = cfg.aura.seed
        code, doc = HANDLERS[args.command](args, cfg)
        if doc is not None and args.out is not None:
            from .io.schema import write_document

            write_document(args.out, doc)
        return code
    except WdcError as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


def main() -> int:
    """Main entry point."""
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
