from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .cones import c_prime_cone, cone_of_curves, nef_cone, nefe_prime
from .config import BASE_RANKS, GRID_MAX_DEPTH, check_depths, desk_grid, reduced_grid
from .coxeter import chamber_reduce, sigma_membership, simple_roots
from .exceptions import FamilySuiteError, LcyConesError, MaxIterExceeded, ModelNotFromFamily, RankLimitExceeded
from .formulas import compare_dual_basis
from .harness import SuitePlan, mds_certificate, run_family_suite, run_grid
from .lattice import ClassVector
from .models import CheckStatus, SurfaceModel
from .polyhedral import RationalCone, contains
from .settings import ENV_VAR_MAPPING, EngineSettings, config_path, load_settings, settings_source
from .storage import (
    certificate_to_dict,
    cone_to_dict,
    domain_result_to_dict,
    dual_rows_to_dict,
    dumps,
    encode_vector,
    mds_to_dict,
    model_to_dict,
    parse_model,
    read_generators,
    read_model,
    suite_to_dict,
    trace_to_dict,
)
from .surfaces import build_family

logger = logging.getLogger(__name__)

console = Console(highlight=False)
err_console = Console(stderr=True, highlight=False)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class UsageError(Exception):
    """Bad command-line input that argparse cannot detect on its own."""


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def _emit_json(data: Any) -> None:
    # console.out skips markup and wrapping, so JSON stays byte-stable
    console.out(dumps(data))


def _guard_rank(rank: int, settings: EngineSettings) -> None:
    if rank > settings.max_rank:
        raise RankLimitExceeded(rank, settings.max_rank)


def _family(n: int, p: Sequence[int], settings: EngineSettings) -> SurfaceModel:
    depths = check_depths(n, p)
    _guard_rank(BASE_RANKS[n] + sum(depths), settings)
    return build_family(n, depths)


def _load_model(args: argparse.Namespace) -> SurfaceModel:
    """Resolve --n/--p, --model or --stdin to a model."""
    settings: EngineSettings = args.settings
    if getattr(args, "stdin", False):
        model = parse_model(sys.stdin.read())
    elif getattr(args, "model", None):
        model = read_model(Path(args.model))
    elif getattr(args, "n", None) is not None:
        if not args.p:
            raise UsageError("--n needs --p with one depth per boundary component")
        return _family(args.n, args.p, settings)
    else:
        raise UsageError("choose a model with --n N --p P.., --model FILE or --stdin")
    _guard_rank(model.rank, settings)
    return model


def _parse_coords(values: Sequence[str], what: str) -> list[int]:
    try:
        return [int(v) for v in values]
    except ValueError:
        raise UsageError(f"{what} must be integers, got {' '.join(values)}")


def _vector_text(v) -> str:
    return "(" + ", ".join(str(c) for c in v) + ")"


def _print_cone(cone: RationalCone, title: str) -> None:
    table = Table(title=title)
    table.add_column("#", justify="right")
    table.add_column("label")
    table.add_column("ray")
    for idx, ray in enumerate(cone.rays):
        table.add_row(str(idx), cone.label_of(idx), _vector_text(ray))
    console.print(table)


def _emit_cone(args: argparse.Namespace, cone: RationalCone, title: str) -> int:
    if args.format == "json":
        _emit_json(cone_to_dict(cone, include_halfspaces=getattr(args, "halfspaces", False)))
    else:
        _print_cone(cone, title)
    return EXIT_OK


def cmd_family(args: argparse.Namespace) -> int:
    model = _family(args.family_n, args.family_p, args.settings)
    if args.format == "json":
        _emit_json(model_to_dict(model))
        return EXIT_OK
    table = Table(title=f"{model.model_id}, rank {model.rank}")
    table.add_column("label")
    table.add_column("kind")
    table.add_column("class")
    for record in model.inventory:
        table.add_row(record.label, record.kind.value, _vector_text(record.cls))
    console.print(table)
    console.print(f"basis: {', '.join(model.form.basis_labels)}")
    return EXIT_OK


def cmd_curves(args: argparse.Namespace) -> int:
    model = _load_model(args)
    return _emit_cone(args, cone_of_curves(model), f"Curv {model.model_id}")


def cmd_nef(args: argparse.Namespace) -> int:
    model = _load_model(args)
    return _emit_cone(args, nef_cone(model), f"Nef {model.model_id}")


def cmd_nefe_prime(args: argparse.Namespace) -> int:
    model = _load_model(args)
    return _emit_cone(args, nefe_prime(model), f"Nef face orthogonal to D, {model.model_id}")


def cmd_c_prime(args: argparse.Namespace) -> int:
    model = _load_model(args)
    return _emit_cone(args, c_prime_cone(model, args.labels), f"C' for {', '.join(args.labels)}")


def cmd_dual_basis(args: argparse.Namespace) -> int:
    model = _load_model(args)
    rows = compare_dual_basis(model)
    failed = any(r.status == CheckStatus.FAIL for r in rows)
    if args.format == "json":
        _emit_json(dual_rows_to_dict(rows))
    else:
        table = Table(title=f"Dual basis {model.model_id}")
        for column in ("element", "variant", "printed", "computed", "status"):
            table.add_column(column)
        for r in rows:
            table.add_row(escape(r.element), escape(r.variant), _vector_text(r.printed), str(r.computed), r.status.value)
        console.print(table)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    model = _load_model(args)
    x = ClassVector(tuple(_parse_coords(args.x, "x")))
    max_iter = args.max_iter if args.max_iter is not None else args.settings.default_max_iter
    rs = simple_roots(model)
    status = EXIT_OK
    try:
        trace = chamber_reduce(rs, x, max_iter)
    except MaxIterExceeded as e:
        trace = e.trace
        status = EXIT_FAILED
    if args.format == "json":
        data = trace_to_dict(trace, rs.labels)
        data["complete"] = status == EXIT_OK
        _emit_json(data)
    else:
        word = " ".join(trace.word_labels(rs)) or "(empty)"
        console.print(f"word: {word}")
        console.print(f"output: {_vector_text(trace.output)}")
        if status != EXIT_OK:
            console.print(f"[yellow]stopped after {trace.iterations} reflections[/]")
    return status


def cmd_sigma(args: argparse.Namespace) -> int:
    model = _load_model(args)
    coords = _parse_coords(args.coords, "coordinates")
    rank = model.rank
    if len(coords) == rank:
        y, x = None, ClassVector(tuple(coords))
    elif len(coords) == 2 * rank:
        y, x = ClassVector(tuple(coords[:rank])), ClassVector(tuple(coords[rank:]))
    else:
        raise UsageError(f"expected {rank} coordinates (x) or {2 * rank} (y then x), got {len(coords)}")
    radius = args.radius if args.radius is not None else args.settings.default_radius
    if radius < 0:
        raise UsageError("--radius must be nonnegative")
    generators = read_generators(Path(args.generators), model) if args.generators else []
    result = sigma_membership(model, y, x, radius, generators)
    if args.format == "json":
        _emit_json(domain_result_to_dict(result))
    else:
        console.print(f"{result.status.value} (radius {result.radius}, {result.images_checked} images)")
        if result.witness:
            console.print(f"witness: {' '.join(result.witness)}")
    return EXIT_OK if result.verified else EXIT_FAILED


def cmd_member(args: argparse.Namespace) -> int:
    model = _load_model(args)
    x = ClassVector(tuple(_parse_coords(args.x, "x")))
    cone = cone_of_curves(model) if args.cone == "curves" else nef_cone(model)
    cert = contains(model.form, cone, x)
    if args.format == "json":
        data = {"cone": args.cone, "x": encode_vector(x), **certificate_to_dict(cert)}
        if cone.labels is not None:
            data["labels"] = list(cone.labels)
        _emit_json(data)
    elif cert.member:
        table = Table(title=f"{_vector_text(x)} in {args.cone}, {model.model_id}")
        table.add_column("generator")
        table.add_column("coefficient", justify="right")
        for idx, c in enumerate(cert.coefficients or ()):
            if c:
                table.add_row(escape(cone.label_of(idx)), str(c))
        console.print(table)
    else:
        console.print(f"{_vector_text(x)} is outside {args.cone}")
        console.print(f"separating functional: {_vector_text(cert.separating_functional)}")
    return EXIT_OK if cert.member else EXIT_FAILED


def _print_suite(report) -> None:
    table = Table(title=f"{report.model_id} ({report.elapsed:.2f}s)")
    table.add_column("check")
    table.add_column("status")
    table.add_column("detail")
    colours = {CheckStatus.PASS: "green", CheckStatus.FAIL: "red", CheckStatus.FLAGGED: "yellow"}
    for c in report.checks:
        table.add_row(escape(c.name), f"[{colours[c.status]}]{c.status.value}[/]", escape(c.detail))
    console.print(table)


def cmd_verify(args: argparse.Namespace) -> int:
    settings: EngineSettings = args.settings
    plan = SuitePlan.from_settings(settings)
    if args.stdin:
        model = parse_model(sys.stdin.read())
        if not model.is_family():
            raise ModelNotFromFamily(model.origin.value)
        _guard_rank(model.rank, settings)
        reports = [run_family_suite(model.n, model.p, model, plan)]
    elif args.all or args.grid is not None:
        if args.grid is not None and not 1 <= args.grid <= GRID_MAX_DEPTH:
            raise UsageError(f"--grid must be between 1 and {GRID_MAX_DEPTH}")
        grid = desk_grid(settings) if args.all else reduced_grid(args.grid)
        for n, p in grid:
            _guard_rank(BASE_RANKS[n] + sum(p), settings)
        reports = run_grid(grid, args.workers or settings.workers, plan)
    elif args.n is not None:
        if not args.p:
            raise UsageError("--n needs --p with one depth per boundary component")
        depths = check_depths(args.n, args.p)
        _guard_rank(BASE_RANKS[args.n] + sum(depths), settings)
        reports = [run_family_suite(args.n, depths, plan=plan)]
    else:
        raise UsageError("choose --all, --grid MAX_DEPTH, --n N --p P.. or --stdin")

    if args.format == "json":
        data = [suite_to_dict(r) for r in reports]
        _emit_json(data[0] if len(data) == 1 else data)
    else:
        for report in reports:
            _print_suite(report)
        failed = sum(1 for r in reports if r.failed)
        console.print(f"{len(reports)} models, {failed} with failures")
    return EXIT_FAILED if any(r.failed for r in reports) else EXIT_OK


def cmd_mds(args: argparse.Namespace) -> int:
    depths = check_depths(args.family_n, args.family_p)
    _guard_rank(BASE_RANKS[args.family_n] + sum(depths), args.settings)
    cert = mds_certificate(args.family_n, depths)
    if args.format == "json":
        _emit_json(mds_to_dict(cert))
    else:
        console.print(f"[bold]{cert.model_id}[/] rank {cert.rank} (base {cert.base_rank})")
        console.print(f"Picard lattice unimodular: {cert.unimodular}")
        console.print(f"curve cone: {len(cert.curve_rays)} generators")
        console.print(f"nef cone: {len(cert.nef_rays)} rays, all effective: {cert.nef_item_holds}")
        console.print(f"semiample: {cert.semiample}")
    holds = cert.picard_item_holds and cert.nef_item_holds
    return EXIT_OK if holds else EXIT_FAILED


def cmd_settings(args: argparse.Namespace) -> int:
    s: EngineSettings = args.settings
    values = dict(vars(s))
    if args.format == "json":
        _emit_json({"path": str(config_path()), "settings": values})
        return EXIT_OK
    table = Table(title=f"Settings ({config_path()})")
    table.add_column("name")
    table.add_column("value")
    table.add_column("source")
    table.add_column("env var")
    for name, value in values.items():
        table.add_row(name, str(value), settings_source(name), ENV_VAR_MAPPING.get(name, ""))
    console.print(table)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    url = f"http://127.0.0.1:{args.port}"
    console.print(f"[bold green]Starting LCY Cones service at {url}[/]")
    console.print("[dim]Press Ctrl+C to stop[/]")
    uvicorn.run("lcy_cones.webapp:app", host="127.0.0.1", port=args.port, log_level="info")
    return EXIT_OK


def _add_model_args(sp: argparse.ArgumentParser) -> None:
    group = sp.add_argument_group("model selection")
    group.add_argument("--n", type=int, help="Family (boundary length 1..6)")
    group.add_argument("--p", type=int, nargs="+", help="Blowup depths, one per boundary component")
    group.add_argument("--model", help="Model JSON file")
    group.add_argument("--stdin", action="store_true", help="Read model JSON from standard input")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lcy-cones",
        description="Exact cones, dual bases and Weyl group checks for log Calabi-Yau surface families",
    )
    p.add_argument("--format", choices=["json", "text"], default=None, help="Output format (default from settings)")
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO logs, -vv for DEBUG")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("family", help="Build a family model and print it")
    sp.add_argument("family_n", type=int, metavar="n")
    sp.add_argument("family_p", type=int, nargs="+", metavar="p")
    sp.set_defaults(func=cmd_family)

    sp = sub.add_parser("curves", help="Cone of curves generators")
    _add_model_args(sp)
    sp.add_argument("--halfspaces", action="store_true", help="Also print the halfspace description")
    sp.set_defaults(func=cmd_curves)

    sp = sub.add_parser("nef", help="Rays of the nef cone")
    _add_model_args(sp)
    sp.add_argument("--halfspaces", action="store_true", help="Also print the halfspace description")
    sp.set_defaults(func=cmd_nef)

    sp = sub.add_parser("nefe-prime", help="Face of the nef cone orthogonal to every boundary component")
    _add_model_args(sp)
    sp.set_defaults(func=cmd_nefe_prime)

    sp = sub.add_parser("dual-basis", help="Printed dual-basis formulas against the Gram inverse")
    _add_model_args(sp)
    sp.set_defaults(func=cmd_dual_basis)

    sp = sub.add_parser("c-prime", help="C' cone for disjoint interior (-1)-curves")
    _add_model_args(sp)
    sp.add_argument("labels", nargs="+", help="Labels of interior (-1)-curves")
    sp.set_defaults(func=cmd_c_prime)

    sp = sub.add_parser("reduce", help="Reflect a class into the fundamental chamber")
    _add_model_args(sp)
    sp.add_argument("x", nargs="+", help="Class coordinates in the ambient basis")
    sp.add_argument("--max-iter", type=int, default=None)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("sigma", help="Check x against the sigma(y) inequalities up to a word radius")
    _add_model_args(sp)
    sp.add_argument("coords", nargs="+", help="x, or y followed by x, in ambient coordinates")
    sp.add_argument("--radius", type=int, default=None)
    sp.add_argument("--generators", metavar="FILE", help="JSON list of extra isometries {label, matrix}")
    sp.set_defaults(func=cmd_sigma)

    sp = sub.add_parser("member", help="Membership certificate for a class in the curve or nef cone")
    _add_model_args(sp)
    sp.add_argument("x", nargs="+", help="Class coordinates in the ambient basis")
    sp.add_argument("--cone", choices=["curves", "nef"], default="curves")
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("verify", help="Run verification suites")
    sp.add_argument("--all", action="store_true", help="Every model of the configured desk grid")
    sp.add_argument("--grid", type=int, metavar="MAX_DEPTH", help="Reduced grid with depths up to MAX_DEPTH")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int, nargs="+")
    sp.add_argument("--stdin", action="store_true", help="Verify the model JSON on standard input")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("mds", help="Mori dream space certificate for a family model")
    sp.add_argument("family_n", type=int, metavar="n")
    sp.add_argument("family_p", type=int, nargs="+", metavar="p")
    sp.set_defaults(func=cmd_mds)

    sp = sub.add_parser("settings", help="Show resolved settings")
    sp.set_defaults(func=cmd_settings)

    sp = sub.add_parser("serve", help="Launch the read-only HTTP service on localhost")
    sp.add_argument("--port", type=int, default=8001, help="Port to run the server on (default: 8001)")
    sp.set_defaults(func=cmd_serve)

    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    _configure_logging(args.verbose)
    try:
        settings = load_settings().validate()
    except LcyConesError as e:
        err_console.print(f"[red]Invalid settings:[/] {escape(e.user_message)}")
        return EXIT_USAGE
    args.settings = settings
    if args.format is None:
        args.format = settings.output_format

    handler: Callable[[argparse.Namespace], int] = args.func
    try:
        return handler(args)
    except UsageError as e:
        err_console.print(f"[red]Usage:[/] {escape(str(e))}")
        return EXIT_USAGE
    except FamilySuiteError as e:
        err_console.print(f"[red]{escape(e.user_message)}[/]: {escape(e.help_text or e.message)}")
        return EXIT_FAILED
    except LcyConesError as e:
        err_console.print(f"[red]Error:[/] {escape(e.user_message)}")
        if e.help_text:
            err_console.print(f"[dim]{escape(e.help_text)}[/]")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
