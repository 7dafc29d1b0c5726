"""Command-line gateway over the skein session."""

from __future__ import annotations

import argparse
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import orjson
from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from core import SkeinSession, load_settings
from core.config.models import Settings
from core.exceptions import SkeinForgeError
from core.surface.model import LIBRARY_SPECS

from .evaluator import evaluate_expression, value_json, value_kind
from .parser import load_definitions
from .schemas import (
    CacheStatsResponse,
    ComputeResponse,
    PolicyView,
    SurfacesResponse,
    SurfaceView,
    VerifyBatchResponse,
    VerifyResponse,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2

stdout = Console(highlight=False, soft_wrap=True)
stderr = Console(stderr=True, highlight=False)


class CommandParser(argparse.ArgumentParser):
    """Usage errors exit with the failure code, not argparse's 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = CommandParser(add_help=False)
    common.add_argument("--config", help="YAML settings file (default config/skein-forge.yaml)")
    common.add_argument("--surface", help="library surface (S11, S04, S12, S21, S31) or a definition file")
    common.add_argument("--h-order", type=int, dest="h_order", help="h-adic truncation order")
    common.add_argument("--filt-cap", type=int, dest="filt_cap", help="filtration cap, at least 3")
    common.add_argument("--depth", type=int, help="BCH and exponential depth")
    common.add_argument("--cache", help="product cache directory")
    common.add_argument("--no-cache", action="store_true", dest="no_cache", help="disable the product cache")
    common.add_argument("--json", action="store_true", help="emit canonical JSON")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = CommandParser(
        prog="skein-forge",
        description="Kauffman bracket skein algebra computations and Torelli relation checks.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    compute = commands.add_parser("compute", parents=[common], help="evaluate an expression")
    compute.add_argument("expression", help="e.g. 'bracket(L(x), y)' or '2*x - 1/2*empty'")

    verify = commands.add_parser("verify", parents=[common], help="check a relation from the library")
    verify.add_argument("relation", help="relation id, or 'all'")
    verify.add_argument("--c", dest="curve_c", help="curve name bound to 'c' for dehn-twist")
    verify.add_argument("--z", dest="curve_z", help="curve name bound to 'z' for dehn-twist")
    verify.add_argument("--jobs", type=int, default=1, help="worker processes for 'all'")

    commands.add_parser("surfaces", parents=[common], help="list library surfaces and relations")

    cache = commands.add_parser("cache", parents=[common], help="inspect or clear the product cache")
    cache.add_argument("action", choices=("stats", "clear"))
    return parser


def settings_from_args(args: argparse.Namespace) -> Settings:
    overrides: Dict[str, Dict[str, Any]] = {
        "policy": {"h_order": args.h_order, "filt_cap": args.filt_cap, "depth": args.depth},
        "cache": {"directory": args.cache},
        "report": {"format": "json" if args.json else None},
    }
    if args.no_cache:
        overrides["cache"]["enabled"] = False
    return load_settings(args.config, overrides)


def _session(settings: Settings, source: Optional[str]) -> SkeinSession:
    source = source or settings.surface_file
    if not source:
        return SkeinSession(settings)
    definitions = load_definitions(source)
    session = SkeinSession(settings, definitions.surface, definitions.curves)
    session.startup()
    return session


def _policy_view(session: SkeinSession) -> PolicyView:
    return PolicyView.model_validate(session.policy.model_dump())


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------
def run_compute(args: argparse.Namespace, settings: Settings) -> Tuple[BaseModel, int]:
    session = _session(settings, args.surface)
    if session.surface is None:
        raise SkeinForgeError("compute needs --surface (or surface_file in the settings)")
    value = evaluate_expression(session, args.expression)
    response = ComputeResponse(
        expression=args.expression,
        surface=session.surface.name,
        policy=_policy_view(session),
        kind=value_kind(value),
        value=value_json(value),
    )
    return response, EXIT_OK


def run_verify(args: argparse.Namespace, settings: Settings) -> Tuple[BaseModel, int]:
    if args.relation == "all":
        session = SkeinSession(settings)
        payloads = session.verify_many(session.relations(), jobs=args.jobs)
        batch = VerifyBatchResponse(reports=[VerifyResponse.model_validate(p) for p in payloads])
        return batch, batch.exit_code

    named = args.curve_c or args.curve_z
    if args.surface in (None, *LIBRARY_SPECS) and not named:
        session = SkeinSession(settings)
        report = session.verify(args.relation, surface=args.surface)
    else:
        session = _session(settings, args.surface or settings.surface_file)
        if session.surface is None:
            raise SkeinForgeError("--c and --z need --surface")
        for alias, name in (("c", args.curve_c), ("z", args.curve_z)):
            if name:
                session.define(alias, session.curve(name))
        report = session.verify(args.relation)
    response = VerifyResponse.model_validate(report.to_json())
    return response, response.exit_code


def run_surfaces(args: argparse.Namespace, settings: Settings) -> Tuple[BaseModel, int]:
    listing = [SurfaceView.model_validate(entry) for entry in SkeinSession.surfaces()]
    return SurfacesResponse(surfaces=listing, relations=SkeinSession.relations()), EXIT_OK


def run_cache(args: argparse.Namespace, settings: Settings) -> Tuple[BaseModel, int]:
    session = SkeinSession(settings)
    removed = session.cache_clear() if args.action == "clear" else None
    summary = session.cache_summary()
    view = CacheStatsResponse(directory=summary["directory"], records=summary["records"], bytes=summary["bytes"], removed=removed)
    return view, EXIT_OK


COMMANDS = {
    "compute": run_compute,
    "verify": run_verify,
    "surfaces": run_surfaces,
    "cache": run_cache,
}


# ----------------------------------------------------------------------
# Rendering
# ----------------------------------------------------------------------
def render_json(model: BaseModel) -> str:
    return orjson.dumps(model.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2).decode("utf-8")


def _verify_table(reports: Sequence[VerifyResponse]) -> Table:
    table = Table(title="relations")
    for column in ("relation", "surface", "verdict", "detail"):
        table.add_column(column)
    for report in reports:
        colour = {"pass": "green", "inconclusive": "yellow"}.get(report.verdict, "red")
        table.add_row(report.relation, report.surface, f"[{colour}]{report.verdict}[/{colour}]", report.detail)
    return table


def render_text(model: BaseModel) -> None:
    if isinstance(model, VerifyResponse):
        stdout.print(_verify_table([model]))
        for check in model.checks:
            stdout.print(f"  {check.name}: {check.verdict} ({check.detail})")
        stdout.print(f"policy: h^{model.policy.h_order}, F^{model.policy.filt_cap}, depth {model.policy.depth}")
    elif isinstance(model, VerifyBatchResponse):
        stdout.print(_verify_table(model.reports))
    elif isinstance(model, SurfacesResponse):
        table = Table(title="surfaces")
        for column in ("name", "order", "genus", "boundary", "curves"):
            table.add_column(column)
        for entry in model.surfaces:
            table.add_row(entry.name, " ".join(entry.order), str(entry.genus), str(entry.boundary), ", ".join(entry.curves))
        stdout.print(table)
        stdout.print("relations: " + ", ".join(model.relations))
    elif isinstance(model, ComputeResponse):
        stdout.print(f"[bold]{model.kind}[/bold] on {model.surface}")
        stdout.print(orjson.dumps(model.value, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2).decode("utf-8"))
    else:
        for key, value in model.model_dump().items():
            stdout.print(f"{key}: {value}")


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = settings_from_args(args)
        model, code = COMMANDS[args.command](args, settings)
    except SkeinForgeError as exc:
        stderr.print(f"[red]error:[/red] {exc}")
        return EXIT_FAIL
    except RuntimeError as exc:
        stderr.print(f"[red]configuration error:[/red] {exc}")
        return EXIT_FAIL
    if settings.report.format == "json":
        sys.stdout.write(render_json(model) + "\n")
    else:
        render_text(model)
    return code
