"""Command line: ``parafuzzy validate | run | sweep``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import CONFIG_DIR_ENV, FORMATS, ConfigError, load_config, locate_config, prepare
from .engine import GeometryError, ParaFuzzyEngine, StepSpec, default_engine, validate_geometry
from .profiles import (
    ProfileError,
    describe_profile,
    load_preset,
    load_profile,
    preset_names,
    profile_warnings,
)
from .report import render, render_report_figure, render_table, render_sweep_csv, render_sweep_figure
from .telemetry import run_scheduler

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_VALIDATION = 4
EXIT_RUNTIME = 5

log = logging.getLogger("parafuzzy")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parafuzzy",
        description="Para-fuzzy condition monitoring for data-network equipment.",
        epilog=f"Without --config, {CONFIG_DIR_ENV}/parafuzzy.ini (or ./parafuzzy.ini) is used.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a run configuration, profiles or geometry")
    p.add_argument("-c", "--config", help="run configuration (INI or JSON)")
    p.add_argument("--profile", action="append", default=[], help="profile file or preset name (repeatable)")
    p.add_argument("--geometry", help="para-fuzzy geometry file")
    p.add_argument("--presets", action="store_true", help="validate every built-in preset")
    p.add_argument("--show", action="store_true", help="print the effective profiles")

    p = sub.add_parser("run", help="run the monitoring loop and emit reports")
    p.add_argument("-c", "--config", help="run configuration (INI or JSON)")
    p.add_argument("-n", "--cycles", type=int, help="number of cycles (default: config, else until replay ends)")
    p.add_argument("--cycle-seconds", type=int, help="seconds per cycle (default 300)")
    p.add_argument("-f", "--format", choices=FORMATS, help="report format")
    p.add_argument("-o", "--output", help="report file (default stdout)")
    p.add_argument("--fast", action="store_true", help="do not wait between cycles")
    p.add_argument("--figure", help="also draw node results in the lattice to this image file")

    p = sub.add_parser("sweep", help="evaluate the para-fuzzy engine over a (Dc, Dct) grid")
    p.add_argument("--step", type=float, default=0.05, help="grid step on both axes (default 0.05)")
    p.add_argument(
        "--grid",
        choices=("uniform", "paper"),
        default="uniform",
        help="'paper' uses tenths plus Dc = +-0.05 (ignores --step)",
    )
    p.add_argument("--geometry", help="para-fuzzy geometry file")
    p.add_argument("-o", "--output", help="CSV file (default stdout)")
    p.add_argument("--figure", help="also draw crisp and state maps to this image file")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = {"validate": cmd_validate, "run": cmd_run, "sweep": cmd_sweep}[args.command]
    return handler(args)


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_validate(args: argparse.Namespace) -> int:
    problems: list[str] = []
    warnings: list[str] = []
    shown = []

    if args.geometry:
        try:
            ParaFuzzyEngine.from_file(args.geometry)
        except OSError as exc:
            _err(f"{args.geometry}: {exc.strerror or exc}")
            return EXIT_CONFIG
        except (GeometryError, ValueError) as exc:
            problems.append(f"{args.geometry}: {exc}")

    for ref in args.profile:
        try:
            profile = load_preset(ref) if ref in preset_names() else load_profile(ref)
        except OSError as exc:
            _err(f"{ref}: {exc.strerror or exc}")
            return EXIT_CONFIG
        except ProfileError as exc:
            problems += exc.problems
            continue
        warnings += profile_warnings(profile, ref)
        shown.append(profile)

    explicit = bool(args.geometry or args.profile or args.presets)
    if args.config or not explicit:
        path = locate_config(args.config)
        if args.config or path.exists():
            try:
                cfg = load_config(path)
            except ConfigError as exc:
                _err(str(exc))
                return EXIT_CONFIG
            prepared, found = prepare(cfg)
            problems += found
            if prepared:
                warnings += prepared.warnings
                shown += [b.profile for b in prepared.bindings]
        else:
            args.presets = True

    if args.presets:
        problems += [f"geometry: {p}" for p in validate_geometry(*_parts(default_engine()))]
        for name in preset_names():
            try:
                profile = load_preset(name)
            except ProfileError as exc:
                problems += exc.problems
                continue
            warnings += profile_warnings(profile, f"preset:{name}")
            shown.append(profile)

    if args.show:
        seen = set()
        for profile in shown:
            if profile.name not in seen:
                seen.add(profile.name)
                print(describe_profile(profile))
    for w in warnings:
        print(f"warning: {w}")
    for p in problems:
        print(f"error: {p}")
    if problems:
        print(f"{len(problems)} error(s)")
        return EXIT_VALIDATION
    print("ok")
    return EXIT_OK


def _parts(engine: ParaFuzzyEngine):
    return engine.axes, engine.table, engine.outputs


def cmd_run(args: argparse.Namespace) -> int:
    path = locate_config(args.config)
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    if args.cycles is not None:
        cfg.cycles = args.cycles
    if args.cycle_seconds is not None:
        cfg.cycle_seconds = args.cycle_seconds
    if args.format:
        cfg.output_format = args.format
    if args.output:
        cfg.output = args.output
    if args.fast:
        cfg.pace = "fast"
    if cfg.cycle_seconds < 1:
        cfg.problems.append("cycle seconds must be at least 1")
    if cfg.cycles is not None and cfg.cycles < 0:
        cfg.problems.append("cycles must be non-negative")

    prepared, problems = prepare(cfg)
    if prepared is None:
        for p in problems:
            _err(f"error: {p}")
        return EXIT_VALIDATION
    for w in prepared.warnings:
        log.warning(w)

    # An unbounded loop never finishes, so print each cycle as it completes.
    unbounded = any(src.length is None for src in prepared.sources.values())
    streaming = cfg.output_format == "table" and cfg.output is None and cfg.cycles is None and unbounded
    pending: list = []
    try:
        reports = []
        for rep in run_scheduler(
            prepared.sources,
            prepared.bindings,
            cfg.cycle_seconds,
            cfg.cycles,
            engine=prepared.engine,
            precedence=cfg.precedence,
            start_time=cfg.start_time,
            realtime=cfg.pace == "realtime",
        ):
            log.info("cycle %d %s: %s", rep.cycle, rep.equipment, rep.condition or "STALE")
            if streaming:
                if pending and pending[0].cycle != rep.cycle:
                    sys.stdout.write(render_table(pending, header=pending[0].cycle == 1))
                    sys.stdout.flush()
                    pending = []
                pending.append(rep)
            if not streaming or args.figure:
                reports.append(rep)
        if not streaming:
            _write(render(reports, cfg.output_format), cfg.output)
        if args.figure:
            render_report_figure(reports, args.figure)
    except KeyboardInterrupt:
        if pending:
            sys.stdout.write(render_table(pending, header=pending[0].cycle == 1))
        return EXIT_OK
    except BrokenPipeError:
        # Output closed early (e.g. piped into head); not an engine failure.
        sys.stderr.close()
        return EXIT_OK
    except OSError as exc:
        _err(f"error: {exc.filename or ''}: {exc.strerror or exc}")
        return EXIT_RUNTIME
    except Exception as exc:  # report, do not trace back, on runtime failures
        log.debug("run failed", exc_info=True)
        _err(f"error: {exc}")
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        engine = ParaFuzzyEngine.from_file(args.geometry) if args.geometry else default_engine()
    except OSError as exc:
        _err(f"{args.geometry}: {exc.strerror or exc}")
        return EXIT_CONFIG
    except (GeometryError, ValueError) as exc:
        _err(f"error: {args.geometry}: {exc}")
        return EXIT_VALIDATION
    try:
        grid = StepSpec.paper() if args.grid == "paper" else StepSpec.uniform(args.step)
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_CONFIG
    records = engine.lattice_sweep(grid)
    try:
        _write(render_sweep_csv(records), args.output)
        if args.figure:
            render_sweep_figure(records, args.figure)
    except OSError as exc:
        _err(f"error: {exc.filename or args.output}: {exc.strerror or exc}")
        return EXIT_RUNTIME
    return EXIT_OK


def _write(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


if __name__ == "__main__":
    sys.exit(main())
