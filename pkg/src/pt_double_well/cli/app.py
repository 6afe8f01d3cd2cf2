"""``ptdw`` command-line application.

Exit codes: 0 on success, 1 on a numerical failure (with ``diagnostics.json``
in the output directory), 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Sequence
from pathlib import Path

from pt_double_well import __version__
from pt_double_well.cli.commands import COMMANDS
from pt_double_well.cli.context import RunContext, UsageError
from pt_double_well.config import ConfigManager
from pt_double_well.core.error_handling import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    ReportFormatter,
    configure_logging,
    performance_logger,
)
from pt_double_well.exceptions import ConfigError, InvalidParameterError, PtdwError
from pt_double_well.services.export_service import ExportService
from pt_double_well.tasks.worker_pool import WorkerPool

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptdw",
        description="Levels, zeros and crossings of PT-symmetric cubic double wells",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="flat YAML file with default flag values")
    parser.add_argument("--workers", type=int, help="worker pool size (default: PTDW_WORKERS or CPU count)")
    parser.add_argument("--out", type=Path, help="output directory (default: ptdw-out)")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def _allowed_keys(parser: argparse.ArgumentParser) -> set[str]:
    keys: set[str] = set()
    for action in parser._actions:
        keys.add(action.dest)
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                keys.update(a.dest for a in sub._actions)
    return keys - {"help", "version", "config", "command"}


def _usage_failure(export: ExportService | None, argument: str, message: str) -> int:
    print(f"ptdw: error: {argument}: {message}", file=sys.stderr)
    if export is not None:
        try:
            export.write_diagnostics(ReportFormatter.format_usage_error(argument, message))
        except PtdwError:
            logger.debug("Could not write diagnostics for a usage error")
    return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    export: ExportService | None = None
    try:
        config = ConfigManager(args.config, allowed_keys=_allowed_keys(parser))
        overrides = {
            "workers": args.workers,
            "output_dir": args.out,
            "log_level": "DEBUG" if args.verbose else None,
        }
        settings = config.settings(overrides)
    except ConfigError as e:
        return _usage_failure(None, "--config", e.message)

    configure_logging(settings.log_level)
    export = ExportService(settings.output_dir)
    logger.info("ptdw %s: %s -> %s", __version__, args.command, settings.output_dir)

    start = time.perf_counter()
    performance_logger.start_operation(args.command)
    try:
        with WorkerPool(settings.workers) as pool:
            ctx = RunContext(args=args, config=config, settings=settings, export=export, pool=pool)
            args.func(ctx)
    except UsageError as e:
        return _usage_failure(export, e.argument, e.message)
    except argparse.ArgumentTypeError as e:
        return _usage_failure(export, args.command, str(e))
    except (InvalidParameterError, ConfigError) as e:
        return _usage_failure(export, args.command, e.message)
    except PtdwError as e:
        logger.error("%s failed: %s", args.command, e)
        export.write_diagnostics(ReportFormatter.format_solver_error(e))
        return EXIT_NUMERICAL
    finally:
        performance_logger.end_operation(args.command)

    export.write_manifest(
        command=args.command,
        arguments=ctx.arguments(),
        settings=settings,
        version=__version__,
        wall_time=time.perf_counter() - start,
    )
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
