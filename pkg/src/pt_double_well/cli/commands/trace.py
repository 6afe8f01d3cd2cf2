"""``ptdw trace``: continue a level in hbar or along an alpha arc."""

from __future__ import annotations

import argparse
import logging
from typing import Any

from pt_double_well.cli.context import (
    RunContext,
    UsageError,
    add_level_arguments,
    level_from_args,
)
from pt_double_well.core.continuation import (
    arc_endpoint_level,
    critical_overlap,
    hbar_path,
    locate_crossing,
    monodromy_check,
    trace_level,
)
from pt_double_well.core.eigensolver import find_level
from pt_double_well.models.problem import ProblemSpec
from pt_double_well.models.records import BranchTrace

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("trace", help="continue a level along a parameter path")
    parser.add_argument("--path", choices=["hbar", "alpha-arc"], help="path kind (default hbar)")
    parser.add_argument("--from", dest="h_from", type=float, help="starting hbar of an hbar path")
    parser.add_argument("--to", dest="h_to", type=float, help="final hbar of an hbar path")
    parser.add_argument("--hbar", type=float, help="hbar whose alpha arc is followed")
    parser.add_argument("--node-summaries", action="store_true", default=None,
                        help="record node summaries along the trace")
    parser.add_argument("--detect-crossing", type=int, metavar="N",
                        help="trace both sides of crossing N and refine h_N")
    parser.add_argument("--monodromy", type=float, metavar="FRACTION",
                        help="with --detect-crossing, circle h_N at radius FRACTION * h_N")
    add_level_arguments(parser)
    parser.set_defaults(func=run)


def _rows(trace: BranchTrace) -> list[dict[str, Any]]:
    rows = []
    for k, s in enumerate(trace.samples):
        row: dict[str, Any] = {"step_index": k, "param": s.param, "energy": s.energy.value, "step": s.step}
        if s.node_summary is not None:
            row.update(n_plus=s.node_summary.n_plus, n_minus=s.node_summary.n_minus,
                       imaginary_node=int(s.node_summary.has_imaginary_node))
        rows.append(row)
    return rows


def _write_trace(ctx: RunContext, name: str, trace: BranchTrace) -> None:
    ctx.export.write_rows(f"{name}.csv", _rows(trace))
    ctx.export.write_json(f"{name}_annotations.json", {
        "annotations": trace.annotations,
        "rejected_steps": trace.rejected_steps,
        "truncated": trace.truncated,
        "diagnostics": trace.diagnostics,
    })


def _crossing(ctx: RunContext, n: int) -> dict[str, Any]:
    if n < 0:
        raise UsageError("--detect-crossing", "must be non-negative")
    fraction = ctx.option("monodromy")
    if fraction is not None and not 0 < fraction < 1:
        raise UsageError("--monodromy", "radius fraction must lie in (0, 1)")
    record, below, above = locate_crossing(n, settings=ctx.settings, pool=ctx.pool)
    _write_trace(ctx, "trace_below", below)
    _write_trace(ctx, "trace_above", above)
    overlap = critical_overlap(n, record, settings=ctx.settings, pool=ctx.pool)
    result: dict[str, Any] = {"crossing": record, "critical_overlap": overlap}
    if fraction is not None:
        result["monodromy"] = monodromy_check(n, fraction * record.h_n, record, settings=ctx.settings, pool=ctx.pool)
    ctx.export.write_json("crossing.json", result)
    return result


def _arc(ctx: RunContext) -> dict[str, Any]:
    hbar, n, sign = ctx.option("hbar"), ctx.option("n"), ctx.option("sign")
    if hbar is None or n is None or sign is None:
        raise UsageError("--path", "alpha-arc needs --hbar, --n and --sign")
    if hbar <= 0:
        raise UsageError("--hbar", "must be positive")
    trace, endpoint = arc_endpoint_level(int(n), float(hbar), int(sign), settings=ctx.settings, pool=ctx.pool)
    direct = find_level(endpoint.value, ProblemSpec.h_form(float(hbar)), label=endpoint.branch,
                        check_simplicity=False, settings=ctx.settings)
    _write_trace(ctx, "trace", trace)
    result = {
        "endpoint": endpoint,
        "direct": direct.value,
        "scaling_mismatch": abs(direct.value - endpoint.value),
    }
    ctx.export.write_json("arc_endpoint.json", result)
    return result


def run(ctx: RunContext) -> dict[str, Any]:
    crossing = ctx.option("detect_crossing")
    if crossing is not None:
        return _crossing(ctx, int(crossing))
    if ctx.option("path", "hbar") == "alpha-arc":
        return _arc(ctx)

    h_from, h_to = ctx.option("h_from"), ctx.option("h_to")
    if h_from is None or h_to is None:
        raise UsageError("--from", "an hbar path needs --from and --to")
    if h_from <= 0 or h_to <= 0:
        raise UsageError("--to" if h_from > 0 else "--from", "hbar must stay positive")
    start = level_from_args(ctx, ProblemSpec.h_form(float(h_from)))
    trace = trace_level(
        start,
        hbar_path(float(h_from), float(h_to)),
        node_summaries=bool(ctx.option("node_summaries", False)),
        settings=ctx.settings,
        pool=ctx.pool,
    )
    _write_trace(ctx, "trace", trace)
    if trace.truncated:
        logger.warning("Trace truncated: %s", trace.diagnostics.get("reason"))
    return {"samples": len(trace.samples), "truncated": trace.truncated}
