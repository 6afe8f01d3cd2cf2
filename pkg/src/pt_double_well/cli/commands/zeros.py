"""``ptdw zeros``: zero census of a state, or of one level along an hbar sweep."""

from __future__ import annotations

import argparse
from typing import Any

from pt_double_well.cli.context import (
    RunContext,
    UsageError,
    add_level_arguments,
    add_problem_arguments,
    level_from_args,
    problem_from_args,
)
from pt_double_well.core.eigensolver import Eigenpair, find_level
from pt_double_well.core.zerolab import assign_classes, classify_zeros, locate_zeros
from pt_double_well.models.problem import HamiltonianForm


def register(subparsers: argparse._SubParsersAction[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("zeros", help="locate and classify the zeros of a state")
    add_problem_arguments(parser)
    add_level_arguments(parser)
    parser.add_argument("--hbars", type=float, nargs="+",
                        help="follow the level through these hbar values (H-form)")
    parser.set_defaults(func=run)


def _census(ctx: RunContext, pair: Eigenpair, rows: list[dict[str, Any]], summaries: list[dict[str, Any]]) -> None:
    zeros = locate_zeros(pair, settings=ctx.settings, pool=ctx.pool)
    classified = assign_classes(zeros, pair.value, pair.spec)
    summary = classify_zeros(zeros, pair.value, pair.spec, region_count=sum(z.multiplicity for z in zeros))
    param = pair.spec.parameter
    for record in classified:
        rows.append({
            "param": param,
            "energy": pair.value,
            "zero": record.position,
            "class": record.zero_class.value,
            "newton_residual": record.newton_residual,
            "multiplicity": record.multiplicity,
        })
    summaries.append({
        "param": param,
        "energy": pair.value,
        "n_plus": summary.n_plus,
        "n_minus": summary.n_minus,
        "imaginary_node": int(summary.has_imaginary_node),
        "n_far": summary.n_far,
    })


def run(ctx: RunContext) -> dict[str, Any]:
    spec = problem_from_args(ctx)
    hbars = ctx.option("hbars")
    if hbars is not None and spec.form is not HamiltonianForm.H:
        raise UsageError("--hbars", "sweeps run in hbar (H-form)")
    if hbars is not None and any(float(h) <= 0 for h in hbars):
        raise UsageError("--hbars", "hbar values must be positive")

    pair = level_from_args(ctx, spec)
    rows: list[dict[str, Any]] = []
    summaries: list[dict[str, Any]] = []
    _census(ctx, pair, rows, summaries)
    for hbar in hbars or []:
        if float(hbar) == spec.hbar.real:
            continue
        pair = find_level(pair.value, spec.with_parameter(float(hbar)), label=pair.energy.branch,
                          check_simplicity=False, settings=ctx.settings)
        _census(ctx, pair, rows, summaries)

    ctx.export.write_rows("zeros.csv", rows)
    ctx.export.write_rows("node_summaries.csv", summaries)
    return {"states": len(summaries), "zeros": len(rows)}
