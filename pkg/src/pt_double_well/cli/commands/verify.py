"""``ptdw verify``: identity checks on one state."""

from __future__ import annotations

import argparse
import logging
from typing import Any

from pt_double_well.cli.context import (
    RunContext,
    add_level_arguments,
    add_problem_arguments,
    level_from_args,
    problem_from_args,
)
from pt_double_well.core.verify import (
    loeffel_martin_identity,
    p_overlap,
    pt_gauge,
    pt_reality_defect,
    wedge_flux_sign,
)
from pt_double_well.core.zerolab import check_zero_free_axis
from pt_double_well.exceptions import PtdwError
from pt_double_well.models.problem import HamiltonianForm

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("verify", help="flux identities, PT gauge and P-overlap")
    add_problem_arguments(parser)
    add_level_arguments(parser)
    parser.set_defaults(func=run)


def run(ctx: RunContext) -> dict[str, Any]:
    spec = problem_from_args(ctx)
    pair = level_from_args(ctx, spec)
    report: dict[str, Any] = {"problem": spec, "energy": pair.energy}

    flux = loeffel_martin_identity(pair)
    ctx.export.write_rows(
        "flux.csv",
        [{"y": y, "lhs": a, "rhs": b} for y, a, b in zip(flux.y, flux.lhs, flux.rhs, strict=True)],
    )
    report["flux_identity"] = flux.model_dump(exclude={"y", "lhs", "rhs"})
    report["zero_free_axis"] = check_zero_free_axis(pair)

    real_level = abs(pair.value.imag) <= 1e-10 * max(1.0, abs(pair.value))
    if real_level and spec.is_pt_real:
        gauged = pt_gauge(pair)
        twice = pt_gauge(gauged)
        report["pt_gauge"] = {
            "reality_defect": pt_reality_defect(gauged),
            "idempotence_defect": abs(twice.evaluate_one(twice.anchor)[0] - gauged.evaluate_one(gauged.anchor)[0]),
            "anchor": gauged.anchor,
            "anchor_shifted": gauged.anchor_shifted,
        }
        try:
            report["p_overlap"] = p_overlap(pair)
        except PtdwError as e:
            logger.warning("P-overlap unavailable: %s", e)
            report["p_overlap_error"] = e.message
    if spec.form is HamiltonianForm.K and spec.is_pt_real and spec.alpha.real >= 0 and real_level:
        report["wedge_flux"] = [wedge_flux_sign(pair, x, -0.5) for x in (1.0, -1.0)]

    ctx.export.write_json("verify.json", report)
    return report
