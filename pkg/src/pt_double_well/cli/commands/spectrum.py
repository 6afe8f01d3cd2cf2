"""``ptdw spectrum``: all levels in an energy rectangle, cross-checked with the oracle."""

from __future__ import annotations

import argparse
import logging
from typing import Any

from pt_double_well.cli.context import RunContext, UsageError, add_problem_arguments, problem_from_args
from pt_double_well.core.eigensolver import scan_spectrum
from pt_double_well.core.oracle import oracle_spectrum
from pt_double_well.utils.complex_utils import Rectangle, nearest_matching

logger = logging.getLogger(__name__)

ORACLE_AGREEMENT = 1e-7


def register(subparsers: argparse._SubParsersAction[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("spectrum", help="levels inside an energy rectangle")
    add_problem_arguments(parser)
    parser.add_argument("--emax", type=float, help="upper bound of Re E (default 12)")
    parser.add_argument(
        "--region",
        type=float,
        nargs=4,
        metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"),
        help="explicit search rectangle, overrides --emax",
    )
    parser.set_defaults(func=run)


def _region(ctx: RunContext) -> Rectangle:
    bounds = ctx.option("region")
    try:
        if bounds is not None:
            return Rectangle(*(float(b) for b in bounds))
        emax = float(ctx.option("emax", 12.0))
        return Rectangle(-1.0, emax, -0.25 * emax, 0.25 * emax)
    except ValueError as e:
        raise UsageError("--region", str(e)) from e


def run(ctx: RunContext) -> dict[str, Any]:
    spec = problem_from_args(ctx)
    region = _region(ctx)
    levels = scan_spectrum(region, spec, settings=ctx.settings, pool=ctx.pool)
    oracle = [e.value for e in oracle_spectrum(spec, settings=ctx.settings)]
    inside = [e for e in oracle if region.contains(e)]
    matches = {i: (j, d) for i, j, d in nearest_matching([e.value for e in levels], inside, ctx.settings.oracle_match_radius)}

    rows = []
    for i, level in enumerate(levels):
        j, distance = matches.get(i, (None, None))
        rows.append({
            "index": i,
            "energy": level.value,
            "label": str(level.branch),
            "oracle": inside[j] if j is not None else complex("nan"),
            "oracle_distance": distance if distance is not None else float("nan"),
        })
    unmatched = [r["index"] for r in rows if r["oracle_distance"] != r["oracle_distance"]
                 or r["oracle_distance"] > ORACLE_AGREEMENT]
    if unmatched or len(inside) != len(levels):
        logger.warning(
            "Oracle disagreement: %d shooting levels, %d oracle levels, unmatched %s",
            len(levels), len(inside), unmatched,
        )
    ctx.export.write_rows("levels.csv", rows)
    summary = {
        "problem": spec,
        "region": [region.re_min, region.re_max, region.im_min, region.im_max],
        "count": len(levels),
        "oracle_count": len(inside),
        "unmatched": unmatched,
    }
    ctx.export.write_json("spectrum.json", summary)
    return summary
