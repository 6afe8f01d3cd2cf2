"""``ptdw table1``: imaginary-node births (h_n^p, E_n^p) next to the published values."""

from __future__ import annotations

import argparse
from typing import Any

from pt_double_well.cli.context import RunContext, UsageError
from pt_double_well.core.continuation import NODE_BIRTH_SCAN, TABLE1, find_node_birth
from pt_double_well.core.semiclassics import find_Ep


def register(subparsers: argparse._SubParsersAction[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("table1", help="node-birth points for a list of n")
    parser.add_argument("--n", type=int, nargs="+", help="indices n (default 8 9 10 11)")
    parser.add_argument("--bracket", type=float, nargs=2, metavar=("LOW", "HIGH"),
                        help="hbar bracket used for every n")
    parser.add_argument("--scan", type=float, nargs=2, metavar=("LOW", "HIGH"),
                        help="hbar interval walked down geometrically when no bracket is given")
    parser.set_defaults(func=run)


def run(ctx: RunContext) -> dict[str, Any]:
    values = ctx.option("n", sorted(TABLE1))
    indices = [int(n) for n in (values if isinstance(values, (list, tuple)) else [values])]
    if any(n < 0 for n in indices):
        raise UsageError("--n", "indices must be non-negative")
    bracket = ctx.option("bracket")
    scan = ctx.option("scan", NODE_BIRTH_SCAN)
    if not 0.0 < scan[0] < scan[1]:
        raise UsageError("--scan", "needs 0 < LOW < HIGH")

    e_p = find_Ep()
    records = []
    rows = []
    for n in indices:
        record = find_node_birth(
            n,
            bracket=tuple(bracket) if bracket is not None else None,
            scan=(float(scan[0]), float(scan[1])),
            settings=ctx.settings,
            pool=ctx.pool,
        )
        records.append(record)
        row: dict[str, Any] = {
            "n": n,
            "h_p": record.h_p,
            "E_p": record.E_p,
            "bracket_low": record.bracket[0],
            "bracket_high": record.bracket[1],
            "trend_ratio": (record.E_p - e_p) / record.h_p**2,
            "published_h_p": record.published_h_p,
            "published_E_p": record.published_E_p,
            "published_E_p_error": record.published_E_p_error,
        }
        if record.published_h_p is not None and record.published_E_p is not None:
            row["h_p_difference"] = record.h_p - record.published_h_p
            row["E_p_difference"] = record.E_p - record.published_E_p
        rows.append(row)

    columns = [
        "n", "h_p", "E_p", "published_h_p", "published_E_p", "published_E_p_error",
        "h_p_difference", "E_p_difference", "trend_ratio", "bracket_low", "bracket_high",
    ]
    ctx.export.write_rows("table1.csv", [{c: r.get(c) for c in columns} for r in rows], columns)
    result = {"E_p_limit": e_p, "rows": records, "tolerances": {"hbar_xtol": 1e-10}}
    ctx.export.write_json("table1.json", result)
    return result
