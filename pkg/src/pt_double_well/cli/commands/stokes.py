"""``ptdw stokes``: Stokes diagrams at fixed energy, or the limit energy E^p."""

from __future__ import annotations

import argparse
from typing import Any

from pt_double_well.cli.context import RunContext, UsageError
from pt_double_well.core.continuation import TABLE1
from pt_double_well.core.semiclassics import (
    STOKES_CONVENTION,
    diagram_symmetry_defect,
    find_Ep,
    trace_stokes,
    trend_ratios,
)


def register(subparsers: argparse._SubParsersAction[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("stokes", help="Stokes diagram of p0 = sqrt(E - V)")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--energy", type=float, help="energy of the diagram (> 0)")
    mode.add_argument("--find-ep", action="store_true", default=None,
                      help="locate the energy where I0 meets the short line")
    parser.add_argument("--step", type=float, help="arc-length step of the tracer (default 0.01)")
    parser.set_defaults(func=run)


def _find_ep(ctx: RunContext) -> dict[str, Any]:
    e_p = find_Ep()
    rows = [TABLE1[n][:2] for n in sorted(TABLE1)]
    ratios = trend_ratios(rows, e_p)
    result = {
        "E_p": e_p,
        "convention": STOKES_CONVENTION,
        "published_trend": {str(n): float(r) for n, r in zip(sorted(TABLE1), ratios, strict=True)},
    }
    ctx.export.write_json("ep.json", result)
    return result


def run(ctx: RunContext) -> dict[str, Any]:
    if ctx.option("find_ep", False):
        return _find_ep(ctx)
    energy = ctx.option("energy")
    if energy is None:
        raise UsageError("--energy", "give --energy or --find-ep")
    if float(energy) <= 0:
        raise UsageError("--energy", "must be positive")
    diagram = trace_stokes(float(energy), step=float(ctx.option("step", 0.01)), pool=ctx.pool)

    rows = []
    for curve in diagram.curves:
        for k, z in enumerate(curve.points):
            rows.append({
                "source": curve.source,
                "direction_index": curve.direction_index,
                "end": curve.end,
                "point_index": k,
                "z": complex(z),
            })
    ctx.export.write_rows("stokes_curves.csv", rows)
    result = {
        "energy": diagram.energy,
        "convention": diagram.convention,
        "turning_points": diagram.turning_points,
        "short_line_status": diagram.short_line_status.value,
        "imaginary_point_distance": diagram.imaginary_point_distance,
        "short_line_functional": diagram.short_line_functional,
        "max_residual": diagram.max_residual,
        "symmetry_defect": diagram_symmetry_defect(diagram),
        "curves": [
            {"source": c.source, "direction_index": c.direction_index, "end": c.end, "residual": c.residual}
            for c in diagram.curves
        ],
        "notes": diagram.notes,
    }
    ctx.export.write_json("stokes.json", result)
    return result
