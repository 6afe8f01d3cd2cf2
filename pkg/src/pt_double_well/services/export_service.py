"""Output persistence: CSV for sampled data, JSON for records and manifests.

Complex values are always written as paired ``<name>_re`` / ``<name>_im``
columns in CSV and as ``{"re": ..., "im": ...}`` objects in JSON. Every file
is written atomically and its SHA-256 digest is kept for the run manifest.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel

from pt_double_well.core.settings import Settings
from pt_double_well.models.records import RunManifest
from pt_double_well.utils.file_utils import calculate_file_hash, safe_write_text

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
DIAGNOSTICS_NAME = "diagnostics.json"


def flatten_row(row: Mapping[str, Any]) -> dict[str, Any]:
    """Split complex entries of a row into ``_re``/``_im`` columns."""
    flat: dict[str, Any] = {}
    for key, value in row.items():
        if isinstance(value, (complex, np.complexfloating)):
            flat[f"{key}_re"] = repr(float(value.real))
            flat[f"{key}_im"] = repr(float(value.imag))
        elif isinstance(value, (float, np.floating)):
            flat[key] = repr(float(value))
        else:
            flat[key] = value
    return flat


def jsonable(value: Any) -> Any:
    """Plain JSON structure with complex numbers as re/im objects."""
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json", by_alias=True)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


class ExportService:
    """Single writer for everything a run puts in its output directory."""

    def __init__(self, output_dir: Path) -> None:
        self.output_dir = Path(output_dir)
        self.digests: dict[str, str] = {}

    def _record(self, path: Path) -> Path:
        self.digests[path.name] = calculate_file_hash(path)
        logger.info("Wrote %s", path)
        return path

    def write_rows(
        self,
        name: str,
        rows: Iterable[Mapping[str, Any]],
        columns: Sequence[str] | None = None,
    ) -> Path:
        """CSV file of rows; column order is ``columns`` or first-seen order."""
        flat = [flatten_row(r) for r in rows]
        if columns is None:
            seen: dict[str, None] = {}
            for r in flat:
                seen.update(dict.fromkeys(r))
            header = list(seen)
        else:
            header = list(columns)
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=header, lineterminator="\n", extrasaction="raise")
        writer.writeheader()
        writer.writerows(flat)
        return self._record(safe_write_text(self.output_dir / name, buffer.getvalue()))

    def write_json(self, name: str, payload: Any) -> Path:
        """JSON document with sorted keys."""
        text = json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n"
        return self._record(safe_write_text(self.output_dir / name, text))

    def write_diagnostics(self, document: Mapping[str, Any]) -> Path:
        """Diagnostics of a failed run; not part of the manifest digests."""
        text = json.dumps(jsonable(document), indent=2, sort_keys=True) + "\n"
        return safe_write_text(self.output_dir / DIAGNOSTICS_NAME, text)

    def write_manifest(
        self,
        command: str,
        arguments: Mapping[str, Any],
        settings: Settings,
        version: str,
        wall_time: float,
    ) -> RunManifest:
        """manifest.json naming the configuration, tolerances and output digests."""
        manifest = RunManifest(
            command=command,
            arguments=jsonable(dict(arguments)),
            configuration=jsonable(settings.model_dump()),
            version=version,
            tolerances=settings.tolerance_snapshot(),
            wall_time=wall_time,
            outputs=dict(sorted(self.digests.items())),
        )
        text = manifest.model_dump_json(indent=2) + "\n"
        safe_write_text(self.output_dir / MANIFEST_NAME, text)
        return manifest
