"""Output files: CSV rows, JSON documents, manifests."""

from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from pt_double_well.core.settings import Settings
from pt_double_well.exceptions import OutputError
from pt_double_well.models.problem import ComplexEnergy
from pt_double_well.services.export_service import ExportService, flatten_row, jsonable
from pt_double_well.utils.file_utils import calculate_file_hash, safe_write_text


def test_flatten_row_splits_complex():
    row = flatten_row({"energy": 1.5 - 0.25j, "n": 3, "h": 0.1})
    assert row == {"energy_re": "1.5", "energy_im": "-0.25", "n": 3, "h": "0.1"}


def test_flatten_row_keeps_full_precision():
    row = flatten_row({"x": np.float64(1 / 3)})
    assert float(row["x"]) == 1 / 3


def test_jsonable():
    doc = jsonable({"e": 1 + 2j, "arr": np.array([0.5, 1.0]), "level": ComplexEnergy(value=2 - 1j)})
    assert doc["e"] == {"re": 1.0, "im": 2.0}
    assert doc["arr"] == [0.5, 1.0]
    assert doc["level"]["value"] == {"re": 2.0, "im": -1.0}


class TestExportService:
    def test_rows(self, tmp_path):
        export = ExportService(tmp_path)
        path = export.write_rows("levels.csv", [{"index": 0, "energy": 1 + 0j}, {"index": 1, "energy": 2 - 1j}])
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
        assert list(rows[0]) == ["index", "energy_re", "energy_im"]
        assert rows[1]["energy_im"] == "-1.0"
        assert export.digests["levels.csv"] == calculate_file_hash(path)

    def test_rows_with_explicit_columns(self, tmp_path):
        export = ExportService(tmp_path)
        path = export.write_rows("t.csv", [{"b": 1, "a": 2}], columns=["a", "b"])
        assert path.read_text().splitlines()[0] == "a,b"

    def test_json_sorted(self, tmp_path):
        export = ExportService(tmp_path)
        path = export.write_json("doc.json", {"b": 1, "a": 0.5j})
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text)["a"] == {"re": 0.0, "im": 0.5}

    def test_manifest_lists_outputs(self, tmp_path):
        export = ExportService(tmp_path)
        export.write_json("a.json", {})
        export.write_diagnostics({"success": False})
        manifest = export.write_manifest("spectrum", {"hbar": 0.1}, Settings(workers=1), "0.1.0", 1.5)
        assert set(manifest.outputs) == {"a.json"}
        saved = json.loads((tmp_path / "manifest.json").read_text())
        assert saved["command"] == "spectrum"
        assert saved["tolerances"]["ode_rtol"] == Settings().ode_rtol
        assert (tmp_path / "diagnostics.json").exists()


def test_safe_write_creates_directories(tmp_path):
    path = safe_write_text(tmp_path / "a" / "b.txt", "content")
    assert path.read_text() == "content"
    assert not [p for p in path.parent.iterdir() if p.name.startswith(".")]


def test_safe_write_into_a_file_fails(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("x")
    with pytest.raises(OutputError):
        safe_write_text(blocker / "out.txt", "content")


def test_hash_errors(tmp_path):
    with pytest.raises(OutputError):
        calculate_file_hash(tmp_path / "missing")
    path = safe_write_text(tmp_path / "f.txt", "abc")
    assert calculate_file_hash(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    with pytest.raises(OutputError):
        calculate_file_hash(path, "no-such-hash")
