"""Exception formatting and structured solver logging."""

from __future__ import annotations

import logging

import pytest

from pt_double_well.core.error_handling import (
    EXIT_NUMERICAL,
    EXIT_USAGE,
    PerformanceLogger,
    ReportFormatter,
    SolverLogger,
)
from pt_double_well.exceptions import (
    BasinEscapeError,
    ConvergenceError,
    ErrorCode,
    OutputError,
    PtdwError,
    WkbSeedError,
)


class TestExceptions:
    def test_message_carries_code(self):
        error = ConvergenceError("no root", details={"iterations": 50})
        assert str(error) == "[NOT_CONVERGED] no root"
        assert error.details == {"iterations": 50}

    def test_subclass_code(self):
        error = BasinEscapeError("escaped")
        assert isinstance(error, ConvergenceError)
        assert error.error_code is ErrorCode.BASIN_ESCAPE

    def test_explicit_code(self):
        error = WkbSeedError("growing", error_code=ErrorCode.WKB_NOT_DECAYING)
        assert error.error_code is ErrorCode.WKB_NOT_DECAYING

    def test_output_error(self):
        assert OutputError("disk full").error_code is ErrorCode.OUTPUT


class TestReportFormatter:
    def test_solver_error(self):
        doc = ReportFormatter.format_solver_error(PtdwError("bad", details={"energy": "1+1j"}))
        assert doc["success"] is False
        assert doc["error"]["exit_code"] == EXIT_NUMERICAL
        assert doc["error"]["details"] == {"code": "NOT_CONVERGED", "energy": "1+1j"}

    def test_usage_error(self):
        doc = ReportFormatter.format_usage_error("--hbar", "must be positive")
        assert doc["error"]["exit_code"] == EXIT_USAGE
        assert doc["error"]["details"] == {"argument": "--hbar"}
        assert "--hbar" in doc["error"]["message"]


def test_solver_events_carry_event_field(caplog):
    caplog.set_level(logging.DEBUG, logger="pt_double_well.solver")
    log = SolverLogger()
    log.log_bracket("crossing", 0.1, 0.2)
    log.log_trace_step(0.5 + 0j, 1.0 - 0.1j, 0.02)
    events = [getattr(r, "event", None) for r in caplog.records]
    assert events == ["crossing_bracket", "trace_step"]
    assert caplog.records[1].energy_im == pytest.approx(-0.1)


def test_performance_logger(caplog):
    caplog.set_level(logging.INFO, logger="pt_double_well.performance")
    perf = PerformanceLogger()
    assert perf.end_operation("never-started") == 0.0
    perf.start_operation("scan")
    assert perf.end_operation("scan") >= 0.0
    assert caplog.records[-1].event == "performance_metric"
    assert caplog.records[-1].operation == "scan"
