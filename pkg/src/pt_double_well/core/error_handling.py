"""Diagnostics formatting and structured solver logging.

Three helpers: a formatter producing the JSON written next to a failed run,
a logger for the key solver events, and a timing logger.
"""

from __future__ import annotations

import logging
import time
from datetime import datetime
from typing import Any

from pt_double_well.exceptions import PtdwError

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class ReportFormatter:
    """Uniform diagnostics documents for failed runs."""

    @staticmethod
    def format_error(
        error_type: str,
        message: str,
        details: dict[str, Any] | None = None,
        exit_code: int = EXIT_NUMERICAL,
    ) -> dict[str, Any]:
        """Format a failure as a diagnostics document.

        Args:
            error_type: Error class or category name
            message: Human readable message
            details: Extra diagnostic values
            exit_code: Process exit code associated with the failure

        Returns:
            JSON-ready diagnostics mapping
        """
        return {
            "success": False,
            "error": {
                "type": error_type,
                "message": message,
                "details": details or {},
                "timestamp": datetime.now().isoformat(),
                "exit_code": exit_code,
            },
        }

    @classmethod
    def format_solver_error(cls, error: PtdwError) -> dict[str, Any]:
        """Format a numerical failure raised by the library."""
        return cls.format_error(
            error_type=type(error).__name__,
            message=error.message,
            details={"code": error.error_code.value, **error.details},
            exit_code=EXIT_NUMERICAL,
        )

    @classmethod
    def format_usage_error(cls, argument: str, message: str) -> dict[str, Any]:
        """Format a rejected command-line argument."""
        return cls.format_error(
            error_type="UsageError",
            message=f"Invalid value for '{argument}': {message}",
            details={"argument": argument},
            exit_code=EXIT_USAGE,
        )


class SolverLogger:
    """Key solver events, emitted with an ``event`` field for filtering."""

    def __init__(self) -> None:
        self.logger = logging.getLogger("pt_double_well.solver")

    def log_level_converged(
        self, energy: complex, iterations: int, residual: float
    ) -> None:
        self.logger.debug(
            "Level converged at %s after %d iterations (residual %.2e)",
            energy, iterations, residual,
            extra={
                "energy_re": energy.real,
                "energy_im": energy.imag,
                "iterations": iterations,
                "residual": residual,
                "event": "level_converged",
            },
        )

    def log_basin_escape(self, guess: complex, energy: complex) -> None:
        self.logger.warning(
            "Guess %s escaped its basin to %s",
            guess, energy,
            extra={
                "guess_re": guess.real,
                "guess_im": guess.imag,
                "energy_re": energy.real,
                "energy_im": energy.imag,
                "event": "basin_escape",
            },
        )

    def log_trace_step(self, param: complex, energy: complex, step: float) -> None:
        self.logger.debug(
            "Trace step at parameter %s: E = %s (step %.3e)",
            param, energy, step,
            extra={
                "param_re": param.real,
                "param_im": param.imag,
                "energy_re": energy.real,
                "energy_im": energy.imag,
                "step": step,
                "event": "trace_step",
            },
        )

    def log_step_rejected(self, param: complex, step: float, reason: str) -> None:
        self.logger.debug(
            "Step %.3e rejected at parameter %s: %s",
            step, param, reason,
            extra={
                "param_re": param.real,
                "param_im": param.imag,
                "step": step,
                "reason": reason,
                "event": "step_rejected",
            },
        )

    def log_bracket(self, kind: str, lower: float, upper: float) -> None:
        """Record a bisection bracket (crossing or node birth)."""
        self.logger.info(
            "%s bracket [%.10f, %.10f]",
            kind, lower, upper,
            extra={
                "kind": kind,
                "lower": lower,
                "upper": upper,
                "event": f"{kind}_bracket",
            },
        )

    def log_zero_refined(self, position: complex, residual: float) -> None:
        self.logger.debug(
            "Zero refined at %s (residual %.2e)",
            position, residual,
            extra={
                "zero_re": position.real,
                "zero_im": position.imag,
                "residual": residual,
                "event": "zero_refined",
            },
        )


class PerformanceLogger:
    """Wall-time metrics per named operation."""

    def __init__(self) -> None:
        self.logger = logging.getLogger("pt_double_well.performance")
        self._operation_times: dict[str, float] = {}

    def log_operation(self, operation_name: str, duration: float) -> None:
        """Record the duration of an operation.

        Args:
            operation_name: Operation name
            duration: Duration in seconds
        """
        self.logger.info(
            "Operation '%s' completed in %.3fs",
            operation_name, duration,
            extra={
                "operation": operation_name,
                "duration": duration,
                "event": "performance_metric",
            },
        )

    def start_operation(self, operation_name: str) -> None:
        self._operation_times[operation_name] = time.perf_counter()

    def end_operation(self, operation_name: str) -> float:
        """Stop timing an operation and return its duration."""
        if operation_name not in self._operation_times:
            return 0.0

        start_time = self._operation_times.pop(operation_name)
        duration = time.perf_counter() - start_time
        self.log_operation(operation_name, duration)
        return duration


solver_logger = SolverLogger()
performance_logger = PerformanceLogger()


def configure_logging(level: str) -> None:
    """Configure the root logger once for CLI runs."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
