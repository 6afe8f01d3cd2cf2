"""Shared state and argument helpers of the subcommands."""

from __future__ import annotations

import argparse
import cmath
import math
from dataclasses import dataclass
from typing import Any

from pydantic import ValidationError

from pt_double_well.config import ConfigManager
from pt_double_well.core.eigensolver import Eigenpair, find_level
from pt_double_well.core.oracle import oracle_spectrum
from pt_double_well.core.semiclassics import wkb_level
from pt_double_well.core.settings import Settings
from pt_double_well.models.problem import BranchLabel, HamiltonianForm, ProblemSpec
from pt_double_well.services.export_service import ExportService
from pt_double_well.tasks.worker_pool import WorkerPool


class UsageError(Exception):
    """A command-line or configuration value was rejected."""

    def __init__(self, argument: str, message: str) -> None:
        self.argument = argument
        self.message = message
        super().__init__(f"{argument}: {message}")


@dataclass
class RunContext:
    args: argparse.Namespace
    config: ConfigManager
    settings: Settings
    export: ExportService
    pool: WorkerPool

    def option(self, key: str, default: Any = None) -> Any:
        """Flag value, else config-file value, else ``default``."""
        return self.config.resolve(key, getattr(self.args, key, None), default)

    def arguments(self) -> dict[str, Any]:
        return {k: v for k, v in sorted(vars(self.args).items()) if k != "func"}


def parse_angle(text: str) -> float:
    """Angle in radians from '170deg', '2.9rad' or a bare number of degrees."""
    value = str(text).strip().lower()
    try:
        if value.endswith("deg"):
            return math.radians(float(value[:-3]))
        if value.endswith("rad"):
            return float(value[:-3])
        return math.radians(float(value))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from e


def parse_complex(text: str) -> complex:
    """Complex number from 're,im' or Python literal syntax such as '0.3-0.1j'."""
    value = str(text).strip().replace(" ", "")
    try:
        if "," in value:
            re, im = value.split(",", 1)
            return complex(float(re), float(im))
        return complex(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from e


def add_problem_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("problem")
    group.add_argument("--form", choices=["H", "K"], help="Hamiltonian form (default K)")
    group.add_argument("--hbar", type=float, help="hbar of the H-form")
    group.add_argument("--alpha", type=float, help="alpha (or |alpha| with --alpha-arg) of the K-form")
    group.add_argument("--alpha-arg", type=parse_angle, help="arg(alpha), e.g. 30deg")


def add_level_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("level")
    group.add_argument("--level-guess", type=parse_complex, help="starting energy, 're,im'")
    group.add_argument("--n", type=int, help="perturbative index n of E_n^+/- (H-form)")
    group.add_argument("--sign", type=int, choices=[1, -1], help="well of E_n^+/- (+1: right well)")
    group.add_argument("--m", type=int, help="index of the level in the oracle spectrum")


def problem_from_args(ctx: RunContext) -> ProblemSpec:
    """ProblemSpec from --form/--hbar/--alpha/--alpha-arg.

    Raises:
        UsageError: the parameter lies outside its admissible sector
    """
    form = HamiltonianForm(ctx.option("form", "K"))
    arg = ctx.option("alpha_arg")
    if isinstance(arg, str):
        arg = parse_angle(arg)
    flag = "--hbar" if form is HamiltonianForm.H else ("--alpha" if arg is None else "--alpha-arg")
    try:
        if form is HamiltonianForm.H:
            hbar = ctx.option("hbar")
            if hbar is None:
                raise UsageError("--hbar", "required for the H-form")
            return ProblemSpec.h_form(float(hbar))
        alpha = ctx.option("alpha")
        if arg is not None:
            value = (1.0 if alpha is None else float(alpha)) * cmath.exp(1j * float(arg))
        else:
            value = complex(0.0 if alpha is None else float(alpha))
        return ProblemSpec.k_form(value)
    except ValidationError as e:
        raise UsageError(flag, str(e.errors()[0]["msg"])) from e


def level_from_args(ctx: RunContext, spec: ProblemSpec) -> Eigenpair:
    """The level selected by --level-guess, --n/--sign or --m."""
    guess = ctx.option("level_guess")
    n, sign, m = ctx.option("n"), ctx.option("sign"), ctx.option("m")
    label = BranchLabel()
    if guess is not None:
        energy = parse_complex(guess) if isinstance(guess, str) else complex(guess)
    elif n is not None:
        if spec.form is not HamiltonianForm.H:
            raise UsageError("--n", "perturbative labels need the H-form")
        if n < 0:
            raise UsageError("--n", "must be non-negative")
        seed = wkb_level(int(n), spec.hbar.real, int(sign or 1))
        energy, label = seed.value, seed.branch
    elif m is not None:
        levels = oracle_spectrum(spec, settings=ctx.settings)
        if not 0 <= int(m) < len(levels):
            raise UsageError("--m", f"oracle certified {len(levels)} levels")
        energy, label = levels[int(m)].value, BranchLabel.large_hbar(int(m))
    else:
        raise UsageError("--level-guess", "give --level-guess, --n/--sign or --m")
    return find_level(energy, spec, label=label, check_simplicity=False, settings=ctx.settings)
