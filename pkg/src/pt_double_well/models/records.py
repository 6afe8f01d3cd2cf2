"""Result records written by the CLI.

All complex values serialize as paired re/im fields in JSON.
"""

from __future__ import annotations

from datetime import datetime
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from .problem import ComplexEnergy, ComplexNumber


class ZeroClass(str, Enum):
    """Classification of a zero of an eigenstate."""

    NODE_PLUS = "node_plus"
    NODE_MINUS = "node_minus"
    IMAGINARY_NODE = "imaginary_node"
    FAR_ZERO = "far_zero"


class ZeroRecord(BaseModel):
    """A located zero of psi."""

    model_config = ConfigDict(populate_by_name=True)

    position: ComplexNumber
    newton_residual: float = Field(..., ge=0.0)
    zero_class: ZeroClass = Field(default=ZeroClass.FAR_ZERO, alias="class")
    multiplicity: int = Field(default=1, ge=1)


class ContourWinding(BaseModel):
    contour_id: str
    count: int


class NodeSummary(BaseModel):
    """Node counts of one state."""

    n_plus: int = Field(..., ge=0)
    n_minus: int = Field(..., ge=0)
    has_imaginary_node: bool
    n_far: int = Field(default=0, ge=0)
    windings: list[ContourWinding] = Field(default_factory=list)

    @property
    def node_total(self) -> int:
        return self.n_plus + self.n_minus + int(self.has_imaginary_node)


class CheckReport(BaseModel):
    """Outcome of a structural check (confinement, zero-free axis, asymptotics...)."""

    name: str
    passed: bool
    applied: bool = True
    values: dict[str, float] = Field(default_factory=dict)
    violations: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


class ParameterKindName(str, Enum):
    HBAR = "hbar"
    ALPHA_ARC = "alpha-arc"


class TraceSample(BaseModel):
    param: ComplexNumber
    energy: ComplexEnergy
    step: float = 0.0
    node_summary: NodeSummary | None = None


class AnnotationKind(str, Enum):
    CROSSING = "crossing"
    NODE_BIRTH = "node_birth"
    NONE = "none"


class TraceAnnotation(BaseModel):
    kind: AnnotationKind
    parameter: ComplexNumber
    energy: ComplexNumber


class BranchTrace(BaseModel):
    """Ordered (parameter, energy) samples of one continued level."""

    parameter_kind: ParameterKindName
    samples: list[TraceSample] = Field(default_factory=list)
    annotations: list[TraceAnnotation] = Field(default_factory=list)
    rejected_steps: int = 0
    truncated: bool = False
    diagnostics: dict[str, Any] = Field(default_factory=dict)

    @property
    def final(self) -> TraceSample:
        return self.samples[-1]

    @property
    def energies(self) -> list[complex]:
        return [s.energy.value for s in self.samples]

    @property
    def params(self) -> list[complex]:
        return [s.param for s in self.samples]


class CrossingRecord(BaseModel):
    """A level crossing h_n with its fit diagnostics."""

    n: int = Field(..., ge=0)
    h_n: float = Field(..., gt=0.0)
    E_n_c: float
    sqrt_exponent_fit: float
    critical_node_set: list[ComplexNumber] = Field(default_factory=list)
    bracket_below: tuple[float, float]
    bracket_above: tuple[float, float]
    bracket_agreement: float
    fit_deltas: list[float] = Field(default_factory=list)
    fit_gaps: list[float] = Field(default_factory=list)


class NodeBirthRecord(BaseModel):
    """Where the imaginary node of psi_{2n+1} enters the half-line below I0."""

    n: int = Field(..., ge=0)
    h_p: float = Field(..., gt=0.0)
    E_p: float
    bracket: tuple[float, float]
    published_h_p: float | None = None
    published_E_p: float | None = None
    published_E_p_error: float | None = None


class MonodromyPath(BaseModel):
    name: str
    start: ComplexNumber
    end: ComplexNumber
    target: ComplexNumber
    target_label: str
    mismatch: float
    passed: bool


class MonodromyReport(BaseModel):
    n: int
    h_n: float
    radius: float
    tolerance: float
    paths: list[MonodromyPath] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.paths)


class FluxReport(BaseModel):
    """Both sides of the imaginary-axis flux identity on a y grid."""

    y: list[float]
    lhs: list[float]
    rhs: list[float]
    max_relative_residual: float
    tail_converged: bool
    im_energy: float
    base_point: float = 0.0
    base_flux: float = 0.0


class RunManifest(BaseModel):
    """Everything needed to reproduce a run."""

    command: str
    arguments: dict[str, Any]
    configuration: dict[str, Any]
    version: str
    tolerances: dict[str, Any]
    wall_time: float = 0.0
    outputs: dict[str, str] = Field(default_factory=dict)
    created_at: datetime = Field(default_factory=datetime.now)
