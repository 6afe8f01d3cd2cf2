"""Domain records."""

from .problem import BranchKind, BranchLabel, ComplexEnergy, HamiltonianForm, ProblemSpec
from .records import (
    BranchTrace,
    CheckReport,
    CrossingRecord,
    FluxReport,
    MonodromyReport,
    NodeBirthRecord,
    NodeSummary,
    RunManifest,
    TraceSample,
    ZeroClass,
    ZeroRecord,
)

__all__ = [
    "BranchKind",
    "BranchLabel",
    "BranchTrace",
    "CheckReport",
    "ComplexEnergy",
    "CrossingRecord",
    "FluxReport",
    "HamiltonianForm",
    "MonodromyReport",
    "NodeBirthRecord",
    "NodeSummary",
    "ProblemSpec",
    "RunManifest",
    "TraceSample",
    "ZeroClass",
    "ZeroRecord",
]
