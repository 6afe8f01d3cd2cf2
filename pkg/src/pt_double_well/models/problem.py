"""Problem definition and energy labels.

Both Hamiltonians share one cubic form, -h^2 psi'' + i(z^3 + a z) psi = E psi,
with (h, a) = (hbar, -1) for the H-form and (1, alpha) for the K-form.
"""

from __future__ import annotations

import cmath
import math
from enum import Enum
from typing import Annotated, Any

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    model_validator,
)

HBAR_SECTOR = math.pi / 4
ALPHA_SECTOR = 4 * math.pi / 5


def _coerce_complex(value: Any) -> Any:
    if isinstance(value, dict) and {"re", "im"} <= value.keys():
        return complex(float(value["re"]), float(value["im"]))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if hasattr(value, "dtype"):
        return complex(value)
    return value


def _serialize_complex(value: complex) -> dict[str, float]:
    return {"re": value.real, "im": value.imag}


ComplexNumber = Annotated[
    complex,
    BeforeValidator(_coerce_complex),
    PlainSerializer(_serialize_complex, when_used="json"),
]
"""Complex field serialized as paired ``re``/``im`` values in JSON."""


class HamiltonianForm(str, Enum):
    """Which Hamiltonian a problem describes."""

    H = "H"
    K = "K"


class ProblemSpec(BaseModel):
    """A concrete eigenvalue problem plus its numerical budgets.

    ``truncation_radius`` of ``None`` lets the propagator pick the radius from
    the decay budget. ``continuation`` relaxes the alpha sector check for
    points on continuation arcs that leave the analyticity sector.
    """

    model_config = ConfigDict(frozen=True)

    form: HamiltonianForm
    hbar: ComplexNumber = Field(default=1.0, description="Semiclassical parameter (H-form)")
    alpha: ComplexNumber = Field(default=0.0, description="Linear coefficient (K-form)")
    truncation_radius: float | None = Field(default=None, gt=0.0)
    ode_tolerance: float | None = Field(
        default=None, gt=0.0, lt=1e-3, description="Integrator rtol; None uses the ode_rtol setting"
    )
    zero_tolerance: float = Field(default=1e-10, gt=0.0)
    gauge_anchor: ComplexNumber = Field(default=0.0, description="Point where psi is set to 1")
    boundary_angle: float = Field(
        default=0.0,
        ge=-math.pi / 10,
        le=math.pi / 10,
        description="Angle of the right boundary ray; the left ray is its mirror",
    )
    continuation: bool = False

    @model_validator(mode="after")
    def _check_sector(self) -> ProblemSpec:
        if self.form is HamiltonianForm.H:
            if self.hbar == 0 or abs(cmath.phase(self.hbar)) >= HBAR_SECTOR:
                raise ValueError(
                    f"hbar={self.hbar} outside |arg hbar| < pi/4 (real hbar must be > 0)"
                )
        elif not self.continuation and not alpha_in_sector(self.alpha):
            raise ValueError(
                f"alpha={self.alpha} outside |arg alpha| < 4pi/5 and not on the negative axis"
            )
        return self

    @classmethod
    def h_form(cls, hbar: complex, **kwargs: Any) -> ProblemSpec:
        return cls(form=HamiltonianForm.H, hbar=hbar, **kwargs)

    @classmethod
    def k_form(cls, alpha: complex, **kwargs: Any) -> ProblemSpec:
        return cls(form=HamiltonianForm.K, alpha=alpha, **kwargs)

    @property
    def hbar_eff(self) -> complex:
        """Coefficient h of -h^2 d^2/dz^2 in the unified form."""
        return complex(self.hbar) if self.form is HamiltonianForm.H else 1.0 + 0j

    @property
    def linear_coefficient(self) -> complex:
        """Coefficient a of i*a*z in the unified potential."""
        return -1.0 + 0j if self.form is HamiltonianForm.H else complex(self.alpha)

    @property
    def parameter(self) -> complex:
        """The free parameter: hbar for the H-form, alpha for the K-form."""
        return complex(self.hbar) if self.form is HamiltonianForm.H else complex(self.alpha)

    @property
    def is_pt_real(self) -> bool:
        """True when the operator commutes with P_xT (real hbar, real alpha)."""
        return abs(self.hbar_eff.imag) == 0.0 and abs(self.linear_coefficient.imag) == 0.0

    def with_parameter(self, value: complex) -> ProblemSpec:
        """Copy of this problem at another parameter value."""
        key = "hbar" if self.form is HamiltonianForm.H else "alpha"
        return self.model_copy(update={key: complex(value)})


def alpha_in_sector(alpha: complex) -> bool:
    """Admissible alpha: 0, |arg alpha| < 4pi/5, or the negative real axis."""
    if alpha == 0:
        return True
    if alpha.imag == 0 and alpha.real < 0:
        return True
    return abs(cmath.phase(alpha)) < ALPHA_SECTOR


class BranchKind(str, Enum):
    PERTURBATIVE = "perturbative"
    LARGE_HBAR = "large_hbar"
    UNLABELED = "unlabeled"


class BranchLabel(BaseModel):
    """Label of a level: E_n^+/E_n^- (perturbative) or E_m (large hbar).

    Labels follow continuation history; they are never re-derived from values.
    """

    model_config = ConfigDict(frozen=True)

    kind: BranchKind = BranchKind.UNLABELED
    n: int | None = Field(default=None, ge=0)
    sign: int | None = None

    @model_validator(mode="after")
    def _check_fields(self) -> BranchLabel:
        if self.kind is BranchKind.PERTURBATIVE and (self.n is None or self.sign not in (1, -1)):
            raise ValueError("perturbative labels need n and sign +1/-1")
        if self.kind is BranchKind.LARGE_HBAR and self.n is None:
            raise ValueError("large-hbar labels need the level index m")
        return self

    @classmethod
    def perturbative(cls, n: int, sign: int) -> BranchLabel:
        return cls(kind=BranchKind.PERTURBATIVE, n=n, sign=sign)

    @classmethod
    def large_hbar(cls, m: int) -> BranchLabel:
        return cls(kind=BranchKind.LARGE_HBAR, n=m)

    def conjugate(self) -> BranchLabel:
        if self.kind is BranchKind.PERTURBATIVE:
            assert self.sign is not None
            return self.model_copy(update={"sign": -self.sign})
        return self

    def __str__(self) -> str:
        if self.kind is BranchKind.PERTURBATIVE:
            return f"E_{self.n}^{'+' if self.sign == 1 else '-'}"
        if self.kind is BranchKind.LARGE_HBAR:
            return f"E_{self.n}"
        return "E_?"


class ComplexEnergy(BaseModel):
    """An eigenvalue candidate or converged level with its branch label."""

    model_config = ConfigDict(frozen=True)

    value: ComplexNumber
    branch: BranchLabel = Field(default_factory=BranchLabel)

    def conjugate(self) -> ComplexEnergy:
        """Conjugate level; E_n^+ and E_n^- swap."""
        return ComplexEnergy(value=self.value.conjugate(), branch=self.branch.conjugate())

    def relabel(self, branch: BranchLabel) -> ComplexEnergy:
        return ComplexEnergy(value=self.value, branch=branch)
