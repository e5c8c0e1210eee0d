"""Sweep plans, branches and bifurcation-diagram rows."""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.classification import C1Class, ExtremaSignature
from app.models.series import ExtremaKind


class SweepParameter(str, Enum):
    RHO = "rho"
    B = "b"
    A = "a"  # Sprott parameter of the ground-truth cascade


class WarmStartPolicy(str, Enum):
    PREVIOUS = "previous_attractor_point"
    FIXED = "fixed_state"


class SweepPlan(BaseModel):
    """One warm-started continuation in rho or b."""

    parameter: SweepParameter = SweepParameter.B
    start: float
    stop: float
    step: float = Field(..., description="Signed parameter increment")
    warm_start_policy: WarmStartPolicy = WarmStartPolicy.PREVIOUS
    t_settle: float = Field(default=70.0, ge=0.0, description="Discarded transient per step")
    t_measure: float = Field(default=130.0, gt=0.0, description="Measured window per step")
    coordinate_index: int = Field(default=2, ge=0)
    kind: ExtremaKind = ExtremaKind.MAXIMA
    jump_tolerance: float = Field(default=0.5, gt=0.0)
    band_tolerance: float = Field(default=2.0, gt=0.0)
    budget: float | None = Field(default=None, description="Per-step time budget (t_predict)")

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"parameter": "b", "start": 0.4, "stop": 0.42, "step": 0.002}},
    )

    @model_validator(mode="after")
    def check_direction(self) -> "SweepPlan":
        if self.step == 0:
            raise ValueError("step must be nonzero")
        if self.stop != self.start and math.copysign(1.0, self.stop - self.start) != math.copysign(
            1.0, self.step
        ):
            raise ValueError("step direction disagrees with start/stop")
        if self.budget is not None and self.t_settle + self.t_measure > self.budget:
            raise ValueError("t_settle + t_measure exceeds the per-step budget")
        return self

    @property
    def direction(self) -> int:
        return 1 if self.step > 0 else -1

    def values(self) -> list[float]:
        count = int(math.floor(abs(self.stop - self.start) / abs(self.step) + 1e-9)) + 1
        return [round(self.start + k * self.step, 12) for k in range(count)]


@dataclass(frozen=True, eq=False)
class BranchPoint:
    param: float
    signature: ExtremaSignature
    c1: C1Class
    period: int | None
    label: str
    values: tuple[float, ...]
    state: np.ndarray
    retried: bool = False


@dataclass(eq=False)
class Branch:
    """One attractor family tracked by warm starts."""

    branch_id: str
    origin: str
    direction: int
    points: list[BranchPoint] = field(default_factory=list)
    lost_at: float | None = None

    @property
    def alive(self) -> bool:
        return self.lost_at is None

    @property
    def params(self) -> list[float]:
        return [p.param for p in self.points]

    def param_range(self) -> tuple[float, float] | None:
        if not self.points:
            return None
        params = self.params
        return min(params), max(params)

    def covers(self, param: float, tol: float) -> bool:
        return any(abs(p - param) <= tol for p in self.params)

    def point_at(self, param: float, tol: float) -> BranchPoint | None:
        for point in self.points:
            if abs(point.param - param) <= tol:
                return point
        return None


class BifurcationRow(BaseModel):
    """One scatter point of a bifurcation diagram."""

    param: float
    value: float
    branch_id: str
    label: str
    kind: ExtremaKind
    coord: int


class GapOutcome(str, Enum):
    UA_COEXISTENCE = "ua_coexistence"
    BISTABILITY = "bistability"
    CONTINUOUS = "continuous_transition"


class OutcomeReport(BaseModel):
    """A gap-filling outcome and the parameter window it occupies."""

    outcome: GapOutcome
    lo: float | None = None
    hi: float | None = None
