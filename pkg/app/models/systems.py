"""Ground-truth source system descriptors."""

from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.series import Trajectory


class SystemName(str, Enum):
    LORENZ = "lorenz"
    SPROTT = "sprott"
    HALVORSEN = "halvorsen"


class SourceSystem(BaseModel):
    """One of the three source systems, optionally translated in state space."""

    name: SystemName = Field(..., description="Source system")
    parameters: dict[str, float] = Field(default_factory=dict, description="Sprott uses 'a'")
    shift: tuple[float, float, float] = Field(
        default=(0.0, 0.0, 0.0), description="Vector added to the native state"
    )

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"name": "sprott", "parameters": {"a": 17.0}}},
    )

    @model_validator(mode="after")
    def check_parameters(self) -> "SourceSystem":
        if self.name is SystemName.SPROTT and "a" not in self.parameters:
            raise ValueError("sprott requires parameter 'a'")
        return self

    @property
    def dimension(self) -> int:
        return 3

    @property
    def label(self) -> str:
        if self.name is SystemName.SPROTT:
            return f"sprott(a={self.parameters['a']:g})"
        return self.name.value


@dataclass(frozen=True, eq=False)
class TrainingSignal:
    """Input signal u(t) sampled at spacing tau, starting on the attractor."""

    trajectory: Trajectory
    t_listen: float
    t_train: float
    t_predict: float
    source: SourceSystem
    seed: int = 0
