"""Task specifications and run manifests."""

from datetime import datetime
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.config import RCConfig
from app.models.continuation import SweepParameter, SweepPlan
from app.models.series import ExtremaKind

ARTIFACT_VERSION = "1.0.0"
LONG_TRANSIENT_T_PREDICT = 30000.0
LONG_TRANSIENT_T_SETTLE = 3000.0


class TaskName(str, Enum):
    TASK1 = "task1"
    TASK2 = "task2"
    TASK2_MULTI = "task2_multi"
    TASK3 = "task3"


class FineSweep(BaseModel):
    """Continuation in rho of every attractor found for one matrix at one rho."""

    matrix_id: int = Field(default=0, ge=0)
    rho_start: float = Field(..., ge=0.0)
    rho_stop: float = Field(..., ge=0.0)
    step: float = Field(default=0.005, gt=0.0, description="Unsigned rho increment")


class EnsembleSpec(BaseModel):
    """Ensemble sizes and the rho grid of task (i)."""

    n_matrices: int = Field(default=50, ge=1, description="Random realisations of M")
    n_ic: int = Field(default=100, ge=1, description="Random initial states per cell")
    rho_grid: list[float] = Field(
        default_factory=lambda: [round(0.05 * k, 2) for k in range(31)],
        description="Spectral radii of the scenario table",
    )
    fine_sweep: FineSweep | None = None

    model_config = ConfigDict(
        json_schema_extra={"example": {"n_matrices": 10, "n_ic": 30, "rho_grid": [0.0, 0.15, 0.5, 1.0]}}
    )


def sprott_a_for_bias(b: float) -> float:
    """Sprott parameter assigned to a bias level in the multi-attractor variants."""
    return round(22.0 - 25.0 * b, 10)


def _default_sweep(coordinate_index: int) -> dict[str, Any]:
    return {
        "parameter": SweepParameter.B,
        "start": -0.42,
        "stop": 0.42,
        "step": 0.002,
        "coordinate_index": coordinate_index,
        "kind": ExtremaKind.MINIMA,
    }


TASK_DEFAULTS: dict[TaskName, dict[str, Any]] = {
    TaskName.TASK1: {
        "rc": {"sigma": 0.2, "beta": 0.001, "gamma": 10.0, "t_listen": 100.0, "t_train": 200.0, "t_predict": 300.0},
        "sweep": {
            "parameter": SweepParameter.RHO,
            "start": 0.0,
            "stop": 1.5,
            "step": 0.005,
            "coordinate_index": 2,
            "kind": ExtremaKind.MAXIMA,
        },
    },
    TaskName.TASK2: {
        "rc": {"rho": 1.2, "sigma": 1.6, "beta": 0.01, "t_listen": 100.0, "t_train": 300.0, "t_predict": 500.0},
        "training_b": [0.4, -0.4],
        "a_values": [17.0, 27.0],
        "ensemble": {"n_matrices": 1, "n_ic": 30},
        "sweep": _default_sweep(1),
    },
    TaskName.TASK2_MULTI: {
        "rc": {"rho": 1.4, "sigma": 1.3, "beta": 0.01, "t_listen": 100.0, "t_train": 300.0, "t_predict": 500.0},
        "training_b": [0.2, 0.0, -0.2],
        "ensemble": {"n_matrices": 1, "n_ic": 30},
        "sweep": _default_sweep(1),
    },
    TaskName.TASK3: {
        "rc": {"rho": 1.2, "sigma": 0.2, "beta": 0.1, "t_listen": 100.0, "t_train": 300.0, "t_predict": 500.0},
        "training_b": [0.3, -0.3],
        "ensemble": {"n_matrices": 1, "n_ic": 30},
        "sweep": _default_sweep(0),
    },
}

# Five-attractor variant of task2_multi uses its own hyperparameters.
FIVE_ATTRACTOR_RC: dict[str, Any] = {"rho": 1.3, "sigma": 1.0, "beta": 0.1}


def _merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class TaskSpec(BaseModel):
    """Everything needed to run one task, with per-task defaults filled in."""

    task: TaskName
    base_seed: int = Field(default=0, ge=0)
    out_dir: str = Field(default="outputs")
    rc: RCConfig = Field(default_factory=RCConfig)
    ensemble: EnsembleSpec = Field(default_factory=EnsembleSpec)
    training_b: list[float] = Field(default_factory=list, description="Bias level per attractor")
    a_values: list[float] = Field(default_factory=list, description="Sprott a per attractor")
    sweep: SweepPlan
    long_transient: bool = False

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "task": "task2",
                "base_seed": 7,
                "training_b": [0.4, -0.4],
                "a_values": [17.0, 27.0],
            }
        }
    )

    @classmethod
    def build(cls, task: TaskName, overrides: dict[str, Any] | None = None) -> "TaskSpec":
        """Layer `overrides` (config file + CLI flags) over the task defaults."""
        overrides = dict(overrides or {})
        defaults = dict(TASK_DEFAULTS[task])
        b_list = overrides.get("training_b")
        if task is TaskName.TASK2_MULTI and b_list is not None and len(b_list) == 5:
            defaults["rc"] = _merge(defaults["rc"], FIVE_ATTRACTOR_RC)
        data = _merge(defaults, overrides)
        data["task"] = task
        return cls.model_validate(data)

    @model_validator(mode="after")
    def check_attractors(self) -> "TaskSpec":
        if self.task is TaskName.TASK1:
            if not self.ensemble.rho_grid:
                raise ValueError("task1 requires a nonempty rho grid")
            return self
        if not self.training_b:
            raise ValueError(f"{self.task.value} requires a nonempty training_b list")
        if len(set(self.training_b)) != len(self.training_b):
            raise ValueError("training_b values must be distinct")
        if self.task is TaskName.TASK2_MULTI and not self.a_values:
            self.a_values = [sprott_a_for_bias(b) for b in self.training_b]
        if self.task in (TaskName.TASK2, TaskName.TASK2_MULTI) and len(self.a_values) != len(
            self.training_b
        ):
            raise ValueError("a_values and training_b must have the same length")
        if self.task is TaskName.TASK3 and len(self.training_b) != 2:
            raise ValueError("task3 trains exactly two attractors (lorenz at +b, halvorsen at -b)")
        return self

    @property
    def effective_rc(self) -> RCConfig:
        """RC config with the long-transient override applied."""
        if not self.long_transient:
            return self.rc
        return self.rc.model_copy(update={"t_predict": LONG_TRANSIENT_T_PREDICT})

    @property
    def effective_sweep(self) -> SweepPlan:
        if not self.long_transient:
            return self.sweep
        return self.sweep.model_copy(update={"t_settle": LONG_TRANSIENT_T_SETTLE, "budget": None})

    @property
    def b_magnitude(self) -> float:
        return max((abs(b) for b in self.training_b), default=0.0)


class CellSeeds(BaseModel):
    """Seeds used by one ensemble cell."""

    matrix_id: int
    network_seed: int
    input_seed: int
    ic_seed: int


def matrix_seeds(base_seed: int, matrix_id: int) -> CellSeeds:
    """Matrix i uses base_seed + i; W_in and the initial states are shared by the ensemble."""
    return CellSeeds(
        matrix_id=matrix_id,
        network_seed=base_seed + matrix_id,
        input_seed=base_seed,
        ic_seed=base_seed * 10**6,
    )


class EnsembleCell(BaseModel):
    """One (matrix, rho) cell of the scenario ensemble, JSON-safe for task queues."""

    matrix_id: int = Field(..., ge=0)
    rho: float = Field(..., ge=0.0)
    base_seed: int = Field(..., ge=0)
    n_ic: int = Field(..., ge=1)
    rc: dict[str, Any] = Field(default_factory=dict, description="RCConfig echo")

    @property
    def key(self) -> tuple[int, float]:
        return (self.matrix_id, self.rho)

    def seeds(self) -> CellSeeds:
        return matrix_seeds(self.base_seed, self.matrix_id)


class ICClassification(BaseModel):
    """One row of a classification report."""

    run_id: str
    ic_index: int
    label: str
    c1: str
    c2: bool
    c3: bool
    max_c3_distance: float | None = None
    signature_hash: str


class CellResult(BaseModel):
    """Outcome of one ensemble cell; failed cells carry the error instead of a scenario."""

    matrix_id: int
    rho: float
    scenario: int | None = None
    n_attractors: int = 0
    classifications: list[ICClassification] = Field(default_factory=list)
    error: str | None = None

    @property
    def key(self) -> tuple[int, float]:
        return (self.matrix_id, self.rho)

    @property
    def ok(self) -> bool:
        return self.error is None


class RunManifest(BaseModel):
    """Reproduction record written next to every output directory."""

    artifact_version: str = ARTIFACT_VERSION
    task: str
    base_seed: int
    config: dict[str, Any] = Field(..., description="Effective task spec echo")
    seeds: list[CellSeeds] = Field(default_factory=list)
    decisions: dict[str, Any] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list)
    failed_cells: list[dict[str, Any]] = Field(default_factory=list)
    started_at: datetime
    completed_at: datetime | None = None
