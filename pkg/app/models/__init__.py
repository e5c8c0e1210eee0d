"""Domain models: pydantic configs and immutable numerical records."""

from app.models.classification import (
    AttractorRecord,
    Box,
    C1Class,
    ClassifiedOutput,
    ClassLabel,
    ExtremaSignature,
    LabelValue,
    ReferenceFit,
    Scenario,
    SignatureMode,
    WingLine,
)
from app.models.config import RCConfig, Seeds
from app.models.continuation import (
    BifurcationRow,
    Branch,
    BranchPoint,
    GapOutcome,
    OutcomeReport,
    SweepParameter,
    SweepPlan,
    WarmStartPolicy,
)
from app.models.network import Network, Provenance, Readout, ReadoutSegment
from app.models.series import ExtremaKind, ExtremaSeries, Trajectory
from app.models.systems import SourceSystem, SystemName, TrainingSignal
from app.models.task import (
    CellResult,
    CellSeeds,
    EnsembleCell,
    EnsembleSpec,
    FineSweep,
    ICClassification,
    RunManifest,
    TaskName,
    TaskSpec,
)
from app.models.training import Drive, RegressionData, Segment

__all__ = [
    "AttractorRecord",
    "BifurcationRow",
    "Box",
    "Branch",
    "BranchPoint",
    "C1Class",
    "CellResult",
    "CellSeeds",
    "ClassLabel",
    "ClassifiedOutput",
    "Drive",
    "EnsembleCell",
    "EnsembleSpec",
    "ExtremaKind",
    "ExtremaSeries",
    "ExtremaSignature",
    "FineSweep",
    "GapOutcome",
    "ICClassification",
    "LabelValue",
    "Network",
    "OutcomeReport",
    "Provenance",
    "RCConfig",
    "Readout",
    "ReadoutSegment",
    "ReferenceFit",
    "RegressionData",
    "RunManifest",
    "Scenario",
    "Seeds",
    "Segment",
    "SignatureMode",
    "SourceSystem",
    "SweepParameter",
    "SweepPlan",
    "SystemName",
    "TaskName",
    "TaskSpec",
    "TrainingSignal",
    "Trajectory",
    "WarmStartPolicy",
    "WingLine",
]
