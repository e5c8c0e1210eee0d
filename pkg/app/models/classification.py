"""Classification labels, reference fits, signatures and attractor records."""

import hashlib
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.models.series import ExtremaKind, Trajectory


class C1Class(str, Enum):
    FIXED_POINT = "fixed_point"
    LIMIT_CYCLE = "limit_cycle"
    APERIODIC = "aperiodic"


class LabelValue(str, Enum):
    GOOD = "GoodRecon"
    POOR = "PoorRecon"
    UA = "UA_preliminary"
    REVIEW = "NeedsManualReview"


class ClassLabel(BaseModel):
    """Outcome of the three-criterion output classifier."""

    value: LabelValue
    c1: C1Class
    c2: bool
    c3: bool
    max_c3_distance: float | None = Field(None, description="Largest maxima-to-line distance")

    model_config = ConfigDict(frozen=True)


class Box(BaseModel):
    """Closed axis-aligned box in the projected space."""

    lower: tuple[float, float, float] = (-22.0, -32.0, 0.0)
    upper: tuple[float, float, float] = (22.0, 32.0, 55.0)

    model_config = ConfigDict(frozen=True)

    def contains(self, states: np.ndarray) -> bool:
        states = np.atleast_2d(states)
        return bool(
            np.all(states >= np.asarray(self.lower)) and np.all(states <= np.asarray(self.upper))
        )


class WingLine(BaseModel):
    slope: float
    intercept: float

    model_config = ConfigDict(frozen=True)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.slope * x + self.intercept


class ReferenceFit(BaseModel):
    """Lines through the x3-maxima of each wing of the reference attractor."""

    negative_wing: WingLine
    positive_wing: WingLine
    box: Box = Field(default_factory=Box)
    alpha: float = Field(default=3.75, gt=0.0)

    model_config = ConfigDict(frozen=True)


class SignatureMode(str, Enum):
    POINT = "point"
    CYCLE = "cycle"
    BAND = "band"


@dataclass(frozen=True)
class ExtremaSignature:
    """Dedup and continuation key of one post-transient output.

    `support` holds the cluster centers of a cycle, the deciles of the
    extrema of a band, or the coordinate value of a fixed point.
    """

    coordinate_index: int
    kind: ExtremaKind
    mode: SignatureMode
    support: tuple[float, ...]
    centroid: tuple[float, ...]
    tolerance: float

    @property
    def n_clusters(self) -> int:
        return len(self.support) if self.mode is SignatureMode.CYCLE else 0

    def distance_to(self, other: "ExtremaSignature") -> float:
        """Symmetric Hausdorff distance between the two support sets."""
        a = np.asarray(self.support)
        b = np.asarray(other.support)
        if a.size == 0 or b.size == 0:
            return 0.0 if a.size == b.size else float("inf")
        gaps = np.abs(a[:, None] - b[None, :])
        return float(max(gaps.min(axis=1).max(), gaps.min(axis=0).max()))

    def centroid_distance(self, other: "ExtremaSignature") -> float:
        return float(np.max(np.abs(np.asarray(self.centroid) - np.asarray(other.centroid))))

    def digest(self) -> str:
        text = ",".join(f"{v:.2f}" for v in self.support)
        key = f"{self.mode.value}|{self.kind.value}|{self.coordinate_index}|{text}"
        return hashlib.sha1(key.encode("utf-8")).hexdigest()[:12]


class Scenario(IntEnum):
    """Attractor-set compositions of a trained closed loop."""

    GOOD_ONLY = 1
    POOR_ONLY = 2
    UA_ONLY = 3
    GOOD_WITH_UA = 4
    POOR_WITH_UA = 5


@dataclass(frozen=True, eq=False)
class ClassifiedOutput:
    """One closed-loop run from one initial state, after the transient."""

    ic_index: int
    c1: C1Class
    period: int | None
    signature: ExtremaSignature
    outputs: Trajectory
    final_state: np.ndarray
    label: ClassLabel | None = None


@dataclass(frozen=True, eq=False)
class AttractorRecord:
    """A distinct attractor found by basin sampling."""

    record_id: int
    representative: ClassifiedOutput
    count: int
    ic_indices: tuple[int, ...]

    @property
    def c1(self) -> C1Class:
        return self.representative.c1

    @property
    def label(self) -> ClassLabel | None:
        return self.representative.label

    @property
    def signature(self) -> ExtremaSignature:
        return self.representative.signature
