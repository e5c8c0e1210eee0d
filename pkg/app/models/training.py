"""Regression data assembled from open-loop drives."""

from dataclasses import dataclass

import numpy as np

from app.models.systems import TrainingSignal


@dataclass(frozen=True, eq=False)
class Drive:
    """Open-loop response r[.] to one training signal at one bias."""

    attractor_id: str
    states: np.ndarray
    signal: TrainingSignal
    bias: np.ndarray


@dataclass(frozen=True, eq=False)
class Segment:
    attractor_id: str
    start: int
    stop: int
    bias: np.ndarray


@dataclass(frozen=True, eq=False)
class RegressionData:
    """Response matrix X (2N x T), input matrix Y (D x T) and their segments."""

    X: np.ndarray
    Y: np.ndarray
    segments: tuple[Segment, ...]

    @property
    def n_columns(self) -> int:
        return self.X.shape[1]
