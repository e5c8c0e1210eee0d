"""Sampled time series."""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class ExtremaKind(str, Enum):
    MAXIMA = "maxima"
    MINIMA = "minima"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled multivariate series, one row per sample."""

    states: np.ndarray
    tau: float
    t0: float = 0.0

    @property
    def n_samples(self) -> int:
        return self.states.shape[0]

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.tau * np.arange(self.n_samples)

    @property
    def duration(self) -> float:
        return self.tau * (self.n_samples - 1)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def coordinate(self, index: int) -> np.ndarray:
        return self.states[:, index]

    def after(self, t: float) -> "Trajectory":
        """Samples at times >= t."""
        start = max(0, int(np.ceil((t - self.t0) / self.tau - 1e-9)))
        return Trajectory(self.states[start:], self.tau, self.t0 + start * self.tau)

    def shifted(self, shift: np.ndarray) -> "Trajectory":
        return Trajectory(self.states + np.asarray(shift, dtype=float), self.tau, self.t0)

    def centroid(self) -> np.ndarray:
        return self.states.mean(axis=0)


@dataclass(frozen=True, eq=False)
class ExtremaSeries:
    """Strict local extrema of one coordinate, with a companion coordinate."""

    kind: ExtremaKind
    coordinate_index: int
    times: np.ndarray
    values: np.ndarray
    companion_values: np.ndarray

    def __len__(self) -> int:
        return len(self.times)
