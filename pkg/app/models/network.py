"""Reservoir realisation and trained readout."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict


@dataclass(frozen=True, eq=False)
class Network:
    """Internal matrix M and input matrix W_in of one realisation.

    `M_unit` keeps the sampled matrix rescaled to radius 1 so the same
    realisation can be moved to any other spectral radius.
    """

    M: np.ndarray
    W_in: np.ndarray
    rho_actual: float
    M_unit: np.ndarray | None = None

    @property
    def N(self) -> int:
        return self.M.shape[0]

    @property
    def D(self) -> int:
        return self.W_in.shape[1]


class Provenance(str, Enum):
    SINGLE = "single"
    PARAMETER_AWARE = "parameter_aware"


class ReadoutSegment(BaseModel):
    """Training segment metadata carried by a readout."""

    attractor_id: str
    bias_level: float

    model_config = ConfigDict(frozen=True)


@dataclass(frozen=True, eq=False)
class Readout:
    """Output matrix W_out (D x 2N) acting on q(r) = (r; r^2)."""

    W_out: np.ndarray
    provenance: Provenance = Provenance.SINGLE
    segments: tuple[ReadoutSegment, ...] = field(default_factory=tuple)

    @property
    def linear(self) -> np.ndarray:
        return self.W_out[:, : self.W_out.shape[1] // 2]

    @property
    def square(self) -> np.ndarray:
        return self.W_out[:, self.W_out.shape[1] // 2 :]
