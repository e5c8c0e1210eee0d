"""model.json: a trained reservoir (network, readout, warm starts) as one JSON document."""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from app.exceptions import ConfigurationError
from app.models.config import RCConfig
from app.models.network import Network, Provenance, Readout, ReadoutSegment
from app.models.systems import SourceSystem

logger = logging.getLogger(__name__)


class WarmStart(BaseModel):
    """Reservoir state r(t_train) of one trained attractor."""

    attractor_id: str
    bias_level: float
    state: list[float]
    source: SourceSystem | None = Field(
        default=None, description="System the attractor was trained on; needed to retrain"
    )


class ModelDocument(BaseModel):
    """JSON floats round-trip exactly, so reloading is bit-exact."""

    task: str
    config: RCConfig
    M: list[list[float]]
    W_in: list[list[float]]
    M_unit: list[list[float]] | None = None
    rho_actual: float
    W_out: list[list[float]]
    provenance: Provenance
    segments: list[ReadoutSegment] = Field(default_factory=list)
    warm_starts: list[WarmStart] = Field(default_factory=list)


@dataclass(frozen=True, eq=False)
class SavedModel:
    task: str
    config: RCConfig
    network: Network
    readout: Readout
    warm_starts: list[WarmStart]


def save_model(
    path: Path,
    task: str,
    config: RCConfig,
    net: Network,
    readout: Readout,
    warm_starts: list[WarmStart],
) -> Path:
    """
    Write a trained reservoir to disk.

    Args:
        path: Destination file (usually <out>/model.json)
        task: Name of the task that trained the model
        config: Effective RC configuration, seeds included
        net: Network realisation
        readout: Trained readout
        warm_starts: r(t_train) per trained attractor

    Returns:
        Path: The written file
    """
    document = ModelDocument(
        task=task,
        config=config,
        M=net.M.tolist(),
        W_in=net.W_in.tolist(),
        M_unit=net.M_unit.tolist() if net.M_unit is not None else None,
        rho_actual=net.rho_actual,
        W_out=readout.W_out.tolist(),
        provenance=readout.provenance,
        segments=list(readout.segments),
        warm_starts=warm_starts,
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json())
    logger.info(f"Saved model to {path}")
    return path


def load_model(path: Path) -> SavedModel:
    path = Path(path)
    try:
        document = ModelDocument.model_validate_json(path.read_text())
    except FileNotFoundError as e:
        raise ConfigurationError(f"model file {path} does not exist") from e
    except ValidationError as e:
        raise ConfigurationError(f"model file {path} is invalid: {e}") from e

    network = Network(
        M=np.asarray(document.M, dtype=float),
        W_in=np.asarray(document.W_in, dtype=float),
        rho_actual=document.rho_actual,
        M_unit=np.asarray(document.M_unit, dtype=float) if document.M_unit is not None else None,
    )
    readout = Readout(
        W_out=np.asarray(document.W_out, dtype=float),
        provenance=document.provenance,
        segments=tuple(document.segments),
    )
    return SavedModel(
        task=document.task,
        config=document.config,
        network=network,
        readout=readout,
        warm_starts=document.warm_starts,
    )
