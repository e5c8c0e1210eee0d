"""gen-data: ground-truth training signals and the Sprott cascade diagram."""

import logging
from pathlib import Path

from app.continuation import emit_bifurcation_data, sprott_cascade
from app.handlers.common import maybe_plot_branches
from app.models.config import RCConfig
from app.models.series import ExtremaKind
from app.models.systems import SourceSystem, SystemName
from app.storage.csv_files import write_branches_csv, write_trajectory_csv
from app.systems import generate_training_signal, shifted_halvorsen

logger = logging.getLogger(__name__)

SPROTT_TRAINING_A = (17.0, 27.0)


def source_systems(tau: float) -> list[SourceSystem]:
    return [
        SourceSystem(name=SystemName.LORENZ),
        *(SourceSystem(name=SystemName.SPROTT, parameters={"a": a}) for a in SPROTT_TRAINING_A),
        shifted_halvorsen(tau),
    ]


def _file_stem(system: SourceSystem) -> str:
    if system.name is SystemName.SPROTT:
        return f"sprott_a{system.parameters['a']:g}"
    return system.name.value


def generate_data(
    out_dir: Path, config: RCConfig | None = None, seed: int = 0, cascade: bool = False
) -> list[Path]:
    """
    Write signals/<system>.csv for every source system, plus the cascade diagram on request.

    Args:
        out_dir: Output directory
        config: Supplies tau and t_predict
        seed: Recorded in generation errors
        cascade: Also continue the Sprott system from a=27 down to a=17

    Returns:
        list[Path]: Written files
    """
    config = config or RCConfig()
    out_dir = Path(out_dir)
    written = []
    for system in source_systems(config.tau):
        signal = generate_training_signal(system, config, seed=seed)
        path = out_dir / "signals" / f"{_file_stem(system)}.csv"
        written.append(write_trajectory_csv(path, signal.trajectory))

    if cascade:
        logger.info("Continuing the Sprott system in a")
        branches = sprott_cascade(tau=config.tau)
        rows = emit_bifurcation_data(branches, coordinate_index=1, kind=ExtremaKind.MINIMA)
        csv_path = write_branches_csv(out_dir / "sprott_cascade.csv", rows)
        written.append(csv_path)
        written.extend(maybe_plot_branches(rows, csv_path, xlabel="a"))
    return written
