"""Shared run plumbing: spec building, output directories, manifests and plots."""

import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from app.config import settings
from app.exceptions import ConfigurationError
from app.models.config import RCConfig, Seeds
from app.models.continuation import BifurcationRow
from app.models.task import CellSeeds, RunManifest, TaskName, TaskSpec
from app.storage.manifest import load_config_file, start_manifest, write_config_file, write_manifest

logger = logging.getLogger(__name__)


def build_spec(
    task: TaskName,
    config_path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> TaskSpec:
    """Task defaults, then the YAML file, then CLI flags."""
    data = load_config_file(config_path)
    data.pop("task", None)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    try:
        return TaskSpec.build(task, data)
    except ValidationError as e:
        raise ConfigurationError(f"invalid {task.value} configuration: {e}") from e


def seeded_config(spec: TaskSpec) -> RCConfig:
    """Effective RC config carrying the single-network seed schedule of base_seed."""
    seeds = Seeds(
        network_seed=spec.base_seed,
        input_seed=spec.base_seed,
        ic_seed=spec.base_seed * 10**6,
    )
    return spec.effective_rc.model_copy(update={"seeds": seeds, "b": spec.b_magnitude})


def single_network_seeds(config: RCConfig) -> list[CellSeeds]:
    """Manifest seed record for runs built on one reservoir realisation."""
    return [CellSeeds(matrix_id=0, **config.seeds.model_dump())]


def open_run(spec: TaskSpec) -> tuple[Path, RunManifest]:
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_config_file(out_dir, spec)
    logger.info(f"Starting {spec.task.value} (base_seed={spec.base_seed}) into {out_dir}")
    return out_dir, start_manifest(spec)


def close_run(out_dir: Path, manifest: RunManifest, outputs: list[Path]) -> Path:
    manifest.outputs = sorted(str(p.relative_to(out_dir)) for p in outputs)
    path = write_manifest(out_dir, manifest)
    logger.info(f"Finished {manifest.task}: {len(outputs)} artifacts")
    return path


def maybe_plot_branches(rows: list[BifurcationRow], csv_path: Path, xlabel: str) -> list[Path]:
    """Scatter plot next to the CSV when plotting is enabled and available."""
    if not settings.PLOTS_ENABLED:
        return []
    from app.plots import PlottingUnavailable, emit_branch_plot

    try:
        return [emit_branch_plot(rows, csv_path.with_suffix(".svg"), xlabel=xlabel)]
    except PlottingUnavailable as e:
        logger.warning(f"Skipping plot for {csv_path.name}: {e}")
        return []
