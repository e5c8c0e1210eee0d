"""YAML task configs and run manifests."""

import logging
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import yaml

from app import classification, continuation, reservoir, systems
from app.exceptions import ConfigurationError
from app.models.task import CellSeeds, RunManifest, TaskName, TaskSpec

logger = logging.getLogger(__name__)

CONFIG_FILENAME = "config.yaml"
MANIFEST_FILENAME = "manifest.yaml"


def load_config_file(path: Path | None) -> dict[str, Any]:
    """Nested key/value overrides from a YAML task config; empty when no file is given."""
    if path is None:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigurationError(f"config file {path} does not exist") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"config file {path} is not valid YAML: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must hold a mapping at the top level")
    return data


def write_config_file(out_dir: Path, spec: TaskSpec) -> Path:
    path = Path(out_dir) / CONFIG_FILENAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(spec.model_dump(mode="json"), sort_keys=False))
    return path


def decisions(spec: TaskSpec) -> dict[str, Any]:
    """Every numerical choice in force for this run."""
    rc = spec.effective_rc
    entries: dict[str, Any] = {
        "tau": rc.tau,
        "connection_probability": rc.P,
        "drive_hold": "zero-order hold of u at the left sample of each RK4 step",
        "lorenz_first_equation": "10(x2 - x1); the printed 10(x2 + x1) is unbounded",
        "source_initial_states": {
            k.value: list(v) for k, v in systems.DEFAULT_INITIAL_STATES.items()
        },
        "source_transient": systems.TRANSIENT,
        "matrix_rebuild": (
            f"sub-seed [seed, attempt] while spectral radius is 0 (max {reservoir.MAX_REBUILDS})"
        ),
        "t_trans": rc.t_trans,
        "eps_fixed_point": classification.EPS_FIXED_POINT,
        "eps_periodic": classification.EPS_PERIODIC,
        "max_period": classification.MAX_PERIOD,
        "eps_cluster": classification.EPS_CLUSTER,
        "alpha": classification.ALPHA,
        "c3_distance": "vertical distance in the (x1, x3) plane",
        "min_wing_maxima": classification.MIN_WING_MAXIMA,
        "ic_distribution": "uniform on [-1, 1]^N",
        "seed_schedule": (
            "network_seed = base_seed + i; input_seed = base_seed; "
            "ic_seed = base_seed * 10**6 + j"
        ),
        "sweep": spec.effective_sweep.model_dump(mode="json"),
        "branch_loss": (
            f"Hausdorff jump > {spec.sweep.jump_tolerance} "
            f"({spec.sweep.band_tolerance} for bands) surviving one retry with doubled t_settle"
        ),
        "ua_confirmation": (
            "no branch seeded from a reconstructed attractor matches at that parameter"
        ),
        "signature_band_tolerance": classification.BAND_TOLERANCE,
        "branch_origins": [
            continuation.ORIGIN_RECONSTRUCTED,
            continuation.ORIGIN_GENERATED,
            continuation.ORIGIN_UNTRAINED,
        ],
        "long_transient": spec.long_transient,
    }
    if spec.task is TaskName.TASK3:
        entries["halvorsen_shift"] = list(systems.halvorsen_shift(rc.tau))
    return entries


def start_manifest(spec: TaskSpec, seeds: list[CellSeeds] | None = None) -> RunManifest:
    return RunManifest(
        task=spec.task.value,
        base_seed=spec.base_seed,
        config=spec.model_dump(mode="json"),
        seeds=seeds or [],
        decisions=decisions(spec),
        started_at=datetime.now(UTC),
    )


def write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    manifest.completed_at = datetime.now(UTC)
    path = Path(out_dir) / MANIFEST_FILENAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(manifest.model_dump(mode="json"), sort_keys=False))
    logger.info(f"Wrote manifest {path}")
    return path
