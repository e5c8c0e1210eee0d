"""Task (i): scenario frequencies over rho for an ensemble of Lorenz-trained reservoirs."""

import logging
from dataclasses import dataclass
from pathlib import Path

from app.classification import fit_reference
from app.config import settings
from app.continuation import (
    ORIGIN_GENERATED,
    ORIGIN_UNTRAINED,
    ReservoirRunner,
    basin_sample,
    emit_bifurcation_data,
    scenario_ensemble,
    sweep_branch,
    tag_successor_branches,
)
from app.handlers.common import close_run, maybe_plot_branches, open_run
from app.models.classification import LabelValue
from app.models.config import RCConfig, Seeds
from app.models.continuation import Branch, SweepParameter
from app.models.network import Network, Readout
from app.models.systems import SourceSystem, SystemName
from app.models.task import CellResult, TaskSpec, matrix_seeds
from app.reservoir import build_network
from app.storage.csv_files import (
    write_branches_csv,
    write_classification_csv,
    write_ensemble_csv,
    write_matrix_ranking_csv,
    write_scenario_map_csv,
)
from app.systems import generate_training_signal
from app.training import train_single
from app.workers.dispatch import dispatch_cells

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Task1Result:
    table: list[dict]
    cells: list[CellResult]
    fine_branches: list[Branch]
    out_dir: Path


def fine_rho_sweep(spec: TaskSpec, config: RCConfig) -> list[Branch]:
    """Continue every attractor found at rho_start in rho, retraining at each rho."""
    fine = spec.ensemble.fine_sweep
    seeds = matrix_seeds(spec.base_seed, fine.matrix_id)
    config = config.model_copy(
        update={
            "rho": fine.rho_start,
            "seeds": Seeds(
                network_seed=seeds.network_seed, input_seed=seeds.input_seed, ic_seed=seeds.ic_seed
            ),
        }
    )
    lorenz = SourceSystem(name=SystemName.LORENZ)
    signal = generate_training_signal(lorenz, config, seed=spec.base_seed)
    ref = fit_reference(signal.trajectory)
    net = build_network(config)
    readout, _ = train_single(lorenz, config, net, signal=signal)
    records = basin_sample(net, readout, None, config, spec.ensemble.n_ic, seeds.ic_seed, ref)

    def retrain(rho: float, rescaled: Network) -> Readout:
        at_rho = config.model_copy(update={"rho": rho})
        return train_single(lorenz, at_rho, rescaled, signal=signal)[0]

    runner = ReservoirRunner(net, readout, config, SweepParameter.RHO, readout_builder=retrain)
    step = fine.step if fine.rho_stop >= fine.rho_start else -fine.step
    plan = spec.effective_sweep.model_copy(
        update={
            "parameter": SweepParameter.RHO,
            "start": fine.rho_start,
            "stop": fine.rho_stop,
            "step": step,
        }
    )
    branches: list[Branch] = []
    for record in records:
        reconstructed = record.label.value in (LabelValue.GOOD, LabelValue.POOR)
        origin = ORIGIN_GENERATED if reconstructed else ORIGIN_UNTRAINED
        logger.info(
            f"Fine sweep of matrix {fine.matrix_id}: attractor {record.record_id} "
            f"({record.label.value.value}, {record.count} ICs) as {origin}"
        )
        branches.extend(
            sweep_branch(
                runner, plan, record.representative.final_state, origin, f"R{record.record_id}"
            )
        )
    tag_successor_branches(branches, fine.step / 2.0)
    return branches


def run_task1(spec: TaskSpec, threads: int = 1) -> Task1Result:
    """
    Run the scenario ensemble and write its tables.

    Args:
        spec: task1 specification
        threads: Local threads for eager cell execution

    Returns:
        Task1Result: Frequency table, every cell result and optional fine-sweep branches
    """
    out_dir, manifest = open_run(spec)
    config = spec.effective_rc
    ensemble = spec.ensemble
    manifest.seeds = [matrix_seeds(spec.base_seed, i) for i in range(ensemble.n_matrices)]

    table, cells = scenario_ensemble(
        config,
        ensemble.rho_grid,
        ensemble.n_matrices,
        spec.base_seed,
        ensemble.n_ic,
        map_cells=lambda batch: dispatch_cells(batch, threads),
    )
    manifest.failed_cells = [
        {"matrix_id": c.matrix_id, "rho": c.rho, "error": c.error} for c in cells if not c.ok
    ]

    outputs = [
        write_ensemble_csv(out_dir / "ensemble.csv", table),
        write_scenario_map_csv(out_dir / "scenario_map.csv", [c for c in cells if c.ok]),
        write_matrix_ranking_csv(out_dir / "matrix_ranking.csv", [c for c in cells if c.ok]),
        write_classification_csv(
            out_dir / "classification.csv", [row for c in cells for row in c.classifications]
        ),
    ]
    if settings.PLOTS_ENABLED:
        from app.plots import PlottingUnavailable, emit_ensemble_plot

        try:
            outputs.append(emit_ensemble_plot(table, out_dir / "ensemble.svg"))
        except PlottingUnavailable as e:
            logger.warning(f"Skipping ensemble plot: {e}")

    fine_branches: list[Branch] = []
    if ensemble.fine_sweep is not None:
        fine_branches = fine_rho_sweep(spec, config)
        rows = emit_bifurcation_data(
            fine_branches, spec.sweep.coordinate_index, spec.sweep.kind
        )
        fine_csv = write_branches_csv(out_dir / "fine_sweep.csv", rows)
        outputs.append(fine_csv)
        outputs.extend(maybe_plot_branches(rows, fine_csv, xlabel="rho"))

    close_run(out_dir, manifest, outputs)
    return Task1Result(table=table, cells=cells, fine_branches=fine_branches, out_dir=out_dir)
