"""Continue branches of a saved model from its warm-start states."""

import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np

from app.continuation import (
    ORIGIN_GENERATED,
    ReservoirRunner,
    emit_bifurcation_data,
    sweep_branch,
    tag_successor_branches,
)
from app.exceptions import ConfigurationError
from app.handlers.common import maybe_plot_branches
from app.handlers.parameter_aware import sweep_from
from app.models.continuation import Branch, SweepParameter, SweepPlan
from app.models.network import Network, Readout
from app.models.task import TASK_DEFAULTS, TaskName
from app.reservoir import uniform_bias
from app.storage.csv_files import write_branches_csv
from app.storage.serialization import SavedModel, load_model
from app.systems import generate_training_signal
from app.training import train_parameter_aware

logger = logging.getLogger(__name__)


def default_plan(task: str) -> SweepPlan:
    try:
        return SweepPlan.model_validate(TASK_DEFAULTS[TaskName(task)]["sweep"])
    except ValueError as e:
        raise ConfigurationError(
            f"model was trained by unknown task {task!r}; pass a sweep plan"
        ) from e


def rho_retrainer(saved: SavedModel) -> Callable[[float, Network], Readout] | None:
    """Parameter-aware retraining at each rho, or None when the model lacks its sources.

    Training signals are regenerated once from the saved config; readouts are cached per rho.
    """
    pairs = [(w.source, w.bias_level) for w in saved.warm_starts]
    if any(source is None for source, _ in pairs):
        logger.warning("model.json names no training systems; rho sweep keeps the saved readout")
        return None
    signals = [generate_training_signal(source, saved.config) for source, _ in pairs]
    cache: dict[float, Readout] = {}

    def retrain(rho: float, rescaled: Network) -> Readout:
        if rho not in cache:
            at_rho = saved.config.model_copy(update={"rho": rho})
            cache[rho] = train_parameter_aware(pairs, at_rho, rescaled, signals=signals)[0]
        return cache[rho]

    return retrain


def sweep_saved_model(
    model_path: Path, out_dir: Path, plan: SweepPlan | None = None
) -> list[Branch]:
    """
    Sweep b (both directions from every trained b) or rho (in plan order) from a model.json.

    Rho sweeps retrain the readout at every rho on the saved training systems, holding
    each warm start at its own trained b.

    Args:
        model_path: File written by a task2/task3 run
        out_dir: Directory receiving branches.csv
        plan: Sweep plan; defaults to the plan of the task that trained the model

    Returns:
        list[Branch]: Every branch produced, successors tagged
    """
    saved = load_model(model_path)
    plan = plan or default_plan(saved.task)
    if not saved.warm_starts:
        raise ConfigurationError(f"{model_path} holds no warm-start states")
    if plan.parameter is SweepParameter.A:
        raise ConfigurationError("saved reservoirs sweep rho or b")

    runner = ReservoirRunner(saved.network, saved.readout, saved.config, plan.parameter)
    retrain = rho_retrainer(saved) if plan.parameter is SweepParameter.RHO else None
    branches: list[Branch] = []
    for k, warm in enumerate(saved.warm_starts):
        state = np.asarray(warm.state, dtype=float)
        logger.info(f"Sweeping {plan.parameter.value} from {warm.attractor_id}")
        if plan.parameter is SweepParameter.B:
            branches.extend(
                sweep_from(runner, plan, warm.bias_level, state, ORIGIN_GENERATED, f"A{k}")
            )
        else:
            level = warm.bias_level
            at_level = ReservoirRunner(
                saved.network,
                saved.readout,
                saved.config,
                plan.parameter,
                bias_builder=lambda _, level=level: uniform_bias(saved.network.N, level),
                readout_builder=retrain,
            )
            branches.extend(sweep_branch(at_level, plan, state, ORIGIN_GENERATED, f"A{k}"))

    tol = abs(plan.step) / 2.0
    tag_successor_branches(branches, tol)
    trained = []
    if plan.parameter is SweepParameter.B:
        trained = [w.bias_level for w in saved.warm_starts]
    rows = emit_bifurcation_data(branches, plan.coordinate_index, plan.kind, trained, tol)
    out_dir = Path(out_dir)
    csv_path = write_branches_csv(out_dir / "branches.csv", rows)
    maybe_plot_branches(rows, csv_path, xlabel=plan.parameter.value)
    return branches
