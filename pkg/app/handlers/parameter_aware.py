"""Parameter-aware training, reconstruction checks and b-sweeps (tasks ii and iii)."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from app.classification import (
    extrema_signature,
    post_transient,
    shape_label,
    signatures_match,
)
from app.continuation import (
    ORIGIN_GENERATED,
    ORIGIN_UNTRAINED,
    BranchRunner,
    ReservoirRunner,
    basin_sample,
    classify_gap_outcome,
    emit_bifurcation_data,
    sweep_branch,
    tag_successor_branches,
)
from app.handlers.common import (
    close_run,
    maybe_plot_branches,
    open_run,
    seeded_config,
    single_network_seeds,
)
from app.models.classification import ExtremaSignature
from app.models.config import RCConfig
from app.models.continuation import Branch, OutcomeReport, SweepPlan
from app.models.network import Network, Readout
from app.models.systems import SourceSystem
from app.models.task import TaskSpec
from app.reservoir import build_network, closed_loop_run, uniform_bias
from app.storage.csv_files import write_branches_csv, write_outcomes_csv, write_reconstruction_csv
from app.storage.serialization import WarmStart, save_model
from app.systems import generate_training_signal
from app.training import attractor_id, train_parameter_aware

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Reconstruction:
    attractor_id: str
    b: float
    expected: str
    observed: str
    signature: ExtremaSignature
    final_state: np.ndarray

    @property
    def ok(self) -> bool:
        return self.expected == self.observed


@dataclass(frozen=True, eq=False)
class ParameterAwareResult:
    reconstructions: list[Reconstruction]
    branches: list[Branch]
    outcomes: list[OutcomeReport]
    out_dir: Path


def check_reconstructions(
    net: Network,
    readout: Readout,
    config: RCConfig,
    systems: list[tuple[SourceSystem, float]],
    signals: list,
    warm_starts: list[np.ndarray],
    plan: SweepPlan,
) -> list[Reconstruction]:
    """Closed loop from each r(t_train) at its trained b, compared with the source shape."""
    reconstructions = []
    for (system, b), signal, r0 in zip(systems, signals, warm_starts, strict=True):
        run = closed_loop_run(
            net,
            readout,
            r0,
            uniform_bias(net.N, b),
            config,
            config.t_predict - config.t_train,
            t0=config.t_train,
            keep_states=False,
        )
        window = post_transient(run.outputs, config.t_trans)
        signature, _ = extrema_signature(window, plan.coordinate_index, plan.kind)
        expected, _ = extrema_signature(signal.trajectory, plan.coordinate_index, plan.kind)
        reconstruction = Reconstruction(
            attractor_id=attractor_id(system, b),
            b=b,
            expected=shape_label(expected),
            observed=shape_label(signature),
            signature=signature,
            final_state=run.final_state,
        )
        if not reconstruction.ok:
            logger.warning(
                f"Reconstruction of {reconstruction.attractor_id} failed: expected "
                f"{reconstruction.expected}, closed loop gives {reconstruction.observed}"
            )
        reconstructions.append(reconstruction)
    return reconstructions


def _directional_plans(template: SweepPlan, b: float) -> list[SweepPlan]:
    step = abs(template.step)
    lo, hi = min(template.start, template.stop), max(template.start, template.stop)
    plans = []
    if b <= hi:
        plans.append(template.model_copy(update={"start": b, "stop": hi, "step": step}))
    if b >= lo:
        plans.append(template.model_copy(update={"start": b, "stop": lo, "step": -step}))
    return plans


def sweep_from(
    runner: BranchRunner,
    template: SweepPlan,
    b: float,
    state: np.ndarray,
    origin: str,
    prefix: str,
) -> list[Branch]:
    branches = []
    for plan in _directional_plans(template, b):
        suffix = "+" if plan.step > 0 else "-"
        branches.extend(
            sweep_branch(runner, plan, state, origin=origin, branch_id=f"{prefix}{suffix}")
        )
    return branches


@dataclass(frozen=True, eq=False)
class SweepStart:
    b: float
    state: np.ndarray
    origin: str
    prefix: str


def sweep_starts(
    runner: BranchRunner, template: SweepPlan, starts: list[SweepStart], threads: int = 1
) -> list[Branch]:
    """Sweep every start on a local thread pool; branches come back in start order."""
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        batches = pool.map(
            lambda s: sweep_from(runner, template, s.b, s.state, s.origin, s.prefix), starts
        )
        return [branch for batch in batches for branch in batch]


def run_parameter_aware(
    spec: TaskSpec, systems: list[tuple[SourceSystem, float]], threads: int = 1
) -> ParameterAwareResult:
    """Train on every (system, b) pair, verify the trained attractors and sweep b.

    Sweeps from different starting states run on `threads` local threads.
    """
    out_dir, manifest = open_run(spec)
    config = seeded_config(spec)
    manifest.seeds = single_network_seeds(config)
    plan = spec.effective_sweep
    tol = abs(plan.step) / 2.0
    trained_b = [b for _, b in systems]

    signals = [
        generate_training_signal(system, config, seed=spec.base_seed) for system, _ in systems
    ]
    net = build_network(config)
    readout, warm_starts = train_parameter_aware(systems, config, net, signals=signals)
    outputs = [
        save_model(
            out_dir / "model.json",
            spec.task.value,
            config,
            net,
            readout,
            [
                WarmStart(
                    attractor_id=attractor_id(system, b),
                    bias_level=b,
                    state=r.tolist(),
                    source=system,
                )
                for (system, b), r in zip(systems, warm_starts, strict=True)
            ],
        )
    ]

    reconstructions = check_reconstructions(
        net, readout, config, systems, signals, warm_starts, plan
    )
    outputs.append(
        write_reconstruction_csv(
            out_dir / "reconstruction.csv",
            [
                {
                    "attractor_id": r.attractor_id,
                    "b": r.b,
                    "expected_period": r.expected,
                    "observed_period": r.observed,
                    "ok": r.ok,
                }
                for r in reconstructions
            ],
        )
    )

    runner = ReservoirRunner(net, readout, config)
    logger.info(f"Sweeping b from {len(reconstructions)} reconstructed attractors")
    branches = sweep_starts(
        runner,
        plan,
        [
            SweepStart(r.b, r.final_state, ORIGIN_GENERATED, f"A{k}")
            for k, r in enumerate(reconstructions)
        ],
        threads,
    )

    untrained: list[SweepStart] = []
    for k, reconstruction in enumerate(reconstructions):
        records = basin_sample(
            net,
            readout,
            uniform_bias(net.N, reconstruction.b),
            config,
            spec.ensemble.n_ic,
            config.seeds.ic_seed,
            coordinate_index=plan.coordinate_index,
            kind=plan.kind,
        )
        generated = [
            point
            for branch in branches
            if branch.origin == ORIGIN_GENERATED
            and (point := branch.point_at(reconstruction.b, tol)) is not None
        ]
        candidates = [
            record
            for record in records
            if not any(signatures_match(record.signature, p.signature) for p in generated)
        ]
        logger.info(
            f"b={reconstruction.b:+g}: {len(records)} attractors, "
            f"{len(candidates)} untrained candidates"
        )
        untrained.extend(
            SweepStart(
                reconstruction.b,
                record.representative.final_state,
                ORIGIN_UNTRAINED,
                f"U{k}.{record.record_id}",
            )
            for record in candidates
        )
    branches.extend(sweep_starts(runner, plan, untrained, threads))

    tag_successor_branches(branches, tol)
    rows = emit_bifurcation_data(
        branches, plan.coordinate_index, plan.kind, trained_params=trained_b, tol=tol
    )
    branches_csv = write_branches_csv(out_dir / "branches.csv", rows)
    outputs.append(branches_csv)
    outputs.extend(maybe_plot_branches(rows, branches_csv, xlabel="b"))

    outcomes = classify_gap_outcome(branches, trained_b, tol)
    outputs.append(write_outcomes_csv(out_dir / "outcomes.csv", outcomes))
    for report in outcomes:
        logger.info(f"Gap outcome {report.outcome.value} on [{report.lo}, {report.hi}]")

    close_run(out_dir, manifest, outputs)
    return ParameterAwareResult(reconstructions, branches, outcomes, out_dir)
