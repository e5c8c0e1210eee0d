"""Warm-started parameter sweeps, basin sampling and the scenario ensemble."""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Protocol

import numpy as np

from app.classification import (
    assign_scenario,
    classify_window,
    dedup_attractors,
    detect_c1_with_period,
    extrema_signature,
    fit_reference,
    post_transient,
    shape_label,
    signatures_match,
)
from app.exceptions import ReservoirError
from app.models.classification import AttractorRecord, ReferenceFit, Scenario, SignatureMode
from app.models.config import RCConfig, Seeds
from app.models.continuation import (
    BifurcationRow,
    Branch,
    BranchPoint,
    GapOutcome,
    OutcomeReport,
    SweepParameter,
    SweepPlan,
    WarmStartPolicy,
)
from app.models.network import Network, Readout
from app.models.series import ExtremaKind, Trajectory
from app.models.systems import SourceSystem, SystemName
from app.models.task import CellResult, EnsembleCell, ICClassification
from app.numerics import VectorField, integrate
from app.reservoir import build_network, closed_loop_run, rescale_network, uniform_bias
from app.systems import generate_training_signal, settled_state, sprott_rhs
from app.training import train_single

logger = logging.getLogger(__name__)

ORIGIN_RECONSTRUCTED = "reconstructed"
ORIGIN_GENERATED = "generated"
ORIGIN_UNTRAINED = "untrained"
ORIGIN_SUCCESSOR = "successor"


@dataclass(frozen=True, eq=False)
class RunnerResult:
    final_state: np.ndarray
    outputs: Trajectory


class BranchRunner(Protocol):
    """(parameter value, start state, duration) -> final state and projected outputs."""

    def __call__(self, param: float, state: np.ndarray, duration: float) -> RunnerResult: ...


class ReservoirRunner:
    """Closed-loop reservoir as a continuation runner in b or rho."""

    def __init__(
        self,
        net: Network,
        readout: Readout,
        config: RCConfig,
        parameter: SweepParameter = SweepParameter.B,
        bias_builder: Callable[[float], np.ndarray] | None = None,
        readout_builder: Callable[[float, Network], Readout] | None = None,
    ):
        """In rho sweeps, readout_builder retrains the readout for each rescaled network."""
        if parameter is SweepParameter.A:
            raise ValueError("the reservoir runner sweeps rho or b")
        self.net = net
        self.readout = readout
        self.config = config
        self.parameter = parameter
        self.bias_builder = bias_builder or (lambda b: uniform_bias(net.N, b))
        self.readout_builder = readout_builder
        self._cached: tuple[float, Network, Readout] | None = None

    def _at_rho(self, rho: float) -> tuple[Network, Readout]:
        if self._cached is None or self._cached[0] != rho:
            net = rescale_network(self.net, rho)
            readout = self.readout_builder(rho, net) if self.readout_builder else self.readout
            self._cached = (rho, net, readout)
        return self._cached[1], self._cached[2]

    def __call__(self, param: float, state: np.ndarray, duration: float) -> RunnerResult:
        if self.parameter is SweepParameter.B:
            net, readout, bias = self.net, self.readout, self.bias_builder(param)
        else:
            net, readout = self._at_rho(param)
            bias = self.bias_builder(self.config.b)
        run = closed_loop_run(net, readout, state, bias, self.config, duration, keep_states=False)
        return RunnerResult(run.final_state, run.outputs)


class VectorFieldRunner:
    """RK4 flow of a parameterised vector-field family; the state is the output."""

    def __init__(self, family: Callable[[float], VectorField], tau: float = 0.01):
        self.family = family
        self.tau = tau

    def __call__(self, param: float, state: np.ndarray, duration: float) -> RunnerResult:
        n_steps = max(1, int(round(duration / self.tau)))
        trajectory = integrate(self.family(param), state, self.tau, n_steps)
        return RunnerResult(trajectory.final.copy(), trajectory)


def _measure(
    runner: BranchRunner, plan: SweepPlan, param: float, state: np.ndarray, t_settle: float
) -> BranchPoint:
    if t_settle > 0:
        state = runner(param, state, t_settle).final_state
    result = runner(param, state, plan.t_measure)
    c1, _ = detect_c1_with_period(result.outputs)
    signature, values = extrema_signature(result.outputs, plan.coordinate_index, plan.kind, c1)
    return BranchPoint(
        param=param,
        signature=signature,
        c1=c1,
        period=signature.n_clusters if signature.mode is SignatureMode.CYCLE else None,
        label=shape_label(signature),
        values=values,
        state=result.final_state,
    )


def _continues(plan: SweepPlan, previous: BranchPoint, current: BranchPoint) -> bool:
    banded = SignatureMode.BAND in (previous.signature.mode, current.signature.mode)
    tolerance = plan.band_tolerance if banded else plan.jump_tolerance
    return signatures_match(previous.signature, current.signature, tolerance, same_family=False)


def sweep_branch(
    runner: BranchRunner,
    plan: SweepPlan,
    seed_state: np.ndarray,
    origin: str = ORIGIN_GENERATED,
    branch_id: str = "0",
) -> list[Branch]:
    """Track the attractor through `seed_state` across the plan's parameter values.

    A branch is lost when the signature jumps beyond tolerance and the jump
    survives one retry with doubled settling time; tracking then continues on
    whatever attractor was reached, as a new branch. The seeded branch comes first.
    """
    seed_state = np.asarray(seed_state, dtype=float)
    current = Branch(branch_id=branch_id, origin=origin, direction=plan.direction)
    branches = [current]
    state = seed_state
    previous: BranchPoint | None = None

    for param in plan.values():
        if plan.warm_start_policy is WarmStartPolicy.FIXED:
            state = seed_state
        point = _measure(runner, plan, param, state, plan.t_settle)
        if previous is not None and not _continues(plan, previous, point):
            retry = _measure(runner, plan, param, state, 2.0 * plan.t_settle)
            if _continues(plan, previous, retry):
                point = replace(retry, retried=True)
            else:
                current.lost_at = param
                logger.warning(
                    f"Branch {current.branch_id} lost at {plan.parameter.value}={param:g} "
                    f"({previous.label} -> {retry.label})"
                )
                current = Branch(
                    branch_id=f"{branch_id}.{len(branches)}",
                    origin=ORIGIN_SUCCESSOR,
                    direction=plan.direction,
                )
                branches.append(current)
                point = retry
        current.points.append(point)
        logger.debug(
            f"{plan.parameter.value}={param:g}: branch {current.branch_id} {point.label}"
        )
        previous = point
        state = point.state
    return branches


def tag_successor_branches(branches: Sequence[Branch], tol: float) -> None:
    """Successors that meet a generated family are generated, the rest untrained."""
    families = [b for b in branches if b.origin in (ORIGIN_GENERATED, ORIGIN_RECONSTRUCTED)]
    for branch in branches:
        if branch.origin != ORIGIN_SUCCESSOR:
            continue
        branch.origin = ORIGIN_UNTRAINED
        for point in branch.points:
            if any(
                (other := family.point_at(point.param, tol)) is not None
                and signatures_match(point.signature, other.signature, same_family=False)
                for family in families
            ):
                branch.origin = ORIGIN_GENERATED
                break


def basin_sample(
    net: Network,
    readout: Readout,
    bias: np.ndarray | None,
    config: RCConfig,
    n_ic: int,
    ic_seed: int,
    ref: ReferenceFit | None = None,
    coordinate_index: int = 2,
    kind: ExtremaKind = ExtremaKind.MAXIMA,
) -> list[AttractorRecord]:
    """Closed-loop runs from n_ic states uniform on [-1, 1]^N, classified and deduplicated."""
    if n_ic < 1:
        raise ValueError("n_ic must be >= 1")
    duration = config.t_predict - config.t_train
    outputs = []
    for j in range(n_ic):
        r0 = np.random.default_rng(ic_seed + j).uniform(-1.0, 1.0, size=net.N)
        run = closed_loop_run(
            net, readout, r0, bias, config, duration, t0=config.t_train, keep_states=False
        )
        window = post_transient(run.outputs, config.t_trans)
        outputs.append(
            classify_window(window, ref, coordinate_index, kind, j, run.final_state)
        )
    return dedup_attractors(outputs)


@lru_cache(maxsize=4)
def _lorenz_reference(config_json: str) -> tuple:
    config = RCConfig.model_validate_json(config_json)
    signal = generate_training_signal(SourceSystem(name=SystemName.LORENZ), config)
    return signal, fit_reference(signal.trajectory)


def run_ensemble_cell(cell: EnsembleCell) -> CellResult:
    """Build, train, basin-sample and assign a scenario for one (matrix, rho) cell."""
    seeds = cell.seeds()
    base = RCConfig.model_validate(cell.rc)
    config = base.model_copy(
        update={
            "rho": cell.rho,
            "seeds": Seeds(
                network_seed=seeds.network_seed,
                input_seed=seeds.input_seed,
                ic_seed=seeds.ic_seed,
            ),
        }
    )
    run_id = f"m{cell.matrix_id:03d}_rho{cell.rho:.3f}"
    try:
        signal, ref = _lorenz_reference(base.model_dump_json())
        net = build_network(config)
        readout, _ = train_single(signal.source, config, net, signal=signal)
        records = basin_sample(net, readout, None, config, cell.n_ic, seeds.ic_seed, ref)
        scenario = assign_scenario(records)
    except ReservoirError as e:
        logger.error(
            f"Ensemble cell {run_id} failed (seeds {seeds.model_dump()}): {e}", exc_info=True
        )
        return CellResult(matrix_id=cell.matrix_id, rho=cell.rho, error=str(e))

    rows = [
        ICClassification(
            run_id=run_id,
            ic_index=ic,
            label=record.label.value.value,
            c1=record.c1.value,
            c2=record.label.c2,
            c3=record.label.c3,
            max_c3_distance=record.label.max_c3_distance,
            signature_hash=record.signature.digest(),
        )
        for record in records
        for ic in record.ic_indices
    ]
    rows.sort(key=lambda row: row.ic_index)
    logger.info(f"Cell {run_id}: scenario {int(scenario)} with {len(records)} attractors")
    return CellResult(
        matrix_id=cell.matrix_id,
        rho=cell.rho,
        scenario=int(scenario),
        n_attractors=len(records),
        classifications=rows,
    )


def ensemble_cells(
    config: RCConfig, rho_grid: Sequence[float], n_matrices: int, base_seed: int, n_ic: int
) -> list[EnsembleCell]:
    rc = config.model_dump(mode="json", exclude={"seeds"})
    return [
        EnsembleCell(matrix_id=i, rho=float(rho), base_seed=base_seed, n_ic=n_ic, rc=rc)
        for i in range(n_matrices)
        for rho in rho_grid
    ]


def scenario_table(results: Sequence[CellResult], rho_grid: Sequence[float]) -> list[dict]:
    """Rows rho, scenario1..scenario5 counting matrices per scenario."""
    table = []
    for rho in rho_grid:
        counts = {f"scenario{s.value}": 0 for s in Scenario}
        for result in results:
            if result.ok and np.isclose(result.rho, rho):
                counts[f"scenario{result.scenario}"] += 1
        table.append({"rho": float(rho), **counts})
    return table


def scenario_ensemble(
    config: RCConfig,
    rho_grid: Sequence[float],
    n_matrices: int,
    base_seed: int,
    n_ic: int,
    map_cells: Callable[[list[EnsembleCell]], list[CellResult]] | None = None,
) -> tuple[list[dict], list[CellResult]]:
    """Scenario frequency table over rho plus every cell result, sorted by cell key."""
    cells = ensemble_cells(config, rho_grid, n_matrices, base_seed, n_ic)
    if map_cells is None:
        results = [run_ensemble_cell(cell) for cell in cells]
    else:
        results = map_cells(cells)
    results = sorted(results, key=lambda r: r.key)
    failed = [r for r in results if not r.ok]
    if failed:
        logger.warning(f"{len(failed)} of {len(results)} ensemble cells failed")
    return scenario_table(results, rho_grid), results


def emit_bifurcation_data(
    branches: Sequence[Branch],
    coordinate_index: int,
    kind: ExtremaKind,
    trained_params: Sequence[float] = (),
    tol: float = 1e-9,
) -> list[BifurcationRow]:
    """One row per extremum value per branch point; labels read origin:shape."""
    rows = []
    for branch in branches:
        for point in branch.points:
            origin = branch.origin
            at_trained = any(abs(point.param - p) <= tol for p in trained_params)
            if origin == ORIGIN_GENERATED and at_trained:
                origin = ORIGIN_RECONSTRUCTED
            rows.extend(
                BifurcationRow(
                    param=point.param,
                    value=value,
                    branch_id=branch.branch_id,
                    label=f"{origin}:{point.label}",
                    kind=kind,
                    coord=coordinate_index,
                )
                for value in point.values
            )
    return rows


def _gap_grid(branches: Sequence[Branch], lo: float, hi: float, tol: float) -> list[float]:
    """Distinct swept parameter values inside [lo, hi], merged within tol."""
    params = sorted(p for b in branches for p in b.params if lo - tol <= p <= hi + tol)
    grid: list[float] = []
    for p in params:
        if not grid or p - grid[-1] > tol:
            grid.append(p)
    return grid


def _windows(
    grid: Sequence[float], hits: Sequence[float], tol: float
) -> list[tuple[float, float]]:
    """Contiguous runs of grid values that carry a hit."""
    windows = []
    start = end = None
    for p in grid:
        if any(abs(p - h) <= tol for h in hits):
            start = p if start is None else start
            end = p
        elif start is not None:
            windows.append((start, end))
            start = None
    if start is not None:
        windows.append((start, end))
    return windows


def classify_gap_outcome(
    branches: Sequence[Branch], trained_params: Sequence[float], tol: float
) -> list[OutcomeReport]:
    """Which gap-filling outcomes the tracked branches show between the trained values.

    Bistability and UA coexistence are reported per contiguous window of
    swept values inside [min(trained), max(trained)].
    """
    lo, hi = min(trained_params), max(trained_params)
    families = [b for b in branches if b.origin in (ORIGIN_GENERATED, ORIGIN_RECONSTRUCTED)]
    grid = _gap_grid(branches, lo, hi, tol)
    reports = []

    if any(b.covers(lo, tol) and b.covers(hi, tol) for b in families):
        reports.append(OutcomeReport(outcome=GapOutcome.CONTINUOUS, lo=lo, hi=hi))

    overlap: list[float] = []
    for i, first in enumerate(families):
        for second in families[i + 1 :]:
            for point in first.points:
                if not lo - tol <= point.param <= hi + tol:
                    continue
                other = second.point_at(point.param, tol)
                if other is not None and not signatures_match(
                    point.signature, other.signature, same_family=False
                ):
                    overlap.append(point.param)
    reports.extend(
        OutcomeReport(outcome=GapOutcome.BISTABILITY, lo=start, hi=end)
        for start, end in _windows(grid, overlap, tol)
    )

    untrained = [p for b in branches if b.origin == ORIGIN_UNTRAINED for p in b.params]
    reports.extend(
        OutcomeReport(outcome=GapOutcome.UA_COEXISTENCE, lo=start, hi=end)
        for start, end in _windows(grid, untrained, tol)
    )
    return reports


def sprott_cascade(
    a_start: float = 27.0,
    a_stop: float = 17.0,
    step: float = -0.1,
    tau: float = 0.01,
    t_settle: float = 70.0,
    t_measure: float = 130.0,
) -> list[Branch]:
    """x2-minima continuation of the Sprott source system itself in a."""
    plan = SweepPlan(
        parameter=SweepParameter.A,
        start=a_start,
        stop=a_stop,
        step=step,
        t_settle=t_settle,
        t_measure=t_measure,
        coordinate_index=1,
        kind=ExtremaKind.MINIMA,
    )
    seed = settled_state(SourceSystem(name=SystemName.SPROTT, parameters={"a": a_start}), tau)
    runner = VectorFieldRunner(lambda a: VectorField(3, lambda x: sprott_rhs(x, a)), tau)
    return sweep_branch(runner, plan, seed, origin=ORIGIN_GENERATED, branch_id="sprott")
