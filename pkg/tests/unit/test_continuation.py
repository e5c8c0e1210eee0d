import numpy as np
import pytest

from app.continuation import (
    ORIGIN_GENERATED,
    ORIGIN_SUCCESSOR,
    ORIGIN_UNTRAINED,
    ReservoirRunner,
    VectorFieldRunner,
    basin_sample,
    classify_gap_outcome,
    emit_bifurcation_data,
    ensemble_cells,
    scenario_ensemble,
    scenario_table,
    sweep_branch,
    tag_successor_branches,
)
from app.handlers.parameter_aware import SweepStart, sweep_starts
from app.models.classification import C1Class
from app.models.continuation import GapOutcome, SweepParameter, SweepPlan, WarmStartPolicy
from app.models.network import Readout
from app.models.series import ExtremaKind
from app.models.systems import SourceSystem, SystemName
from app.models.task import CellResult
from app.reservoir import build_network
from app.training import train_single
from tests.factories.branches import branch, decay, fold
from tests.factories.configs import small_config

LORENZ = SourceSystem(name=SystemName.LORENZ)


def fold_plan(start: float, stop: float) -> SweepPlan:
    return SweepPlan(
        parameter=SweepParameter.B,
        start=start,
        stop=stop,
        step=0.04 if stop > start else -0.04,
        t_settle=20.0,
        t_measure=40.0,
        coordinate_index=0,
        kind=ExtremaKind.MAXIMA,
    )


@pytest.fixture(scope="module")
def fold_branches():
    runner = VectorFieldRunner(fold, tau=0.05)
    forward = sweep_branch(runner, fold_plan(-0.8, 0.8), np.array([-1.3]), branch_id="up")
    backward = sweep_branch(runner, fold_plan(0.8, -0.8), np.array([1.3]), branch_id="down")
    return forward, backward


class TestSweepBranch:
    def test_parameter_independent_field_gives_one_branch(self):
        plan = fold_plan(0.0, 0.4)
        branches = sweep_branch(VectorFieldRunner(decay, tau=0.05), plan, np.array([1.0]))
        assert len(branches) == 1
        only = branches[0]
        assert only.alive
        assert only.params == pytest.approx(plan.values())
        assert {p.label for p in only.points} == {"fixed_point"}

    def test_fold_loses_lower_branch(self, fold_branches):
        forward, _ = fold_branches
        lower, upper = forward[0], forward[1]
        assert lower.lost_at == pytest.approx(0.40, abs=0.05)
        assert max(lower.params) < lower.lost_at
        assert upper.branch_id == "up.1"
        assert upper.points[0].values[0] > 1.0

    def test_fold_loses_upper_branch_backwards(self, fold_branches):
        _, backward = fold_branches
        assert backward[0].lost_at == pytest.approx(-0.40, abs=0.05)
        assert backward[0].direction == -1

    def test_successor_fills_the_lost_range(self, fold_branches):
        forward, _ = fold_branches
        covered = [p for b in forward for p in b.params]
        assert covered == pytest.approx(fold_plan(-0.8, 0.8).values())
        lower, upper = forward[0], forward[1]
        assert upper.params[0] == pytest.approx(lower.lost_at)
        assert all(np.all(np.isfinite(p.values)) for b in forward for p in b.points)

    def test_lost_reservoir_branches_have_bounded_successors(self):
        config = small_config(rho=1.2)
        net = build_network(config)
        rng = np.random.default_rng(5)
        readout = Readout(W_out=3.0 * rng.normal(size=(3, 2 * config.N)))
        plan = SweepPlan(
            parameter=SweepParameter.B,
            start=-1.0,
            stop=1.0,
            step=0.25,
            t_settle=5.0,
            t_measure=30.0,
            coordinate_index=0,
            kind=ExtremaKind.MAXIMA,
        )
        runner = ReservoirRunner(net, readout, config)
        branches = sweep_branch(runner, plan, rng.uniform(-1.0, 1.0, config.N))
        for lost, successor in zip(branches, branches[1:], strict=False):
            assert lost.lost_at is not None
            assert successor.params[0] == pytest.approx(lost.lost_at)
        assert branches[-1].alive
        for b in branches:
            for point in b.points:
                assert np.all(np.abs(point.state) <= 1.0 + 1e-9)
                assert np.all(np.isfinite(point.values))

    def test_fixed_warm_start_policy(self):
        plan = fold_plan(-0.2, 0.2).model_copy(
            update={"warm_start_policy": WarmStartPolicy.FIXED}
        )
        branches = sweep_branch(VectorFieldRunner(fold, tau=0.05), plan, np.array([1.0]))
        assert all(p.values[0] > 0.5 for b in branches for p in b.points)


class TestGapOutcomes:
    def test_fold_is_bistable(self, fold_branches):
        forward, backward = fold_branches
        branches = [*forward, *backward]
        tag_successor_branches(branches, 0.01)
        assert {b.origin for b in branches} == {ORIGIN_GENERATED}
        reports = classify_gap_outcome(branches, [-0.8, 0.8], 0.01)
        outcomes = {r.outcome: r for r in reports}
        assert set(outcomes) == {GapOutcome.BISTABILITY}
        assert outcomes[GapOutcome.BISTABILITY].lo == pytest.approx(-0.36, abs=0.05)
        assert outcomes[GapOutcome.BISTABILITY].hi == pytest.approx(0.36, abs=0.05)

    def test_continuous_transition(self):
        family = branch("A0+", ORIGIN_GENERATED, [(-0.2, 1.0), (0.0, 1.1), (0.2, 1.2)])
        reports = classify_gap_outcome([family], [-0.2, 0.2], 0.01)
        assert [r.outcome for r in reports] == [GapOutcome.CONTINUOUS]

    def test_untrained_range(self):
        family = branch("A0+", ORIGIN_GENERATED, [(0.2, 1.0)])
        stray = branch("U0.1+", ORIGIN_UNTRAINED, [(-0.1, 5.0), (0.0, 5.0), (0.1, 5.0)])
        reports = classify_gap_outcome([family, stray], [-0.2, 0.2], 0.01)
        untrained = [r for r in reports if r.outcome is GapOutcome.UA_COEXISTENCE]
        assert len(untrained) == 1
        assert (untrained[0].lo, untrained[0].hi) == (-0.1, 0.1)

    def test_untrained_range_is_clipped_to_gap(self):
        family = branch("A0+", ORIGIN_GENERATED, [(0.2, 1.0)])
        stray = branch("U0.1+", ORIGIN_UNTRAINED, [(-0.1, 5.0), (0.0, 5.0), (0.3, 5.0)])
        reports = classify_gap_outcome([family, stray], [-0.2, 0.2], 0.01)
        assert [(r.outcome, r.lo, r.hi) for r in reports] == [
            (GapOutcome.UA_COEXISTENCE, -0.1, 0.0)
        ]

    def test_overlap_beyond_trained_values_is_not_bistability(self):
        first = branch("A0+", ORIGIN_GENERATED, [(-0.2, 1.0), (0.0, 1.0), (0.2, 1.0), (0.5, 1.0)])
        second = branch("A1+", ORIGIN_GENERATED, [(0.2, 1.0), (0.5, 9.0)])
        reports = classify_gap_outcome([first, second], [-0.2, 0.2], 0.01)
        assert [(r.outcome, r.lo, r.hi) for r in reports] == [(GapOutcome.CONTINUOUS, -0.2, 0.2)]

    def test_disjoint_overlaps_are_separate_windows(self):
        first = branch("A0+", ORIGIN_GENERATED, [(-0.2, 1.0), (0.0, 1.0), (0.2, 1.0)])
        second = branch("A1-", ORIGIN_GENERATED, [(-0.2, 5.0), (0.0, 1.0), (0.2, 5.0)])
        reports = classify_gap_outcome([first, second], [-0.2, 0.2], 0.01)
        windows = [(r.lo, r.hi) for r in reports if r.outcome is GapOutcome.BISTABILITY]
        assert windows == [(-0.2, -0.2), (0.2, 0.2)]


class TestSuccessorTags:
    def test_successor_meeting_a_family_is_generated(self):
        family = branch("A0+", ORIGIN_GENERATED, [(0.5, 1.0), (0.6, 1.0)])
        joined = branch("A1+.1", ORIGIN_SUCCESSOR, [(0.6, 1.1)])
        stray = branch("A1+.2", ORIGIN_SUCCESSOR, [(0.6, 6.0)])
        tag_successor_branches([family, joined, stray], 0.01)
        assert joined.origin == ORIGIN_GENERATED
        assert stray.origin == ORIGIN_UNTRAINED
        assert family.origin == ORIGIN_GENERATED


class TestBifurcationRows:
    def test_labels_and_trained_points(self):
        family = branch("A0+", ORIGIN_GENERATED, [(0.3, 1.0), (0.32, 1.5)])
        stray = branch("U0.0+", ORIGIN_UNTRAINED, [(0.3, 4.0)])
        rows = emit_bifurcation_data([family, stray], 0, ExtremaKind.MAXIMA, [0.3], tol=0.001)
        labels = {(r.branch_id, r.param): r.label for r in rows}
        assert labels[("A0+", 0.3)] == "reconstructed:fixed_point"
        assert labels[("A0+", 0.32)] == "generated:fixed_point"
        assert labels[("U0.0+", 0.3)] == "untrained:fixed_point"
        assert all(r.coord == 0 and r.kind is ExtremaKind.MAXIMA for r in rows)


class TestReservoirRunner:
    def test_rejects_sprott_parameter(self):
        config = small_config()
        net = build_network(config)
        readout = Readout(W_out=np.zeros((3, 2 * config.N)))
        with pytest.raises(ValueError):
            ReservoirRunner(net, readout, config, SweepParameter.A)

    def test_rho_runner_rescales_and_retrains(self):
        config = small_config()
        net = build_network(config)
        readout = Readout(W_out=np.zeros((3, 2 * config.N)))
        seen = []

        def builder(rho, rescaled):
            seen.append((rho, rescaled.rho_actual))
            return readout

        runner = ReservoirRunner(net, readout, config, SweepParameter.RHO, readout_builder=builder)
        runner(0.9, np.zeros(config.N), 0.5)
        runner(0.9, np.zeros(config.N), 0.5)
        assert len(seen) == 1
        assert seen[0][1] == pytest.approx(0.9)


class TestEnsembleTable:
    def test_cells_cover_grid(self):
        cells = ensemble_cells(small_config(), [0.0, 0.5], 3, 7, 4)
        assert len(cells) == 6
        assert cells[4].key == (2, 0.0)
        assert cells[4].seeds().network_seed == 9
        assert "seeds" not in cells[0].rc

    def test_counts_per_scenario(self):
        results = [
            CellResult(matrix_id=0, rho=0.0, scenario=1),
            CellResult(matrix_id=1, rho=0.0, scenario=3),
            CellResult(matrix_id=2, rho=0.0, error="diverged"),
            CellResult(matrix_id=0, rho=0.5, scenario=3),
        ]
        table = scenario_table(results, [0.0, 0.5])
        assert table[0] == {
            "rho": 0.0,
            "scenario1": 1,
            "scenario2": 0,
            "scenario3": 1,
            "scenario4": 0,
            "scenario5": 0,
        }
        assert table[1]["scenario3"] == 1


@pytest.fixture(scope="module")
def basin_config():
    return small_config(t_predict=45.0)


@pytest.fixture(scope="module")
def trained(basin_config):
    net = build_network(basin_config)
    readout, _ = train_single(LORENZ, basin_config, net)
    return net, readout


class TestBasinSample:
    def test_silent_readout_has_one_fixed_point(self, basin_config):
        net = build_network(basin_config)
        readout = Readout(W_out=np.zeros((3, 2 * basin_config.N)))
        records = basin_sample(net, readout, None, basin_config, 6, ic_seed=11)
        assert len(records) == 1
        assert records[0].count == 6
        assert records[0].ic_indices == tuple(range(6))
        assert records[0].c1 is C1Class.FIXED_POINT

    def test_more_initial_states_never_lose_attractors(self, basin_config, trained):
        net, readout = trained
        few = basin_sample(net, readout, None, basin_config, 3, ic_seed=11)
        many = basin_sample(net, readout, None, basin_config, 6, ic_seed=11)
        assert len(many) >= len(few)
        assert sum(r.count for r in many) == 6

    def test_rejects_empty_sample(self, basin_config, trained):
        net, readout = trained
        with pytest.raises(ValueError):
            basin_sample(net, readout, None, basin_config, 0, ic_seed=11)


def test_ensemble_is_reproducible_from_base_seed(basin_config):
    first_table, first = scenario_ensemble(basin_config, [0.0, 0.5], 2, 7, 2)
    second_table, second = scenario_ensemble(basin_config, [0.0, 0.5], 2, 7, 2)
    assert first_table == second_table
    assert [r.model_dump() for r in first] == [r.model_dump() for r in second]


class TestThreadedSweeps:
    def test_thread_count_does_not_change_branches(self):
        runner = VectorFieldRunner(fold, tau=0.05)
        plan = fold_plan(-0.6, 0.6).model_copy(update={"step": 0.2})
        starts = [
            SweepStart(0.0, np.array([-1.0]), ORIGIN_GENERATED, "A0"),
            SweepStart(0.0, np.array([1.0]), ORIGIN_GENERATED, "A1"),
            SweepStart(0.2, np.array([1.2]), ORIGIN_UNTRAINED, "U0.0"),
        ]
        serial = sweep_starts(runner, plan, starts, threads=1)
        pooled = sweep_starts(runner, plan, starts, threads=3)
        assert [b.branch_id for b in pooled] == [b.branch_id for b in serial]
        assert [b.params for b in pooled] == [b.params for b in serial]
        assert serial[0].branch_id == "A0+"
        assert {b.branch_id[:2] for b in serial} == {"A0", "A1", "U0"}
