import pytest
from pydantic import ValidationError

from app.models.config import RCConfig
from app.models.continuation import SweepPlan
from app.models.task import (
    LONG_TRANSIENT_T_PREDICT,
    LONG_TRANSIENT_T_SETTLE,
    TaskName,
    TaskSpec,
    matrix_seeds,
    sprott_a_for_bias,
)


class TestRCConfig:
    def test_step_counts(self):
        config = RCConfig()
        assert (config.l_star, config.t_star) == (10000, 20000)
        assert config.t_trans == 270.0

    def test_times_must_increase(self):
        with pytest.raises(ValidationError):
            RCConfig(t_listen=300.0, t_train=200.0, t_predict=400.0)

    def test_transient_inside_prediction(self):
        with pytest.raises(ValidationError):
            RCConfig(t_train=200.0, t_predict=250.0, t_trans_offset=70.0)


class TestSweepPlan:
    def test_values_include_both_ends(self):
        plan = SweepPlan(start=0.4, stop=0.42, step=0.002)
        assert len(plan.values()) == 11
        assert plan.values()[-1] == pytest.approx(0.42)

    def test_direction_must_agree(self):
        with pytest.raises(ValidationError):
            SweepPlan(start=0.4, stop=-0.4, step=0.002)

    def test_zero_step(self):
        with pytest.raises(ValidationError):
            SweepPlan(start=0.0, stop=1.0, step=0.0)

    def test_budget(self):
        with pytest.raises(ValidationError):
            SweepPlan(start=0.0, stop=1.0, step=0.1, t_settle=70.0, t_measure=130.0, budget=100.0)


class TestTaskSpec:
    def test_task2_defaults(self):
        spec = TaskSpec.build(TaskName.TASK2)
        assert (spec.rc.rho, spec.rc.sigma, spec.rc.beta) == (1.2, 1.6, 0.01)
        assert spec.training_b == [0.4, -0.4]
        assert spec.a_values == [17.0, 27.0]
        assert spec.sweep.coordinate_index == 1
        assert spec.b_magnitude == 0.4

    def test_nested_overrides_merge(self):
        spec = TaskSpec.build(TaskName.TASK2, {"rc": {"rho": 1.0}, "training_b": [0.3, -0.3]})
        assert spec.rc.rho == 1.0
        assert spec.rc.sigma == 1.6

    def test_multi_derives_a(self):
        spec = TaskSpec.build(TaskName.TASK2_MULTI)
        assert spec.a_values == [17.0, 22.0, 27.0]

    def test_five_attractor_hyperparameters(self):
        spec = TaskSpec.build(TaskName.TASK2_MULTI, {"training_b": [0.2, 0.1, 0.0, -0.1, -0.2]})
        assert (spec.rc.rho, spec.rc.sigma, spec.rc.beta) == (1.3, 1.0, 0.1)
        assert spec.a_values == pytest.approx([17.0, 19.5, 22.0, 24.5, 27.0])

    def test_distinct_b(self):
        with pytest.raises(ValidationError):
            TaskSpec.build(TaskName.TASK2, {"training_b": [0.4, 0.4]})

    def test_empty_b(self):
        with pytest.raises(ValidationError):
            TaskSpec.build(TaskName.TASK3, {"training_b": []})

    def test_task3_pairs(self):
        with pytest.raises(ValidationError):
            TaskSpec.build(TaskName.TASK3, {"training_b": [0.3, 0.0, -0.3]})

    def test_a_values_length(self):
        with pytest.raises(ValidationError):
            TaskSpec.build(TaskName.TASK2, {"a_values": [17.0]})

    def test_long_transient(self):
        spec = TaskSpec.build(TaskName.TASK3, {"long_transient": True})
        assert spec.effective_rc.t_predict == LONG_TRANSIENT_T_PREDICT
        assert spec.effective_sweep.t_settle == LONG_TRANSIENT_T_SETTLE
        assert spec.rc.t_predict == 500.0

    def test_task1_grid(self):
        spec = TaskSpec.build(TaskName.TASK1)
        assert len(spec.ensemble.rho_grid) == 31
        assert spec.ensemble.rho_grid[-1] == 1.5


def test_seed_schedule():
    seeds = matrix_seeds(base_seed=3, matrix_id=5)
    assert (seeds.network_seed, seeds.input_seed, seeds.ic_seed) == (8, 3, 3_000_000)


def test_bias_to_sprott_parameter():
    assert sprott_a_for_bias(0.2) == 17.0
    assert sprott_a_for_bias(-0.2) == 27.0
