import numpy as np
import pytest

from app.classification import count_period
from app.exceptions import GenerationError
from app.models.config import RCConfig
from app.models.series import ExtremaKind
from app.models.systems import SourceSystem, SystemName
from app.systems import (
    generate_training_signal,
    halvorsen_rhs,
    halvorsen_shift,
    lorenz_rhs,
    settled_state,
    shifted_halvorsen,
    sprott_rhs,
)

SPROTT_27 = SourceSystem(name=SystemName.SPROTT, parameters={"a": 27.0})
SHORT = RCConfig(t_listen=5.0, t_train=10.0, t_predict=20.0, t_trans_offset=1.0)
LONG = RCConfig(t_listen=50.0, t_train=100.0, t_predict=300.0, t_trans_offset=10.0)
SHIFT_WINDOW = RCConfig(t_listen=50.0, t_train=100.0, t_predict=200.0, t_trans_offset=10.0)


class TestVectorFields:
    def test_lorenz(self):
        assert np.allclose(lorenz_rhs(np.array([1.0, 1.0, 1.0])), [0.0, 26.0, 1.0 - 8.0 / 3.0])

    def test_lorenz_origin_is_equilibrium(self):
        assert not np.any(lorenz_rhs(np.zeros(3)))

    def test_sprott(self):
        assert np.allclose(sprott_rhs(np.array([1.0, 2.0, 3.0]), 17.0), [8.0, -45.0, 0.95])

    def test_halvorsen_cyclic_symmetry(self):
        x = np.array([0.3, -1.2, 2.5])
        assert np.allclose(halvorsen_rhs(np.roll(x, -1)), np.roll(halvorsen_rhs(x), -1))

    def test_sprott_mirror_symmetry(self):
        x = np.array([0.7, -1.1, 0.4])
        mirror = np.array([-1.0, -1.0, 1.0])
        for a in (17.0, 27.0):
            assert np.allclose(sprott_rhs(mirror * x, a), mirror * sprott_rhs(x, a))

    def test_sprott_requires_a(self):
        with pytest.raises(ValueError):
            SourceSystem(name=SystemName.SPROTT)


class TestTrainingSignal:
    def test_sample_count(self):
        signal = generate_training_signal(SourceSystem(name=SystemName.LORENZ), SHORT)
        assert signal.trajectory.n_samples == 2001
        assert signal.trajectory.tau == SHORT.tau

    def test_deterministic(self):
        system = SourceSystem(name=SystemName.SPROTT, parameters={"a": 17.0})
        first = generate_training_signal(system, SHORT).trajectory.states
        second = generate_training_signal(system, SHORT).trajectory.states
        assert np.array_equal(first, second)

    def test_shift_is_added(self):
        shifted = shifted_halvorsen(SHORT.tau)
        native = SourceSystem(name=SystemName.HALVORSEN)
        assert shifted.shift == halvorsen_shift(SHORT.tau)
        difference = (
            generate_training_signal(shifted, SHORT).trajectory.states
            - generate_training_signal(native, SHORT).trajectory.states
        )
        assert np.allclose(difference, np.asarray(shifted.shift))

    def test_divergence_names_system_and_seed(self):
        with np.errstate(all="ignore"):
            with pytest.raises(GenerationError) as info:
                settled_state(
                    SourceSystem(name=SystemName.LORENZ), seed=9, x0=np.full(3, 1e200)
                )
        assert info.value.system == "lorenz"
        assert info.value.seed == 9


class TestAttractors:
    def test_lorenz_stays_in_box(self):
        lorenz = generate_training_signal(SourceSystem(name=SystemName.LORENZ), LONG).trajectory
        x1, x3 = lorenz.coordinate(0), lorenz.coordinate(2)
        assert np.all(np.abs(x1) <= 22.0)
        assert np.all((x3 >= 0.0) & (x3 <= 55.0))

    def test_halvorsen_stays_bounded(self):
        signal = generate_training_signal(SourceSystem(name=SystemName.HALVORSEN), LONG)
        states = signal.trajectory.states
        assert np.all(np.isfinite(states))
        assert np.max(np.abs(states)) < 20.0

    def test_shifted_halvorsen_shares_lorenz_centroid(self):
        lorenz = generate_training_signal(SourceSystem(name=SystemName.LORENZ), SHIFT_WINDOW)
        halvorsen = generate_training_signal(shifted_halvorsen(SHIFT_WINDOW.tau), SHIFT_WINDOW)
        gap = lorenz.trajectory.centroid() - halvorsen.trajectory.centroid()
        assert np.linalg.norm(gap) <= 1.0

    def test_sprott_27_is_a_single_loop(self):
        signal = generate_training_signal(SPROTT_27, LONG)
        assert count_period(signal.trajectory, 1, ExtremaKind.MINIMA) == 1
