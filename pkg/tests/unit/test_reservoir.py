import numpy as np
import pytest

from app.exceptions import KernelAbort
from app.models.network import Readout
from app.models.systems import SourceSystem, SystemName
from app.reservoir import (
    build_network,
    closed_loop_run,
    open_loop_drive,
    q_stack,
    readout_map,
    rescale_network,
    sample_input_matrix,
    sample_internal_matrix,
    uniform_bias,
)
from app.systems import generate_training_signal
from tests.factories.configs import small_config


class TestBuildNetwork:
    def test_spectral_radius_matches_target(self):
        net = build_network(small_config(rho=0.8))
        assert net.rho_actual == pytest.approx(0.8, rel=1e-10)
        assert net.M.shape == (30, 30)
        assert net.W_in.shape == (30, 3)

    def test_deterministic_in_seeds(self):
        first = build_network(small_config())
        second = build_network(small_config())
        assert np.array_equal(first.M, second.M)
        assert np.array_equal(first.W_in, second.W_in)

    def test_one_input_per_neuron(self):
        W_in = sample_input_matrix(200, 3, seed=7)
        assert np.all(np.count_nonzero(W_in, axis=1) == 1)
        assert np.all(np.abs(W_in) <= 1.0)

    def test_connection_density(self):
        M = sample_internal_matrix(400, 0.05, seed=11)
        assert np.count_nonzero(M) / M.size == pytest.approx(0.05, abs=0.005)

    def test_zero_radius(self):
        net = build_network(small_config(rho=0.0))
        assert not np.any(net.M)
        assert net.rho_actual == 0.0

    def test_rescale_keeps_realisation(self):
        net = build_network(small_config(rho=0.5))
        moved = rescale_network(net, 1.0)
        assert moved.rho_actual == pytest.approx(1.0, rel=1e-10)
        assert np.allclose(moved.M, 2.0 * net.M)
        assert moved.W_in is net.W_in

    def test_rescale_from_zero(self):
        net = build_network(small_config(rho=0.0))
        assert rescale_network(net, 0.3).rho_actual == pytest.approx(0.3, rel=1e-10)

    def test_shared_input_matrix(self):
        W_in = sample_input_matrix(30, 3, seed=99)
        assert build_network(small_config(), W_in=W_in).W_in is W_in


class TestReadoutFeatures:
    def test_q_stack(self):
        assert q_stack(np.array([1.0, -2.0])).tolist() == [1.0, -2.0, 1.0, 4.0]

    def test_batch_matches_single(self):
        rng = np.random.default_rng(0)
        readout = Readout(W_out=rng.normal(size=(3, 8)))
        r = rng.normal(size=(5, 4))
        batch = readout_map(readout, r)
        assert np.allclose(batch[2], readout_map(readout, r[2]))


class TestDynamics:
    def test_open_loop_shape(self):
        config = small_config()
        net = build_network(config)
        signal = generate_training_signal(SourceSystem(name=SystemName.LORENZ), config)
        states = open_loop_drive(net, config, signal)
        assert states.shape == (config.t_star + 1, config.N)
        assert not np.any(states[0])
        assert np.all(np.abs(states) <= 1.0 + 1e-9)

    def test_closed_loop_without_coupling_decays(self):
        config = small_config(rho=0.0)
        net = build_network(config)
        readout = Readout(W_out=np.zeros((3, 2 * config.N)))
        r0 = np.linspace(-1.0, 1.0, config.N)
        run = closed_loop_run(net, readout, r0, None, config, 1.0)
        assert run.states.shape == (101, config.N)
        assert np.allclose(run.final_state, r0 * np.exp(-config.gamma), rtol=1e-4)
        assert not np.any(run.outputs.states)

    def test_outputs_use_readout(self):
        config = small_config()
        net = build_network(config)
        readout = Readout(W_out=np.random.default_rng(3).normal(size=(3, 2 * config.N)))
        run = closed_loop_run(
            net, readout, np.full(config.N, 0.1), uniform_bias(config.N, 0.2), config, 2.0, t0=10.0
        )
        assert run.outputs.t0 == 10.0
        assert np.allclose(run.outputs.states, readout_map(readout, run.states))

    def test_nan_state_aborts(self):
        config = small_config()
        net = build_network(config)
        readout = Readout(W_out=np.zeros((3, 2 * config.N)))
        r0 = np.zeros(config.N)
        r0[0] = np.nan
        with pytest.raises(KernelAbort):
            closed_loop_run(net, readout, r0, None, config, 1.0)

    @pytest.mark.parametrize("scale", [0.1, 1.0, 10.0, 1e4])
    def test_closed_loop_stays_in_unit_box(self, scale):
        rng = np.random.default_rng(int(scale * 10))
        for trial in range(50):
            config = small_config(rho=rng.uniform(0.0, 2.0))
            net = build_network(config)
            readout = Readout(W_out=scale * rng.normal(size=(3, 2 * config.N)))
            r0 = rng.uniform(-1.0, 1.0, config.N)
            bias = uniform_bias(config.N, rng.uniform(-0.5, 0.5))
            run = closed_loop_run(net, readout, r0, bias, config, 5.0)
            assert np.all(np.abs(run.states) <= 1.0 + 1e-9), f"trial {trial}"

    @pytest.mark.parametrize("scale", [0.1, 10.0, 1e4])
    def test_closed_loop_enters_unit_box_from_outside(self, scale):
        rng = np.random.default_rng(int(scale) + 1)
        for trial in range(5):
            config = small_config(rho=rng.uniform(0.0, 2.0))
            net = build_network(config)
            readout = Readout(W_out=scale * rng.normal(size=(3, 2 * config.N)))
            r0 = rng.choice([-1.0, 1.0], config.N) * rng.uniform(1.5, 5.0, config.N)
            run = closed_loop_run(net, readout, r0, None, config, 5.0)
            peak = np.max(np.abs(run.states), axis=1)
            assert np.all(peak[1:] <= np.maximum(peak[:-1], 1.0) + 1e-9), f"trial {trial}"
            assert peak[-1] <= 1.0 + 1e-9, f"trial {trial}"
