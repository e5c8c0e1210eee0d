"""Random reservoir construction and open/closed-loop reservoir dynamics."""

import logging
from dataclasses import dataclass

import numpy as np

from app.exceptions import InvalidRescaleError, KernelAbort
from app.models.config import RCConfig
from app.models.network import Network, Readout
from app.models.series import Trajectory
from app.models.systems import TrainingSignal
from app.numerics import rescale_to_radius, spectral_radius

logger = logging.getLogger(__name__)

MAX_REBUILDS = 100


def _rng(seed: int, attempt: int) -> np.random.Generator:
    if attempt == 0:
        return np.random.default_rng(seed)
    return np.random.default_rng([seed, attempt])


def sample_internal_matrix(N: int, P: float, seed: int, attempt: int = 0) -> np.ndarray:
    """Erdos-Renyi pattern at density P with uniform(-1, 1) weights."""
    rng = _rng(seed, attempt)
    mask = rng.random((N, N)) < P
    weights = rng.uniform(-1.0, 1.0, size=(N, N))
    return np.where(mask, weights, 0.0)


def sample_input_matrix(N: int, D: int, seed: int) -> np.ndarray:
    """One uniform(-1, 1) entry per row at a random column."""
    rng = np.random.default_rng(seed)
    columns = rng.integers(0, D, size=N)
    values = rng.uniform(-1.0, 1.0, size=N)
    W_in = np.zeros((N, D))
    W_in[np.arange(N), columns] = values
    return W_in


def _unit_matrix(N: int, P: float, seed: int) -> np.ndarray:
    for attempt in range(MAX_REBUILDS):
        raw = sample_internal_matrix(N, P, seed, attempt)
        radius = spectral_radius(raw)
        if radius > 0:
            if attempt:
                logger.info(f"Internal matrix for seed {seed} accepted on attempt {attempt}")
            return raw / radius
        logger.warning(
            f"Internal matrix sample (seed {seed}, attempt {attempt}) has spectral radius 0; "
            "rebuilding"
        )
    raise InvalidRescaleError(
        f"no internal matrix with positive spectral radius after {MAX_REBUILDS} attempts "
        f"(seed {seed})"
    )


def build_network(config: RCConfig, W_in: np.ndarray | None = None) -> Network:
    """Deterministic in (network_seed, input_seed); a shared W_in may be passed in."""
    M_unit = _unit_matrix(config.N, config.P, config.seeds.network_seed)
    if W_in is None:
        W_in = sample_input_matrix(config.N, config.D, config.seeds.input_seed)
    M = rescale_to_radius(M_unit, config.rho)
    return Network(M=M, W_in=W_in, rho_actual=spectral_radius(M), M_unit=M_unit)


def rescale_network(net: Network, rho: float) -> Network:
    """The same realisation moved to spectral radius rho."""
    if net.M_unit is None:
        M = rescale_to_radius(net.M, rho)
        return Network(M=M, W_in=net.W_in, rho_actual=spectral_radius(M))
    M = rescale_to_radius(net.M_unit, rho)
    return Network(M=M, W_in=net.W_in, rho_actual=spectral_radius(M), M_unit=net.M_unit)


def q_stack(r: np.ndarray) -> np.ndarray:
    """(r; r^2) along the last axis."""
    r = np.asarray(r, dtype=float)
    return np.concatenate([r, r**2], axis=-1)


def readout_map(readout: Readout, r: np.ndarray) -> np.ndarray:
    """W_out q(r) for one state (N,) or a batch of states (T, N)."""
    return q_stack(r) @ readout.W_out.T


def uniform_bias(N: int, b: float) -> np.ndarray:
    return np.full(N, float(b))


def _check_finite(r: np.ndarray, step_index: int, where: str) -> None:
    if not np.all(np.isfinite(r)):
        raise KernelAbort(f"non-finite reservoir state in {where} at step {step_index}")


def open_loop_drive(
    net: Network, config: RCConfig, signal: TrainingSignal, bias: np.ndarray | None = None
) -> np.ndarray:
    """Reservoir response r[0..t*] to u(t) from r(0) = 0, u held over each step."""
    n_steps = config.t_star
    u = signal.trajectory.states
    if u.shape[0] < n_steps + 1:
        raise ValueError(f"signal has {u.shape[0]} samples, drive needs {n_steps + 1}")
    bias = np.zeros(net.N) if bias is None else np.asarray(bias, dtype=float)

    drive = config.sigma * u[:n_steps] @ net.W_in.T + bias
    M = net.M
    gamma, tau = config.gamma, config.tau

    states = np.empty((n_steps + 1, net.N))
    r = np.zeros(net.N)
    states[0] = r
    for i in range(n_steps):
        d = drive[i]
        k1 = gamma * (-r + np.tanh(M @ r + d))
        y = r + 0.5 * tau * k1
        k2 = gamma * (-y + np.tanh(M @ y + d))
        y = r + 0.5 * tau * k2
        k3 = gamma * (-y + np.tanh(M @ y + d))
        y = r + tau * k3
        k4 = gamma * (-y + np.tanh(M @ y + d))
        r = r + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(r, i + 1, "open loop")
        states[i + 1] = r
    return states


@dataclass(frozen=True, eq=False)
class ClosedLoopRun:
    """Closed-loop result: reservoir states (optional) and projected outputs."""

    states: np.ndarray | None
    outputs: Trajectory
    final_state: np.ndarray


def closed_loop_run(
    net: Network,
    readout: Readout,
    r0: np.ndarray,
    bias: np.ndarray | None,
    config: RCConfig,
    duration: float,
    t0: float = 0.0,
    keep_states: bool = True,
) -> ClosedLoopRun:
    """Integrate the autonomous closed loop and project every sample through the readout.

    Long runs should pass keep_states=False; outputs are always recorded.
    """
    if duration <= 0:
        raise ValueError("duration must be > 0")
    r = np.asarray(r0, dtype=float).copy()
    _check_finite(r, 0, "closed loop")
    bias = np.zeros(net.N) if bias is None else np.asarray(bias, dtype=float)

    # Feedback folded into the internal matrix: M r + sigma W_in W_out q(r).
    A = net.M + config.sigma * net.W_in @ readout.linear
    B = config.sigma * net.W_in @ readout.square
    gamma, tau = config.gamma, config.tau

    def field(x: np.ndarray) -> np.ndarray:
        return gamma * (-x + np.tanh(A @ x + B @ (x * x) + bias))

    n_steps = config.steps(duration)
    states = np.empty((n_steps + 1, net.N)) if keep_states else None
    outputs = np.empty((n_steps + 1, readout.W_out.shape[0]))
    W_out = readout.W_out
    if states is not None:
        states[0] = r
    outputs[0] = W_out @ q_stack(r)
    for i in range(n_steps):
        k1 = field(r)
        k2 = field(r + 0.5 * tau * k1)
        k3 = field(r + 0.5 * tau * k2)
        k4 = field(r + tau * k3)
        r = r + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(r, i + 1, "closed loop")
        if states is not None:
            states[i + 1] = r
        outputs[i + 1] = W_out @ q_stack(r)
    return ClosedLoopRun(states=states, outputs=Trajectory(outputs, tau, t0), final_state=r)
