"""Ground-truth source systems and training-signal generation."""

import logging
from functools import lru_cache

import numpy as np

from app.exceptions import DivergenceError, GenerationError
from app.models.config import RCConfig
from app.models.series import Trajectory
from app.models.systems import SourceSystem, SystemName, TrainingSignal
from app.numerics import VectorField, integrate

logger = logging.getLogger(__name__)

DEFAULT_INITIAL_STATES: dict[SystemName, tuple[float, float, float]] = {
    SystemName.LORENZ: (1.0, 1.0, 1.0),
    SystemName.SPROTT: (0.1, 0.5, -0.2),
    SystemName.HALVORSEN: (-5.0, 0.0, 0.0),
}
TRANSIENT = 100.0
SHIFT_REFERENCE_DURATION = 200.0

LORENZ_SIGMA = 10.0
LORENZ_RHO = 28.0
LORENZ_BETA = 8.0 / 3.0
SPROTT_C = 0.55
HALVORSEN_A = 1.3
HALVORSEN_B = 4.0


def lorenz_rhs(x: np.ndarray) -> np.ndarray:
    # Standard sign 10(x2 - x1); the printed 10(x2 + x1) is unbounded.
    return np.array(
        [
            LORENZ_SIGMA * (x[1] - x[0]),
            x[0] * (LORENZ_RHO - x[2]) - x[1],
            x[0] * x[1] - LORENZ_BETA * x[2],
        ]
    )


def sprott_rhs(x: np.ndarray, a: float) -> np.ndarray:
    return np.array(
        [
            x[1] * (1.0 + x[2]),
            x[2] * (x[1] - a * x[0]),
            SPROTT_C * x[2] ** 2 - x[1] ** 2,
        ]
    )


def halvorsen_rhs(x: np.ndarray) -> np.ndarray:
    """Cyclically symmetric: component i depends on (x_i, x_{i+1}, x_{i+2})."""
    y = np.roll(x, -1)
    z = np.roll(x, -2)
    return -HALVORSEN_A * x - HALVORSEN_B * (y + z) - y**2


def source_field(system: SourceSystem) -> VectorField:
    """Vector field of `system` in native (unshifted) coordinates."""
    match system.name:
        case SystemName.LORENZ:
            return VectorField(3, lorenz_rhs)
        case SystemName.SPROTT:
            a = float(system.parameters["a"])
            return VectorField(3, lambda x: sprott_rhs(x, a))
        case SystemName.HALVORSEN:
            return VectorField(3, halvorsen_rhs)
    raise ValueError(f"unknown system {system.name}")


def settled_state(
    system: SourceSystem, tau: float = 0.01, seed: int = 0, x0: np.ndarray | None = None
) -> np.ndarray:
    """Native-coordinate state after the discarded transient."""
    start = np.asarray(x0 if x0 is not None else DEFAULT_INITIAL_STATES[system.name], dtype=float)
    try:
        return integrate(source_field(system), start, tau, int(round(TRANSIENT / tau))).final.copy()
    except DivergenceError as e:
        raise GenerationError(system.label, seed, e.step_index) from e


def _run_native(
    system: SourceSystem, tau: float, duration: float, seed: int, x0: np.ndarray | None = None
) -> np.ndarray:
    """On-attractor samples covering `duration` after the transient."""
    start = settled_state(system, tau, seed, x0)
    try:
        return integrate(source_field(system), start, tau, int(round(duration / tau))).states
    except DivergenceError as e:
        raise GenerationError(system.label, seed, e.step_index) from e


def generate_training_signal(
    system: SourceSystem, config: RCConfig, seed: int = 0, x0: np.ndarray | None = None
) -> TrainingSignal:
    """Sample u(t) on [0, t_predict] at spacing tau, starting on the attractor."""
    states = _run_native(system, config.tau, config.t_predict, seed, x0)
    trajectory = Trajectory(states, config.tau).shifted(np.asarray(system.shift))
    logger.debug(
        f"Generated {system.label} signal: {trajectory.n_samples} samples, "
        f"shift={system.shift}"
    )
    return TrainingSignal(
        trajectory=trajectory,
        t_listen=config.t_listen,
        t_train=config.t_train,
        t_predict=config.t_predict,
        source=system,
        seed=seed,
    )


@lru_cache(maxsize=8)
def _halvorsen_shift(tau: float) -> tuple[float, float, float]:
    lorenz = _run_native(SourceSystem(name=SystemName.LORENZ), tau, SHIFT_REFERENCE_DURATION, 0)
    halvorsen = _run_native(
        SourceSystem(name=SystemName.HALVORSEN), tau, SHIFT_REFERENCE_DURATION, 0
    )
    shift = lorenz.mean(axis=0) - halvorsen.mean(axis=0)
    logger.info(f"Halvorsen shift (tau={tau}): {np.round(shift, 6).tolist()}")
    return tuple(float(v) for v in shift)


def halvorsen_shift(tau: float = 0.01) -> tuple[float, float, float]:
    """Translation that moves the Halvorsen centroid onto the Lorenz centroid."""
    return _halvorsen_shift(float(tau))


def shifted_halvorsen(tau: float = 0.01) -> SourceSystem:
    return SourceSystem(name=SystemName.HALVORSEN, shift=halvorsen_shift(tau))
