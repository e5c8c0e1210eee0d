"""Readout training: single-attractor and parameter-aware ridge regression."""

import logging
from collections.abc import Sequence

import numpy as np

from app.exceptions import AssemblyError
from app.models.config import RCConfig
from app.models.network import Network, Provenance, Readout, ReadoutSegment
from app.models.systems import SourceSystem, TrainingSignal
from app.models.training import Drive, RegressionData, Segment
from app.numerics import solve_ridge
from app.reservoir import open_loop_drive, q_stack, uniform_bias
from app.systems import generate_training_signal

logger = logging.getLogger(__name__)


def attractor_id(system: SourceSystem, b: float) -> str:
    return f"{system.label}@b={b:+g}"


def assemble_regression_data(drives: Sequence[Drive], config: RCConfig) -> RegressionData:
    """Columns q(r[i]) and u[i] for i = l* .. t*, concatenated across drives in order."""
    if not drives:
        raise AssemblyError("no drives to assemble")
    l_star, t_star = config.l_star, config.t_star
    x_blocks, y_blocks, segments = [], [], []
    column = 0
    for drive in drives:
        u = drive.signal.trajectory.states
        if drive.states.shape[0] < t_star + 1 or u.shape[0] < t_star + 1:
            raise AssemblyError(
                f"drive {drive.attractor_id} has {drive.states.shape[0]} reservoir and "
                f"{u.shape[0]} input samples, need {t_star + 1}"
            )
        x_blocks.append(q_stack(drive.states[l_star : t_star + 1]).T)
        y_blocks.append(u[l_star : t_star + 1].T)
        width = t_star + 1 - l_star
        segments.append(Segment(drive.attractor_id, column, column + width, drive.bias))
        column += width
    return RegressionData(
        X=np.hstack(x_blocks), Y=np.hstack(y_blocks), segments=tuple(segments)
    )


def train_readout(
    data: RegressionData, beta: float, provenance: Provenance | None = None
) -> Readout:
    W_out = solve_ridge(data.X, data.Y, beta)
    if provenance is None:
        provenance = Provenance.PARAMETER_AWARE if len(data.segments) > 1 else Provenance.SINGLE
    segments = tuple(
        ReadoutSegment(attractor_id=s.attractor_id, bias_level=float(np.mean(s.bias)))
        for s in data.segments
    )
    return Readout(W_out=W_out, provenance=provenance, segments=segments)


def training_residual(readout: Readout, data: RegressionData) -> np.ndarray:
    """RMS of W_out X - Y per output component."""
    residual = readout.W_out @ data.X - data.Y
    return np.sqrt(np.mean(residual**2, axis=1))


def train_single(
    system: SourceSystem,
    config: RCConfig,
    net: Network,
    seed: int = 0,
    signal: TrainingSignal | None = None,
) -> tuple[Readout, np.ndarray]:
    """Generate, drive, assemble and solve; returns the readout and r(t_train)."""
    if signal is None:
        signal = generate_training_signal(system, config, seed)
    bias = np.zeros(net.N)
    states = open_loop_drive(net, config, signal, bias)
    drive = Drive(attractor_id(system, 0.0), states, signal, bias)
    data = assemble_regression_data([drive], config)
    readout = train_readout(data, config.beta, Provenance.SINGLE)
    rms = training_residual(readout, data)
    logger.info(
        f"Trained single readout on {system.label} (rho={config.rho}, beta={config.beta}): "
        f"residual RMS {np.round(rms, 4).tolist()}"
    )
    return readout, states[config.t_star].copy()


def train_parameter_aware(
    systems: Sequence[tuple[SourceSystem, float | np.ndarray]],
    config: RCConfig,
    net: Network,
    seed: int = 0,
    signals: Sequence[TrainingSignal] | None = None,
) -> tuple[Readout, list[np.ndarray]]:
    """One shared readout over every (system, bias) segment plus per-attractor warm starts."""
    if not systems:
        raise AssemblyError("parameter-aware training needs at least one attractor")
    if signals is not None and len(signals) != len(systems):
        raise AssemblyError("one training signal per attractor is required")

    drives = []
    for k, (system, b) in enumerate(systems):
        bias = uniform_bias(net.N, b) if np.ndim(b) == 0 else np.asarray(b, dtype=float)
        if signals is not None:
            signal = signals[k]
        else:
            signal = generate_training_signal(system, config, seed)
        level = float(b) if np.ndim(b) == 0 else float(np.mean(bias))
        states = open_loop_drive(net, config, signal, bias)
        drives.append(Drive(attractor_id(system, level), states, signal, bias))
        logger.debug(f"Drove reservoir with {system.label} at b={level:+g}")

    data = assemble_regression_data(drives, config)
    readout = train_readout(data, config.beta, Provenance.PARAMETER_AWARE)
    rms = training_residual(readout, data)
    logger.info(
        f"Trained parameter-aware readout on {len(drives)} attractors "
        f"(T={data.n_columns}): residual RMS {np.round(rms, 4).tolist()}"
    )
    warm_starts = [drive.states[config.t_star].copy() for drive in drives]
    return readout, warm_starts
