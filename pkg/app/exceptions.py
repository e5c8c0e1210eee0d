"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations

from typing import Any

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIGURATION = 2
EXIT_NUMERICAL = 3


class ReservoirError(Exception):
    """Base class for every error raised by this package."""

    exit_code = EXIT_FAILURE


class ConfigurationError(ReservoirError):
    """Invalid task specification, config file or CLI flag combination."""

    exit_code = EXIT_CONFIGURATION


class InsufficientDataError(ReservoirError):
    """A trajectory window is too short for the requested analysis."""


class AssemblyError(ReservoirError):
    """Regression data could not be assembled from the given drives."""


class NumericalAbort(ReservoirError):
    """Base class for numerical failures that abort a run."""

    exit_code = EXIT_NUMERICAL


class DivergenceError(NumericalAbort):
    """RK4 produced a non-finite state.

    Carries the index of the failing step and whatever part of the trajectory
    was computed before it.
    """

    def __init__(self, step_index: int, partial: Any = None, message: str | None = None):
        self.step_index = step_index
        self.partial = partial
        super().__init__(message or f"non-finite state at step {step_index}")


class KernelAbort(NumericalAbort):
    """A saturating reservoir produced NaN; this can only be a kernel bug."""


class SpectralRadiusError(NumericalAbort):
    """The eigenvalue routine failed to converge."""


class InvalidRescaleError(NumericalAbort):
    """Cannot rescale a matrix of spectral radius 0 to a positive radius."""


class SingularSystemError(NumericalAbort):
    """The ridge normal matrix is not positive definite."""

    def __init__(self, rank: int, size: int):
        self.rank = rank
        self.size = size
        super().__init__(
            f"normal matrix is singular (rank {rank} < {size}); use beta > 0"
        )


class GenerationError(NumericalAbort):
    """Ground-truth trajectory generation diverged."""

    def __init__(self, system: str, seed: int, step_index: int):
        self.system = system
        self.seed = seed
        self.step_index = step_index
        super().__init__(
            f"{system} trajectory (seed {seed}) diverged at step {step_index}"
        )
