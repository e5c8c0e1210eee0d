"""Task (ii): Sprott limit cycles at different b, including the multi-attractor variants."""

import logging

from app.handlers.parameter_aware import ParameterAwareResult, run_parameter_aware
from app.models.systems import SourceSystem, SystemName
from app.models.task import TaskSpec

logger = logging.getLogger(__name__)


def sprott_systems(spec: TaskSpec) -> list[tuple[SourceSystem, float]]:
    return [
        (SourceSystem(name=SystemName.SPROTT, parameters={"a": a}), b)
        for a, b in zip(spec.a_values, spec.training_b, strict=True)
    ]


def run_task2(spec: TaskSpec, threads: int = 1) -> ParameterAwareResult:
    """
    Train a parameter-aware RC on Sprott cycles and sweep b.

    Args:
        spec: task2 or task2_multi specification
        threads: Local threads for the b-sweeps

    Returns:
        ParameterAwareResult: Reconstruction checks, tracked branches and gap outcomes
    """
    systems = sprott_systems(spec)
    logger.info(
        f"{spec.task.value}: training on "
        + ", ".join(f"{system.label} at b={b:+g}" for system, b in systems)
    )
    return run_parameter_aware(spec, systems, threads)
