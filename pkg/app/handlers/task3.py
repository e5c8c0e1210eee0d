"""Task (iii): Lorenz at +b and the shifted Halvorsen attractor at -b."""

import logging

from app.handlers.parameter_aware import ParameterAwareResult, run_parameter_aware
from app.models.systems import SourceSystem, SystemName
from app.models.task import TaskSpec
from app.systems import shifted_halvorsen

logger = logging.getLogger(__name__)


def run_task3(spec: TaskSpec, threads: int = 1) -> ParameterAwareResult:
    b = spec.b_magnitude
    halvorsen = shifted_halvorsen(spec.rc.tau)
    logger.info(f"task3: lorenz at b=+{b:g}, halvorsen shifted by {halvorsen.shift} at b=-{b:g}")
    systems = [(SourceSystem(name=SystemName.LORENZ), b), (halvorsen, -b)]
    return run_parameter_aware(spec, systems, threads)
