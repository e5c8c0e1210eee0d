"""Fan ensemble cells out to the worker pool and collect them in cell-key order."""

import logging
from concurrent.futures import ThreadPoolExecutor

from celery import group

from app.config import settings
from app.models.task import CellResult, EnsembleCell
from app.workers.ensemble import ensemble_cell

logger = logging.getLogger(__name__)


def _run_eager(cell: EnsembleCell) -> dict:
    return ensemble_cell.apply(args=[cell.model_dump(mode="json")]).get()


def dispatch_cells(cells: list[EnsembleCell], threads: int = 1) -> list[CellResult]:
    """
    Run every cell and return the results sorted by (matrix_id, rho).

    Development settings execute tasks eagerly on a local thread pool;
    production settings send a Celery group to the Redis-backed workers.

    Args:
        cells: Cells to run
        threads: Local threads for eager execution

    Returns:
        list[CellResult]: One result per cell, failed cells included
    """
    if not cells:
        return []
    if settings.CELERY_TASK_ALWAYS_EAGER:
        logger.info(f"Running {len(cells)} ensemble cells eagerly on {threads} thread(s)")
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            payloads = list(pool.map(_run_eager, cells))
    else:
        logger.info(f"Dispatching {len(cells)} ensemble cells to {settings.CELERY_BROKER_URL}")
        job = group(ensemble_cell.s(cell.model_dump(mode="json")) for cell in cells)
        payloads = job.apply_async().get()
    results = [CellResult.model_validate(payload) for payload in payloads]
    return sorted(results, key=lambda r: r.key)
