"""Ensemble-cell worker task."""

import logging

from app.continuation import run_ensemble_cell
from app.models.task import CellResult, EnsembleCell
from app.workers import celery_app

logger = logging.getLogger(__name__)


@celery_app.task(name="ensemble.cell")
def ensemble_cell(cell_data: dict) -> dict:
    """Run one (matrix, rho) cell; the network and signal are rebuilt from the seeds."""
    cell = EnsembleCell.model_validate(cell_data)
    logger.info(f"Starting ensemble cell matrix={cell.matrix_id} rho={cell.rho:g}")
    try:
        result = run_ensemble_cell(cell)
    except Exception as e:
        logger.error(
            f"Unexpected error in ensemble cell matrix={cell.matrix_id} rho={cell.rho:g}: {str(e)}",
            exc_info=True,
        )
        error = f"{type(e).__name__}: {e}"
        result = CellResult(matrix_id=cell.matrix_id, rho=cell.rho, error=error)
    return result.model_dump(mode="json")
