"""Classify closed-loop output trajectories stored as CSV files."""

import logging
from pathlib import Path

from app.classification import classify_window, fit_reference, post_transient
from app.models.classification import ReferenceFit
from app.models.config import RCConfig
from app.models.series import ExtremaKind
from app.models.systems import SourceSystem, SystemName
from app.models.task import ICClassification
from app.storage.csv_files import read_trajectory_csv, write_classification_csv
from app.systems import generate_training_signal

logger = logging.getLogger(__name__)


def reference_fit(reference_csv: Path | None = None) -> ReferenceFit:
    """Wing lines from a reference trajectory file, or from the default Lorenz signal."""
    if reference_csv is not None:
        return fit_reference(read_trajectory_csv(reference_csv))
    signal = generate_training_signal(SourceSystem(name=SystemName.LORENZ), RCConfig())
    return fit_reference(signal.trajectory)


def classify_files(
    paths: list[Path],
    out_path: Path,
    t_trans: float = 0.0,
    reference_csv: Path | None = None,
) -> list[ICClassification]:
    """
    Label each trajectory file and write one classification row per file.

    Args:
        paths: Trajectory CSVs (header t,x1,x2,x3)
        out_path: Destination classification.csv
        t_trans: Discard samples before this time
        reference_csv: Optional ground-truth trajectory for the wing lines

    Returns:
        list[ICClassification]: Rows in input order
    """
    ref = reference_fit(reference_csv)
    rows = []
    for index, path in enumerate(paths):
        path = Path(path)
        trajectory = read_trajectory_csv(path)
        window = post_transient(trajectory, trajectory.t0 + t_trans)
        output = classify_window(window, ref, 2, ExtremaKind.MAXIMA, ic_index=index)
        label = output.label
        logger.info(
            f"{path.name}: {label.value.value} "
            f"(C1 {label.c1.value}, C2 {label.c2}, C3 {label.c3})"
        )
        rows.append(
            ICClassification(
                run_id=path.stem,
                ic_index=index,
                label=label.value.value,
                c1=label.c1.value,
                c2=label.c2,
                c3=label.c3,
                max_c3_distance=label.max_c3_distance,
                signature_hash=output.signature.digest(),
            )
        )
    write_classification_csv(out_path, rows)
    return rows
