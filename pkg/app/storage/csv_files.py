"""CSV datasets written by the tasks and read back by the classify and plot commands."""

import csv
import io
import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from app.exceptions import ConfigurationError
from app.models.continuation import BifurcationRow, OutcomeReport
from app.models.series import ExtremaKind, Trajectory
from app.models.task import CellResult, ICClassification

logger = logging.getLogger(__name__)

BRANCH_FIELDNAMES = ["param", "value", "branch_id", "label", "kind", "coord"]
CLASSIFICATION_FIELDNAMES = [
    "run_id",
    "ic_index",
    "label",
    "c1",
    "c2",
    "c3",
    "max_c3_distance",
    "signature_hash",
]
ENSEMBLE_FIELDNAMES = ["rho"] + [f"scenario{k}" for k in range(1, 6)]
SCENARIO_MAP_FIELDNAMES = ["matrix_id", "rho", "scenario"]
RANKING_FIELDNAMES = ["matrix_id", "rank", "n_good_rho"]
RECONSTRUCTION_FIELDNAMES = ["attractor_id", "b", "expected_period", "observed_period", "ok"]
OUTCOME_FIELDNAMES = ["outcome", "lo", "hi"]

GOOD_SCENARIOS = (1, 4)


def _format(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float | np.floating):
        return format(float(value), ".17g")
    if hasattr(value, "value"):
        return value.value
    return value


def rows_to_csv_bytes(fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> bytes:
    """
    Render rows as CSV with full-precision floats.

    Args:
        fieldnames: Column order
        rows: Mappings keyed by column name

    Returns:
        bytes: UTF-8 CSV content with a header row
    """
    output = io.StringIO()
    writer = csv.DictWriter(output, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _format(row.get(key)) for key in fieldnames})
    return output.getvalue().encode("utf-8")


def write_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(rows_to_csv_bytes(fieldnames, rows))
    logger.info(f"Wrote {path}")
    return path


def write_trajectory_csv(path: Path, trajectory: Trajectory) -> Path:
    """Header t,x1,..,xD; one row per sample."""
    fieldnames = ["t"] + [f"x{i + 1}" for i in range(trajectory.dimension)]
    rows = (
        dict(zip(fieldnames, (t, *state), strict=True))
        for t, state in zip(trajectory.times, trajectory.states, strict=True)
    )
    return write_csv(path, fieldnames, rows)


def read_trajectory_csv(path: Path) -> Trajectory:
    """
    Load a trajectory written by write_trajectory_csv.

    Args:
        path: CSV file with header t,x1,x2,...

    Returns:
        Trajectory: Uniformly sampled states; tau is taken from the first time step
    """
    path = Path(path)
    with path.open(newline="") as handle:
        header = next(csv.reader(handle), None)
    if not header or header[0] != "t" or len(header) < 2:
        raise ConfigurationError(f"{path} is not a trajectory CSV (expected header t,x1,...)")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] < 2:
        raise ConfigurationError(f"{path} holds fewer than 2 samples")
    tau = float(data[1, 0] - data[0, 0])
    return Trajectory(states=data[:, 1:], tau=tau, t0=float(data[0, 0]))


def write_branches_csv(path: Path, rows: Sequence[BifurcationRow]) -> Path:
    ordered = sorted(rows, key=lambda r: (r.branch_id, r.param, r.value))
    return write_csv(path, BRANCH_FIELDNAMES, (row.model_dump() for row in ordered))


def read_branches_csv(path: Path) -> list[BifurcationRow]:
    with Path(path).open(newline="") as handle:
        return [
            BifurcationRow(
                param=float(row["param"]),
                value=float(row["value"]),
                branch_id=row["branch_id"],
                label=row["label"],
                kind=ExtremaKind(row["kind"]),
                coord=int(row["coord"]),
            )
            for row in csv.DictReader(handle)
        ]


def write_classification_csv(path: Path, rows: Sequence[ICClassification]) -> Path:
    ordered = sorted(rows, key=lambda r: (r.run_id, r.ic_index))
    return write_csv(path, CLASSIFICATION_FIELDNAMES, (row.model_dump() for row in ordered))


def write_ensemble_csv(path: Path, table: Sequence[Mapping[str, Any]]) -> Path:
    return write_csv(path, ENSEMBLE_FIELDNAMES, sorted(table, key=lambda r: r["rho"]))


def read_ensemble_csv(path: Path) -> list[dict[str, float]]:
    with Path(path).open(newline="") as handle:
        return [{key: float(value) for key, value in row.items()} for row in csv.DictReader(handle)]


def write_scenario_map_csv(path: Path, results: Sequence[CellResult]) -> Path:
    rows = (
        {"matrix_id": r.matrix_id, "rho": r.rho, "scenario": r.scenario}
        for r in sorted(results, key=lambda r: r.key)
    )
    return write_csv(path, SCENARIO_MAP_FIELDNAMES, rows)


def matrix_ranking(results: Sequence[CellResult]) -> list[dict[str, int]]:
    """Matrices ordered by how many rho values give a good reconstruction."""
    counts: dict[int, int] = {}
    for result in results:
        counts.setdefault(result.matrix_id, 0)
        if result.scenario in GOOD_SCENARIOS:
            counts[result.matrix_id] += 1
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [
        {"matrix_id": matrix_id, "rank": rank, "n_good_rho": n_good}
        for rank, (matrix_id, n_good) in enumerate(ordered, start=1)
    ]


def write_matrix_ranking_csv(path: Path, results: Sequence[CellResult]) -> Path:
    return write_csv(path, RANKING_FIELDNAMES, matrix_ranking(results))


def write_reconstruction_csv(path: Path, rows: Sequence[Mapping[str, Any]]) -> Path:
    return write_csv(path, RECONSTRUCTION_FIELDNAMES, sorted(rows, key=lambda r: -r["b"]))


def write_outcomes_csv(path: Path, reports: Sequence[OutcomeReport]) -> Path:
    ordered = sorted(reports, key=lambda r: r.outcome.value)
    return write_csv(path, OUTCOME_FIELDNAMES, (r.model_dump() for r in ordered))
