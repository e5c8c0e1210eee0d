"""SVG figures derived from the CSV datasets (the CSVs stay canonical)."""

import csv
import logging
from collections import defaultdict
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

from app.exceptions import ConfigurationError, ReservoirError
from app.models.continuation import BifurcationRow
from app.storage.csv_files import (
    BRANCH_FIELDNAMES,
    ENSEMBLE_FIELDNAMES,
    read_branches_csv,
    read_ensemble_csv,
)

logger = logging.getLogger(__name__)


class PlottingUnavailable(ReservoirError):
    """matplotlib is not installed (install the `plots` extra)."""


def _pyplot():
    try:
        import matplotlib
    except ImportError as e:
        raise PlottingUnavailable("matplotlib is not installed") from e
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def emit_branch_plot(rows: Sequence[BifurcationRow], path: Path, xlabel: str = "b") -> Path:
    """Parameter against extremum value, one layer per branch label."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 5))

    layers: dict[str, list[BifurcationRow]] = defaultdict(list)
    for row in rows:
        layers[row.label].append(row)
    for label in sorted(layers):
        members = layers[label]
        if label.endswith(":fixed_point"):
            by_branch: dict[str, list[BifurcationRow]] = defaultdict(list)
            for row in members:
                by_branch[row.branch_id].append(row)
            for i, branch_rows in enumerate(by_branch.values()):
                branch_rows.sort(key=lambda r: r.param)
                ax.plot(
                    [r.param for r in branch_rows],
                    [r.value for r in branch_rows],
                    linewidth=1.0,
                    label=label if i == 0 else None,
                )
        else:
            ax.scatter([r.param for r in members], [r.value for r in members], s=1.0, label=label)

    if rows:
        first = rows[0]
        ax.set_ylabel(f"x{first.coord + 1} {first.kind.value}")
        ax.legend(markerscale=6, fontsize="small")
    ax.set_xlabel(xlabel)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Wrote plot {path}")
    return path


def emit_ensemble_plot(table: Sequence[Mapping[str, Any]], path: Path) -> Path:
    """Stacked scenario frequencies against rho."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 5))
    rhos = [row["rho"] for row in table]
    bottom = [0.0] * len(table)
    width = min((b - a for a, b in zip(rhos, rhos[1:], strict=False)), default=0.05) * 0.9
    for k in range(1, 6):
        heights = [row[f"scenario{k}"] for row in table]
        ax.bar(rhos, heights, width=width, bottom=bottom, label=f"scenario {k}")
        bottom = [b + h for b, h in zip(bottom, heights, strict=True)]
    ax.set_xlabel("rho")
    ax.set_ylabel("matrices")
    if table:
        ax.legend(fontsize="small")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Wrote plot {path}")
    return path


def emit_plots(csv_path: Path, out_path: Path | None = None, xlabel: str = "b") -> Path:
    """Plot a branch or ensemble CSV, chosen by its header."""
    csv_path = Path(csv_path)
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".svg")
    with csv_path.open(newline="") as handle:
        header = next(csv.reader(handle), [])
    if header == BRANCH_FIELDNAMES:
        return emit_branch_plot(read_branches_csv(csv_path), out_path, xlabel=xlabel)
    if header == ENSEMBLE_FIELDNAMES:
        return emit_ensemble_plot(read_ensemble_csv(csv_path), out_path)
    raise ConfigurationError(f"{csv_path} is neither a branch nor an ensemble dataset")
