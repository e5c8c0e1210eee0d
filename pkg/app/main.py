"""Command-line entry point (`confab`)."""

import functools
import logging
import sys
from pathlib import Path

import click
from pydantic import ValidationError

from app.config import settings
from app.exceptions import (
    EXIT_CONFIGURATION,
    EXIT_FAILURE,
    EXIT_NUMERICAL,
    EXIT_OK,
    ConfigurationError,
    NumericalAbort,
)
from app.models.continuation import SweepParameter, SweepPlan
from app.models.series import ExtremaKind
from app.models.task import TaskName

logger = logging.getLogger(__name__)


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def common_options(func):
    """Options shared by the task commands."""

    @click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path))
    @click.option("--seed", type=int, default=None, help="Base seed of the run")
    @click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path))
    @click.option("--long-transient", is_flag=True, default=False, help="t_predict = 30000")
    @click.option(
        "--threads",
        type=click.IntRange(min=1),
        default=None,
        help="Local threads for ensemble cells and branch sweeps",
    )
    @click.option("--log-level", default=None, help="Overrides LOG_LEVEL")
    @functools.wraps(func)
    def wrapper(*args, log_level, **kwargs):
        configure_logging(log_level)
        return func(*args, **kwargs)

    return wrapper


def _overrides(seed: int | None, out_dir: Path | None, long_transient: bool) -> dict:
    return {
        "base_seed": seed,
        "out_dir": str(out_dir) if out_dir is not None else None,
        "long_transient": True if long_transient else None,
    }


def _spec(task: TaskName, config_path, seed, out_dir, long_transient, default_out: str):
    """Task spec with the run directory defaulting to OUTPUT_DIR/<task>."""
    from app.handlers.common import build_spec
    from app.storage.manifest import load_config_file

    overrides = _overrides(seed, out_dir, long_transient)
    if out_dir is None and "out_dir" not in load_config_file(config_path):
        overrides["out_dir"] = str(Path(settings.OUTPUT_DIR) / default_out)
    return build_spec(task, config_path, overrides)


@click.group()
def cli() -> None:
    """Reservoir-computer reconstruction, classification and continuation experiments."""


@cli.command("gen-data")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("--seed", type=int, default=0)
@click.option("--cascade", is_flag=True, default=False, help="Also continue the Sprott system in a")
@click.option("--log-level", default=None)
def gen_data(out_dir: Path | None, seed: int, cascade: bool, log_level: str | None) -> None:
    """Write the ground-truth training signals."""
    from app.handlers.data import generate_data

    configure_logging(log_level)
    out_dir = out_dir or Path(settings.OUTPUT_DIR) / "data"
    for path in generate_data(out_dir, seed=seed, cascade=cascade):
        click.echo(str(path))


@cli.command()
@common_options
def task1(config_path, seed, out_dir, long_transient, threads) -> None:
    """Scenario ensemble over rho for Lorenz-trained reservoirs."""
    from app.handlers.task1 import run_task1

    spec = _spec(TaskName.TASK1, config_path, seed, out_dir, long_transient, "task1")
    result = run_task1(spec, threads=threads or settings.DEFAULT_THREADS)
    failed = sum(1 for cell in result.cells if not cell.ok)
    click.echo(f"{len(result.cells)} cells, {failed} failed -> {result.out_dir}")


@cli.command()
@common_options
@click.option("--multi", is_flag=True, default=False, help="Multi-attractor variant")
def task2(config_path, seed, out_dir, long_transient, threads, multi) -> None:
    """Parameter-aware reservoir on Sprott limit cycles, swept in b."""
    from app.handlers.task2 import run_task2

    task = TaskName.TASK2_MULTI if multi else TaskName.TASK2
    spec = _spec(task, config_path, seed, out_dir, long_transient, task.value)
    _report(run_task2(spec, threads=threads or settings.DEFAULT_THREADS))


@cli.command()
@common_options
def task3(config_path, seed, out_dir, long_transient, threads) -> None:
    """Parameter-aware reservoir on Lorenz and shifted Halvorsen, swept in b."""
    from app.handlers.task3 import run_task3

    spec = _spec(TaskName.TASK3, config_path, seed, out_dir, long_transient, "task3")
    _report(run_task3(spec, threads=threads or settings.DEFAULT_THREADS))


def _report(result) -> None:
    for r in result.reconstructions:
        status = "ok" if r.ok else "FAILED"
        click.echo(f"{r.attractor_id}: {r.observed} (expected {r.expected}) {status}")
    for report in result.outcomes:
        click.echo(f"{report.outcome.value}: [{report.lo:g}, {report.hi:g}]")
    click.echo(f"{len(result.branches)} branches -> {result.out_dir}")


@cli.command()
@click.argument(
    "trajectories",
    nargs=-1,
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option(
    "--reference", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None
)
@click.option("--t-trans", type=float, default=0.0, help="Discarded time at the start of each file")
@click.option("--log-level", default=None)
def classify(trajectories, out_path, reference, t_trans, log_level) -> None:
    """Label trajectory CSVs as GoodRecon, PoorRecon, UA_preliminary or NeedsManualReview."""
    from app.handlers.classify import classify_files

    configure_logging(log_level)
    out_path = out_path or Path(settings.OUTPUT_DIR) / "classification.csv"
    for row in classify_files(list(trajectories), out_path, t_trans, reference):
        click.echo(f"{row.run_id}: {row.label}")


@cli.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--parameter", type=click.Choice(["b", "rho"]), default=None)
@click.option("--start", type=float, default=None)
@click.option("--stop", type=float, default=None)
@click.option("--step", type=float, default=None)
@click.option("--coord", type=int, default=None, help="Coordinate of the extrema")
@click.option("--kind", type=click.Choice(["maxima", "minima"]), default=None)
@click.option("--log-level", default=None)
def sweep(model, out_dir, parameter, start, stop, step, coord, kind, log_level) -> None:
    """Continue branches of a saved model.json from its warm-start states."""
    from app.handlers.sweep import default_plan, sweep_saved_model
    from app.storage.serialization import load_model

    configure_logging(log_level)
    base = default_plan(load_model(model).task)
    update = {
        "parameter": SweepParameter(parameter) if parameter else None,
        "start": start,
        "stop": stop,
        "step": step,
        "coordinate_index": coord,
        "kind": ExtremaKind(kind) if kind else None,
    }
    plan = SweepPlan.model_validate(
        base.model_dump() | {k: v for k, v in update.items() if v is not None}
    )
    branches = sweep_saved_model(model, out_dir or Path(model).parent / "sweep", plan)
    click.echo(f"{len(branches)} branches")


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--xlabel", default="b")
def plot(dataset, out_path, xlabel) -> None:
    """SVG figure of a branch or ensemble CSV."""
    from app.plots import emit_plots

    configure_logging(None)
    click.echo(str(emit_plots(dataset, out_path, xlabel=xlabel)))


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and map failures onto exit codes."""
    try:
        cli.main(args=argv, prog_name="confab", standalone_mode=False)
    except (ConfigurationError, ValidationError) as e:
        logger.error(f"Configuration error: {e}")
        click.echo(f"configuration error: {e}", err=True)
        return EXIT_CONFIGURATION
    except click.exceptions.Abort:
        return EXIT_FAILURE
    except click.ClickException as e:
        e.show()
        return EXIT_CONFIGURATION
    except NumericalAbort as e:
        logger.error(f"Numerical abort: {e}", exc_info=True)
        click.echo(f"numerical abort: {e}", err=True)
        return EXIT_NUMERICAL
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        click.echo(f"error: {e}", err=True)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
