"""CLI commands using cyclopts."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Literal

import cyclopts
import structlog

from sprays import __version__
from sprays.catalog import get_example
from sprays.config import load_config
from sprays.errors import InvalidModel, SprayError
from sprays.loader import dump_model, load_model
from sprays.spray import Spray
from sprays.sweep import compare as run_compare
from sprays.sweep import linear_grid, log_grid, write_csv
from sprays.sweep import sweep as run_sweep

app = cyclopts.App(
    name="sprays",
    help="Tube formulas for graph-directed sprays, checked against an exact oracle.",
    version=__version__,
)

EXIT_INVALID = 1
EXIT_SOLVER = 2
EXIT_USAGE = 3


def _spray(model_path: Path, **overrides) -> Spray:
    """Model file settings over sprays.toml, then command-line flags over both."""
    config = load_config()
    model = load_model(model_path)
    settings = config.settings.merged(model.settings).merged(overrides)
    return Spray(model, settings)


def _g(x: float) -> str:
    return format(x, ".6g")


@app.command
def init(
    *,
    example: Literal["worked", "cantor", "gasket", "pluriphase"] = "worked",
    out: Path | None = None,
):
    """Write a built-in model as JSON."""
    text = json.dumps(dump_model(get_example(example)), indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    if out.exists():
        print(f"Already exists: {out}")
        return
    out.write_text(text)
    print(f"Created {out}")


@app.command
def validate(model_path: Path):
    """Check a model file and list every violation."""
    try:
        load_model(model_path)
    except InvalidModel as e:
        print(f"{model_path.name}: {len(e.report)} violation(s)")
        print(e.report)
        sys.exit(EXIT_INVALID)
    print(f"{model_path.name}: ok")


@app.command
def simvalue(model_path: Path):
    """Print the sim-value D and the spectral-radius residual at D."""
    sim = _spray(model_path).sim_value()
    print(f"D = {sim.value!r}")
    print(f"residual = {sim.residual:.3e}")


@app.command
def dims(
    model_path: Path,
    *,
    height: float | None = None,
    method: Literal["auto", "lattice", "generic"] | None = None,
    workers: int | None = None,
    out: Path | None = None,
):
    """Complex dimensions with |Im| <= height, as JSON."""
    spray = _spray(model_path, height=height, method=method, workers=workers)
    found = spray.dimensions()
    text = json.dumps(found.to_dict(), indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        print(f"{len(found)} zero(s) written to {out}")


@app.command
def tube(model_path: Path, *, eps: float, height: float | None = None):
    """Evaluate the residue tube formula and show every pole's contribution."""
    spray = _spray(model_path, height=height)
    result = spray.tube(eps)
    print(f"V({eps!r}) = {result.value!r}")
    for v, x in result.per_vertex.items():
        print(f"  vertex {v}: {x!r}")
    flag = "yes" if result.within_validity_bound else "NO"
    print(f"within validity bound {spray.validity_bound()!r}: {flag}")
    print()
    print(f"{'Pole':<28} {'Kind':<8} {'Contribution'}")
    print("-" * 52)
    for c in result.contributions:
        pole = f"{_g(c.pole.real)}{c.pole.imag:+.6g}i"
        print(f"{pole:<28} {c.kind:<8} {_g(c.combined)}")


@app.command
def oracle(
    model_path: Path,
    *,
    eps: float,
    collapse: bool | None = None,
    path_cap: int | None = None,
):
    """Exact tube volume from the functional equation."""
    spray = _spray(model_path, collapse=collapse, path_cap=path_cap)
    result = spray.oracle(eps)
    print(f"V({eps!r}) = {result.combined!r}")
    for v, x in result.volumes.items():
        print(f"  vertex {v}: {x!r}")
    print(f"paths_expanded = {result.paths_expanded}")


@app.command
def sweep(
    model_path: Path,
    *,
    eps_min: float,
    eps_max: float,
    points: int = 20,
    log: bool = True,
    height: float | None = None,
    workers: int | None = None,
    out: Path | None = None,
):
    """CSV of formula against oracle over an eps grid."""
    spray = _spray(model_path, height=height, workers=workers)
    grid = (log_grid if log else linear_grid)(eps_min, eps_max, points)
    rows = run_sweep(spray, grid)
    write_csv(rows, out)
    if out is not None:
        print(f"{len(rows)} row(s) written to {out}")


@app.command
def compare(model_path: Path, *, points: int = 20, height: float | None = None):
    """Max relative error of the formula on a log grid below the validity bound."""
    spray = _spray(model_path, height=height)
    result = run_compare(spray, points)
    print(f"max_rel_err = {result.max_rel_err:.6e}")
    print(f"worst_eps = {result.worst_eps!r}")


def _configure_logging(level: str):
    try:
        threshold = logging.getLevelNamesMapping()[level.upper()]
    except KeyError:
        print(f"Unknown log level '{level}', using info", file=sys.stderr)
        threshold = logging.INFO
    structlog.configure(
        wrapper_class=structlog.make_filtering_bound_logger(threshold),
        logger_factory=structlog.PrintLoggerFactory(sys.stderr),
        cache_logger_on_first_use=False,
    )


def main(tokens: list[str] | None = None):
    config = load_config()
    _configure_logging(config.log_level)
    try:
        app(tokens, exit_on_error=False)
    except cyclopts.CycloptsError:
        print("Run 'sprays --help' for usage.", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except InvalidModel as e:
        print(e, file=sys.stderr)
        sys.exit(EXIT_INVALID)
    except SprayError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_SOLVER)
    except (ValueError, KeyError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
