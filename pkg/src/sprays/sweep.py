"""Formula against oracle over an eps grid, and the CSV it is reported in."""

from __future__ import annotations

import csv
import io
import math
import sys
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np
import structlog

from sprays.spray import Spray

log = structlog.get_logger()

CSV_HEADER = ("eps", "v_formula", "v_oracle", "abs_err", "rel_err", "within_bound")


@dataclass(frozen=True)
class SweepRow:
    eps: float
    v_formula: float
    v_oracle: float
    within_bound: bool

    @property
    def abs_err(self) -> float:
        return abs(self.v_formula - self.v_oracle)

    @property
    def rel_err(self) -> float:
        return self.abs_err / abs(self.v_oracle) if self.v_oracle else math.inf


@dataclass(frozen=True)
class Comparison:
    max_rel_err: float
    worst_eps: float
    rows: tuple[SweepRow, ...]


def log_grid(lo: float, hi: float, points: int) -> list[float]:
    _check_grid(lo, hi, points)
    if lo <= 0:
        raise ValueError(f"log grid needs lo > 0, got {lo}")
    return [float(x) for x in np.geomspace(lo, hi, points)]


def linear_grid(lo: float, hi: float, points: int) -> list[float]:
    _check_grid(lo, hi, points)
    return [float(x) for x in np.linspace(lo, hi, points)]


def _check_grid(lo: float, hi: float, points: int):
    if points < 1:
        raise ValueError(f"points must be >= 1, got {points}")
    if points > 1 and not lo < hi:
        raise ValueError(f"grid needs lo < hi, got {lo} and {hi}")


def sweep(
    spray: Spray,
    eps_grid: Sequence[float],
    height: float | None = None,
    workers: int | None = None,
) -> list[SweepRow]:
    """One row per grid point, in grid order."""
    grid = sorted(set(float(e) for e in eps_grid))
    workers = workers or spray.settings.workers
    start = time.perf_counter()
    # the shared caches are filled before any worker thread starts
    spray.dimensions(height)
    spray.volumes()

    def row(eps: float) -> SweepRow:
        formula = spray.tube(eps, height)
        return SweepRow(
            eps=eps,
            v_formula=formula.value,
            v_oracle=spray.oracle(eps).combined,
            within_bound=formula.within_validity_bound,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, grid))
    else:
        rows = [row(eps) for eps in grid]
    log.info(
        "sweep_finished",
        points=len(rows),
        workers=workers,
        duration_ms=round((time.perf_counter() - start) * 1000),
    )
    return rows


def compare(spray: Spray, points: int = 20, height: float | None = None) -> Comparison:
    """Max relative error on points log-spaced eps in (1e-3 * bound, bound)."""
    bound = spray.validity_bound()
    # open interval: the end points are pulled in by half a grid step
    step = 1e-3 ** (1 / (2 * points))
    rows = sweep(spray, log_grid(1e-3 * bound / step, bound * step, points), height)
    worst = max(rows, key=lambda r: r.rel_err)
    return Comparison(max_rel_err=worst.rel_err, worst_eps=worst.eps, rows=tuple(rows))


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_csv(rows: Sequence[SweepRow], out: str | Path | TextIO | None = None):
    """Exact header, 17 significant digits, rows in increasing eps."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in sorted(rows, key=lambda r: r.eps):
        writer.writerow(
            [
                _fmt(r.eps),
                _fmt(r.v_formula),
                _fmt(r.v_oracle),
                _fmt(r.abs_err),
                _fmt(r.rel_err),
                "true" if r.within_bound else "false",
            ]
        )
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    elif isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)
