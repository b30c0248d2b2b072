"""Sim-value, Perron vector and total spray volumes."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
import structlog

from sprays.errors import InfiniteVolume, NonConvergence, NotIrreducible
from sprays.generators import GeneratorProfile
from sprays.graph import MWGraph, real_matrix_at

log = structlog.get_logger()

MAX_ITERATIONS = 100_000


@dataclass(frozen=True)
class SimValue:
    value: float
    bracket_width: float
    residual: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class VolumeVector:
    vertices: tuple[str, ...]
    values: np.ndarray

    def __getitem__(self, vertex: str) -> float:
        return float(self.values[self.vertices.index(vertex)])

    def as_dict(self) -> dict[str, float]:
        return {v: float(x) for v, x in zip(self.vertices, self.values)}

    @property
    def total(self) -> float:
        return float(self.values.sum())


def _power_iteration(
    a: np.ndarray, tol: float, start: np.ndarray | None = None, max_iter: int = MAX_ITERATIONS
) -> tuple[float, np.ndarray]:
    # iterate on A + I: same Perron vector, and primitive even when A is periodic
    b = a + np.eye(a.shape[0])
    x = np.full(a.shape[0], 1.0 / a.shape[0]) if start is None else np.asarray(start, float)
    x = x / x.sum()
    mu = np.inf
    for _ in range(max_iter):
        y = b @ x
        mu_new = y.sum()
        y = y / mu_new
        if abs(mu_new - mu) < tol / 10 and np.abs(y - x).sum() < max(tol, 1e-14):
            return mu_new - 1.0, y
        x, mu = y, mu_new
    raise NonConvergence("power iteration", max_iter)


def spectral_radius(a: np.ndarray, tol: float = 1e-13) -> float:
    """Spectral radius of a small nonnegative irreducible matrix."""
    rho, _ = _power_iteration(np.asarray(a, dtype=float), tol)
    return rho


def sim_value(g: MWGraph, tol: float = 1e-12) -> SimValue:
    """Unique s >= 0 with rho(A(s)) = 1, by bisection on the decreasing spectral radius."""

    def rho(s: float) -> float:
        return spectral_radius(real_matrix_at(g, s), tol=tol)

    lo, hi = 0.0, float(g.space_dimension)
    if abs(rho(lo) - 1.0) <= tol:
        return SimValue(0.0, 0.0, abs(rho(lo) - 1.0))
    while rho(hi) >= 1.0:
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise NonConvergence("sim-value bracket expansion", int(np.log2(hi)))

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        r = rho(mid)
        if r > 1.0:
            lo = mid
        else:
            hi = mid
    d = 0.5 * (lo + hi)
    result = SimValue(value=d, bracket_width=hi - lo, residual=abs(rho(d) - 1.0))
    log.debug("sim_value_found", value=d, residual=result.residual)
    return result


def perron_vector(
    g: MWGraph, d: float, start: np.ndarray | None = None, tol: float = 1e-14
) -> np.ndarray:
    """Positive eigenvector of A(D) for eigenvalue 1, normalized to unit 1-norm."""
    _, p = _power_iteration(real_matrix_at(g, d), tol, start=start)
    if np.any(p <= 0):
        raise NotIrreducible(f"Perron vector has non-positive entries: {p}")
    return p


def total_volumes(
    g: MWGraph,
    profiles: Mapping[str, GeneratorProfile],
    sim: SimValue | None = None,
) -> VolumeVector:
    """Solve (I - A(n)) x = [Vol(G_u)], the summed Neumann series of path contributions."""
    n = g.space_dimension
    sim = sim or sim_value(g)
    if sim.value >= n:
        raise InfiniteVolume(sim.value, n)
    vol_g = np.array([profiles[v].volume for v in g.vertices])
    m = np.eye(len(g.vertices)) - real_matrix_at(g, n)
    x = np.linalg.solve(m, vol_g)
    return VolumeVector(g.vertices, x)
