"""Exact inner tube volumes from the functional equation.

Unrolled over paths, V_S_u(eps) = sum_alpha r(alpha)**n * V_G_t(alpha)(eps / r(alpha)). Every copy
with r(alpha) * g_t(alpha) <= eps is saturated, so

    V_S_u(eps) = Vol(S_u) + sum_{r(alpha) * g_t(alpha) > eps} r(alpha)**n * (V_G(eps/r) - Vol(G))

and the expansion stops once r(alpha) * g_max <= eps. Paths that share an end vertex and a
multiset of edge ratios contribute identically; the collapsed mode walks those classes instead of
single paths.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
import structlog
from scipy import integrate

from sprays.errors import PathBudgetExceeded
from sprays.exppoly import LatticeStructure
from sprays.generators import GeneratorProfile, tube_volume
from sprays.graph import MWGraph, enumerate_paths
from sprays.spectral import SimValue, VolumeVector, sim_value, total_volumes

log = structlog.get_logger()

DEFAULT_PATH_CAP = 10**8


@dataclass(frozen=True)
class OracleResult:
    eps: float
    volumes: dict[str, float]
    combined: float
    paths_expanded: int
    states_expanded: int
    normalized_by_eps_n: dict[str, float]
    normalized_by_scaling: dict[str, float]

    def __getitem__(self, vertex: str) -> float:
        return self.volumes[vertex]


class _Expansion:
    """Enumerates the unsaturated part of the path tree for one graph."""

    def __init__(self, g: MWGraph, profiles: Mapping[str, GeneratorProfile], sim: SimValue):
        self.g = g
        self.profiles = profiles
        self.sim = sim
        self.g_max = max(profiles[v].inradius for v in g.vertices)
        self.ratios = tuple(sorted({e.ratio for e in g.edges}, reverse=True))
        slot = {r: k for k, r in enumerate(self.ratios)}
        self.moves = {
            v: Counter((e.target, slot[e.ratio]) for e in g.edges if e.source == v)
            for v in g.vertices
        }

    def predicted(self, eps: float) -> float:
        return (self.g_max / eps) ** self.sim.value

    def collapsed(self, u: str, eps: float, cap: int) -> Iterator[tuple[str, float, int]]:
        floor = eps / self.g_max
        frontier: dict[tuple[str, tuple[int, ...]], tuple[float, int]] = {
            (u, (0,) * len(self.ratios)): (1.0, 1)
        }
        states = 0
        while frontier:
            states += len(frontier)
            if states > cap:
                raise PathBudgetExceeded(eps, self.predicted(eps), cap, "states")
            nxt: dict[tuple[str, tuple[int, ...]], tuple[float, int]] = {}
            for (v, exps), (r, count) in frontier.items():
                yield v, r, count
                for (t, k), mult in self.moves[v].items():
                    r2 = r * self.ratios[k]
                    if r2 <= floor:
                        continue
                    key = (t, exps[:k] + (exps[k] + 1,) + exps[k + 1 :])
                    prev = nxt.get(key)
                    nxt[key] = (r2, count * mult + (prev[1] if prev else 0))
            frontier = nxt

    def single(self, u: str, eps: float, cap: int) -> Iterator[tuple[str, float, int]]:
        for k, path in enumerate(enumerate_paths(self.g, u, eps / self.g_max)):
            if k >= cap:
                raise PathBudgetExceeded(eps, self.predicted(eps), cap)
            yield path.terminal, path.ratio, 1

    def volume(
        self, u: str, eps: float, total: float, collapse: bool, cap: int
    ) -> tuple[float, int, int]:
        n = self.g.space_dimension
        walk = self.collapsed if collapse else self.single
        corrections = []
        paths = states = 0
        for v, r, count in walk(u, eps, cap):
            paths += count
            states += 1
            p = self.profiles[v]
            if r * p.inradius > eps:
                corrections.append(count * r**n * (tube_volume(p, eps / r) - p.volume))
        return total + math.fsum(corrections), paths, states


def _prepare(g, profiles, sim, volumes) -> tuple[_Expansion, VolumeVector]:
    sim = sim or sim_value(g)
    volumes = volumes or total_volumes(g, profiles, sim)
    return _Expansion(g, profiles, sim), volumes


def tube_volume_oracle(
    g: MWGraph,
    profiles: Mapping[str, GeneratorProfile],
    eps: float,
    *,
    sim: SimValue | None = None,
    volumes: VolumeVector | None = None,
    collapse: bool = True,
    path_cap: int = DEFAULT_PATH_CAP,
    vertices: Sequence[str] | None = None,
) -> OracleResult:
    """Exact V_S_u(eps) for every vertex (or the listed ones); combined sums what was computed.

    path_cap bounds the enumerated paths when collapse is off. With collapse on, paths
    sharing a terminal vertex and a ratio multiset are merged and path_cap bounds the
    merged states instead; paths_expanded still reports the full path count.
    """
    if not eps > 0 or not math.isfinite(eps):
        raise ValueError(f"eps must be a positive finite number, got {eps}")
    expansion, volumes = _prepare(g, profiles, sim, volumes)
    return _evaluate(expansion, volumes, eps, collapse, path_cap, vertices or g.vertices)


def _evaluate(expansion, volumes, eps, collapse, path_cap, vertices) -> OracleResult:
    n = expansion.g.space_dimension
    d = expansion.sim.value
    out: dict[str, float] = {}
    paths = states = 0
    for u in vertices:
        value, p, s = expansion.volume(u, eps, volumes[u], collapse, path_cap)
        out[u] = value
        paths += p
        states += s
    log.debug("oracle_evaluated", eps=eps, paths=paths, states=states, collapse=collapse)
    return OracleResult(
        eps=eps,
        volumes=out,
        combined=math.fsum(out.values()),
        paths_expanded=paths,
        states_expanded=states,
        normalized_by_eps_n={u: v / eps**n for u, v in out.items()},
        normalized_by_scaling={u: v / eps ** (n - d) for u, v in out.items()},
    )


def normalized_scaling_profile(
    g: MWGraph,
    profiles: Mapping[str, GeneratorProfile],
    eps_grid: Sequence[float],
    *,
    trend: Callable[[float], Sequence[float]] | None = None,
    sim: SimValue | None = None,
    volumes: VolumeVector | None = None,
    collapse: bool = True,
    path_cap: int = DEFAULT_PATH_CAP,
) -> list[tuple[float, dict[str, float]]]:
    """(eps, W_u(eps)) on the grid, W_u = V_S_u / eps**(n - D).

    trend(eps) returns per-vertex terms, in vertex order, subtracted before scaling.
    """
    grid = [float(e) for e in eps_grid]
    if any(not (e > 0 and math.isfinite(e)) for e in grid):
        raise ValueError("eps grid must hold positive finite numbers")
    expansion, volumes = _prepare(g, profiles, sim, volumes)
    scale = g.space_dimension - expansion.sim.value
    out = []
    for eps in grid:
        res = _evaluate(expansion, volumes, eps, collapse, path_cap, g.vertices)
        shift = trend(eps) if trend is not None else [0.0] * len(g.vertices)
        out.append(
            (eps, {u: (res[u] - t) / eps**scale for u, t in zip(g.vertices, shift)})
        )
    return out


def functional_equation_residual(
    g: MWGraph, profiles: Mapping[str, GeneratorProfile], u: str, eps: float, **kwargs
) -> float:
    """V_S_u(eps) - sum_e r_e**n V_S_v(eps / r_e) - V_G_u(eps), every term from the oracle."""
    n = g.space_dimension
    lhs = tube_volume_oracle(g, profiles, eps, vertices=[u], **kwargs)[u]
    terms = [tube_volume(profiles[u], eps)]
    for k in g.out_edges[u]:
        e = g.edges[k]
        terms.append(
            e.ratio**n
            * tube_volume_oracle(g, profiles, eps / e.ratio, vertices=[e.target], **kwargs)[
                e.target
            ]
        )
    return lhs - math.fsum(terms)


def kink_points(
    g: MWGraph, profiles: Mapping[str, GeneratorProfile], u: str, lo: float, hi: float
) -> list[float]:
    """Sorted eps in (lo, hi) where V_S_u changes polynomial: r(alpha) * g_(m, t(alpha))."""
    expansion = _Expansion(g, profiles, SimValue(0.0, 0.0, 0.0))
    kinks = set()
    for v, r, _ in expansion.collapsed(u, lo, DEFAULT_PATH_CAP):
        for b in profiles[v].breakpoints:
            if lo < r * b < hi:
                kinks.add(r * b)
    return sorted(kinks)


def _piecewise_quad(f: Callable[[float], float], s: complex, n: int, points: list[float]):
    # integral of f(eps) * eps**(s - n - 1) over [points[0], points[-1]] in x = log(eps)
    def integrand(x, part):
        val = f(math.exp(x)) * cmath.exp(x * (s - n))
        return val.real if part == "re" else val.imag

    total = 0j
    for a, b in zip(points, points[1:]):
        la, lb = math.log(a), math.log(b)
        re, im = (
            integrate.quad(integrand, la, lb, args=(part,), epsabs=1e-13, epsrel=1e-11)[0]
            for part in ("re", "im")
        )
        total += complex(re, im)
    return total


def oracle_mellin(
    g: MWGraph,
    profiles: Mapping[str, GeneratorProfile],
    u: str,
    s: complex,
    *,
    lattice: LatticeStructure | None = None,
    lower: float = 1e-6,
    sim: SimValue | None = None,
    volumes: VolumeVector | None = None,
) -> complex:
    """Mellin transform of V_S_u(eps) / eps**n evaluated on the oracle, for D < Re(s) < n.

    Between kinks the oracle is a sum of polynomials and is integrated by quadrature; above g_max
    it is the constant Vol(S_u). Lattice systems close the region near zero with the per-period
    integrals, which form geometric sequences: one ratio per root z = exp(-lam * omega) of the
    lattice polynomial and one per integer pole below n. Non-lattice systems assume
    constant W below `lower`.
    """
    n = g.space_dimension
    expansion, volumes = _prepare(g, profiles, sim, volumes)
    d = expansion.sim.value
    if not d < s.real < n:
        raise ValueError(f"Mellin check needs {d:.6g} < Re(s) < {n}, got {s}")
    g_max = expansion.g_max
    vol = volumes[u]

    def f(eps):
        return expansion.volume(u, eps, vol, True, DEFAULT_PATH_CAP)[0]

    above = vol * cmath.exp((s - n) * math.log(g_max)) / (n - s)

    if lattice is None:
        cut = lower * g_max
        points = [cut, *kink_points(g, profiles, u, cut, g_max), g_max]
        w = f(cut) / cut ** (n - d)
        below = w * cmath.exp((s - d) * math.log(cut)) / (s - d)
        return _piecewise_quad(f, s, n, points) + below + above

    multipliers: list[complex] = []
    for z in [*_distinct_roots(lattice), *(math.exp(-lattice.lam * i) for i in range(n))]:
        if all(abs(z - w) > 1e-9 for w in multipliers):
            multipliers.append(complex(z))
    m = len(multipliers)
    step = math.exp(lattice.lam)
    bound = g.min_ratio ** (len(g.vertices) - 1) * min(
        profiles[v].first_breakpoint for v in g.vertices
    )
    cut = bound / step**m
    edges = [cut * step**j for j in range(m + 1)]
    kinks = kink_points(g, profiles, u, cut, g_max)

    periods = []
    for a, b in zip(edges, edges[1:]):
        periods.append(_piecewise_quad(f, s, n, [a, *(k for k in kinks if a < k < b), b]))
    middle = _piecewise_quad(f, s, n, [edges[-1], *(k for k in kinks if k > edges[-1]), g_max])

    # one period down multiplies the family of root z by exp(-lam * s) / z
    rho = np.array([cmath.exp(-lattice.lam * s) / z for z in multipliers])
    vander = np.array([[r ** (-j) for r in rho] for j in range(m)])
    amplitudes = np.linalg.solve(vander, np.array(periods))
    below = complex(np.sum(amplitudes * rho / (1 - rho)))
    return sum(periods) + middle + below + above


def _distinct_roots(lattice: LatticeStructure) -> list[complex]:
    poly = np.trim_zeros(lattice.polynomial())
    roots: list[complex] = []
    for z in (np.roots(poly[::-1]) if poly.size > 1 else []):
        if all(abs(z - w) > 1e-7 for w in roots):
            roots.append(complex(z))
    return roots
