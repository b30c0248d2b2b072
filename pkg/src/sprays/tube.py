"""Geometric zeta functions and the residue tube formula.

zeta_u(s) = sum_v adj(I - A(s))_uv / det(I - A(s)) * M_v(s), and for eps below the validity
bound

    V_S(eps) = sum_u sum_{omega in dims + {0..n-1}} res(zeta_u(s) * eps**(n-s); omega).
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import structlog

from sprays.dimensions import ComplexDimensionSet
from sprays.errors import (
    DegeneratePole,
    DimensionOutOfRange,
    HigherOrderPole,
    PoleCollision,
    PoleProximity,
)
from sprays.exppoly import ExpPolynomial, det_and_adjugate, identity_minus
from sprays.generators import (
    POLE_RADIUS,
    GeneratorProfile,
    check_pole,
    mellin_integer_residue,
    mellin_transform,
)
from sprays.graph import MWGraph, real_matrix_at
from sprays.spectral import SimValue, sim_value

log = structlog.get_logger()

COLLISION_RADIUS = 1e-6
DEFAULT_HEIGHT = 200.0


@dataclass(frozen=True)
class Contribution:
    pole: complex
    per_vertex: tuple[float, ...]
    combined: float
    kind: str  # "integer", "real" or "pair"


@dataclass(frozen=True)
class TubeFormulaResult:
    eps: float
    value: float
    per_vertex: dict[str, float]
    contributions: tuple[Contribution, ...]
    height: float
    within_validity_bound: bool
    discarded_imag: float


def symbolic_matrix(g: MWGraph) -> list[list[ExpPolynomial]]:
    """A(s) with exponential-polynomial entries, in vertex order."""
    size = len(g.vertices)
    terms: list[list[list[tuple[float, float]]]] = [[[] for _ in range(size)] for _ in range(size)]
    for e in g.edges:
        terms[g.index[e.source]][g.index[e.target]].append((1.0, e.ratio))
    return [[ExpPolynomial.from_terms(cell) for cell in row] for row in terms]


class ZetaSystem:
    """Everything the residue formula needs, built once per spray."""

    def __init__(
        self,
        graph: MWGraph,
        profiles: Mapping[str, GeneratorProfile],
        sim: SimValue | None = None,
    ):
        self.graph = graph
        self.profiles = {v: profiles[v] for v in graph.vertices}
        self.n = graph.space_dimension
        self.sim = sim or sim_value(graph)
        if not self.n - 1 < self.sim.value < self.n:
            raise DimensionOutOfRange(self.sim.value, self.n)
        self.det, self.adj = det_and_adjugate(identity_minus(symbolic_matrix(graph)))
        self.det_prime = self.det.derivative()

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices

    @property
    def sim_value(self) -> float:
        return self.sim.value

    def _row(self, u: str) -> int:
        try:
            return self.graph.index[u]
        except KeyError:
            raise KeyError(f"Vertex '{u}' not found") from None

    def _mellin_vector(self, s: complex) -> np.ndarray:
        return np.array([mellin_transform(self.profiles[v], s) for v in self.vertices])

    def _adj_matrix(self, s: complex) -> np.ndarray:
        return np.array([[entry.evaluate(s) for entry in row] for row in self.adj])

    def zeta_at(self, u: str, s: complex) -> complex:
        row = self._row(u)
        for v in self.vertices:
            check_pole(self.profiles[v], s)
        d = self.det.evaluate(s)
        if abs(d) <= POLE_RADIUS * abs(self.det_prime.evaluate(s)):
            raise PoleProximity(s, s - d / self.det_prime.evaluate(s))
        adj_row = np.array([entry.evaluate(s) for entry in self.adj[row]])
        return complex(adj_row @ self._mellin_vector(s) / d)

    @lru_cache(maxsize=4096)
    def _dimension_coefficients(self, omega: complex) -> np.ndarray:
        # residue of zeta_u at a simple zero omega, for every u
        for i in range(self.n + 1):
            if abs(omega - i) < COLLISION_RADIUS:
                raise PoleCollision(omega, i)
        return self._adj_matrix(omega) @ self._mellin_vector(omega) / self.det_prime.evaluate(
            omega
        )

    def residue_at_dimension(
        self, u: str, omega: complex, eps: float, multiplicity: int = 1
    ) -> complex:
        if multiplicity > 1:
            raise HigherOrderPole(omega, multiplicity)
        coef = self._dimension_coefficients(complex(omega))[self._row(u)]
        return complex(coef * cmath.exp((self.n - omega) * math.log(eps)))

    @lru_cache(maxsize=64)
    def _integer_coefficients(self, i: int) -> np.ndarray:
        d = self.det.evaluate(i).real
        if abs(d) < 1e-9:
            raise DegeneratePole(i, d)
        inv = np.linalg.inv(np.eye(len(self.vertices)) - real_matrix_at(self.graph, i))
        res = np.array([mellin_integer_residue(self.profiles[v], i) for v in self.vertices])
        return inv @ res

    def residue_at_integer(self, u: str, i: int, eps: float) -> float:
        if not 0 <= i < self.n:
            raise ValueError(f"integer pole index must lie in 0..{self.n - 1}, got {i}")
        return float(self._integer_coefficients(i)[self._row(u)] * eps ** (self.n - i))

    def integer_terms(self, eps: float) -> np.ndarray:
        """Per-vertex sum of the integer-pole residues at eps."""
        return sum(
            (self._integer_coefficients(i) * eps ** (self.n - i) for i in range(self.n)),
            np.zeros(len(self.vertices)),
        )

    def validity_bound(self) -> float:
        """r_min**(N-1) * min_u g_(1,u): the formula holds pointwise below this eps."""
        r_min = self.graph.min_ratio
        g1 = min(p.first_breakpoint for p in self.profiles.values())
        return r_min ** (len(self.vertices) - 1) * g1

    def tube_volume_formula(
        self, dims: ComplexDimensionSet, eps: float, height: float | None = None
    ) -> TubeFormulaResult:
        if eps <= 0:
            raise ValueError(f"eps must be > 0, got {eps}")
        height = dims.strip.height if height is None else height
        if height > dims.strip.height + 1e-12:
            raise ValueError(
                f"truncation height {height} exceeds the searched height {dims.strip.height}"
            )
        log_eps = math.log(eps)
        contributions: list[Contribution] = []

        for i in range(self.n):
            per_vertex = self._integer_coefficients(i) * eps ** (self.n - i)
            contributions.append(
                Contribution(complex(i), tuple(per_vertex), math.fsum(per_vertex), "integer")
            )

        discarded = []
        upper = sorted(
            (z for z in dims.within(height) if z.location.imag >= 0),
            key=lambda z: (abs(z.location.imag), -z.location.real),
        )
        for zero in upper:
            omega = zero.location
            if zero.multiplicity > 1:
                raise HigherOrderPole(omega, zero.multiplicity)
            res = self._dimension_coefficients(omega) * cmath.exp((self.n - omega) * log_eps)
            if omega.imag > 0:
                conj = omega.conjugate()
                res = res + self._dimension_coefficients(conj) * cmath.exp(
                    (self.n - conj) * log_eps
                )
                kind = "pair"
            else:
                kind = "real"
            discarded.extend(res.imag)
            per_vertex = tuple(float(x) for x in res.real)
            contributions.append(Contribution(omega, per_vertex, math.fsum(per_vertex), kind))

        per_vertex = {
            v: math.fsum(c.per_vertex[k] for c in contributions)
            for k, v in enumerate(self.vertices)
        }
        value = math.fsum(c.combined for c in contributions)
        bound = self.validity_bound()
        within = eps < bound
        if not within:
            log.warning("validity_bound_exceeded", eps=eps, bound=bound)
        discarded_imag = abs(math.fsum(discarded))
        if discarded_imag > 1e-9 * (1 + abs(value)):
            log.warning("conjugate_pairing_residual", eps=eps, imag=discarded_imag)
        log.debug("residue_series_summed", eps=eps, terms=len(contributions), value=value)
        return TubeFormulaResult(
            eps=eps,
            value=value,
            per_vertex=per_vertex,
            contributions=tuple(contributions),
            height=height,
            within_validity_bound=within,
            discarded_imag=discarded_imag,
        )


def self_similar_tube_formula(
    ratios: Sequence[float],
    profile: GeneratorProfile,
    dims: ComplexDimensionSet,
    eps: float,
    height: float | None = None,
) -> float:
    """Single-generator tube formula with zeta(s) = M(s) / (1 - sum r_j**s).

    Coded directly from the ratio list, without the graph machinery.
    """
    n = profile.space_dimension
    height = dims.strip.height if height is None else height
    logs = [math.log(r) for r in ratios]

    def moran_prime(s: complex) -> complex:
        return sum(lr * cmath.exp(lr * s) for lr in logs)

    terms = []
    for i in range(n):
        denom = 1.0 - math.fsum(r**i for r in ratios)
        terms.append(mellin_integer_residue(profile, i) / denom * eps ** (n - i))
    for zero in dims.within(height):
        omega = zero.location
        res = mellin_transform(profile, omega) / (-moran_prime(omega))
        terms.append((res * cmath.exp((n - omega) * math.log(eps))).real)
    return math.fsum(terms)
