"""Mauldin-Williams graphs: validation, the matrix A(s), weighted path enumeration."""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from sprays.errors import InvalidRatioThreshold
from sprays.validation import ValidationReport


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    ratio: float


@dataclass(frozen=True)
class Path:
    start: str
    edges: tuple[int, ...]
    ratio: float
    terminal: str

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class MWGraph:
    """Weighted directed multigraph. Parallel edges are kept as separate entries."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    space_dimension: int = 1

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def out_edges(self) -> dict[str, tuple[int, ...]]:
        out: dict[str, list[int]] = {v: [] for v in self.vertices}
        for k, e in enumerate(self.edges):
            if e.source in out:
                out[e.source].append(k)
        return {v: tuple(ks) for v, ks in out.items()}

    @property
    def min_ratio(self) -> float:
        return min(e.ratio for e in self.edges)

    def edges_between(self, u: str, v: str) -> list[Edge]:
        return [e for e in self.edges if e.source == u and e.target == v]

    def permuted(self, order: list[str]) -> MWGraph:
        return MWGraph(tuple(order), self.edges, self.space_dimension)


def validate_graph(g: MWGraph) -> ValidationReport:
    """List every violation; an empty report means the graph is usable."""
    report = ValidationReport()
    if g.space_dimension < 1:
        report.add("DimensionMismatch", f"space dimension must be >= 1, got {g.space_dimension}")
    if not g.vertices:
        report.add("EmptyOutgoing", "graph has no vertices")
        return report
    if len(set(g.vertices)) != len(g.vertices):
        report.add("UnknownVertex", "duplicate vertex identifiers")

    known = set(g.vertices)
    for k, e in enumerate(g.edges):
        for end in (e.source, e.target):
            if end not in known:
                report.add("UnknownVertex", f"edge refers to unknown vertex '{end}'", f"edge {k}")
        if not (0.0 < e.ratio < 1.0) or math.isnan(e.ratio):
            report.add(
                "RatioOutOfRange", f"ratio {e.ratio!r} is not in (0, 1)", f"edge {k}"
            )

    for v in g.vertices:
        if not g.out_edges[v]:
            report.add("EmptyOutgoing", f"vertex '{v}' has no outgoing edge", v)

    unreached = _unreachable(g)
    if unreached:
        names = ", ".join(sorted(unreached))
        report.add(
            "NotStronglyConnected",
            f"not strongly connected; no round trip between '{g.vertices[0]}' and {names}",
        )
    return report


def _unreachable(g: MWGraph) -> set[str]:
    # forward and backward sweeps from the first vertex
    known = set(g.vertices)
    fwd: dict[str, set[str]] = {v: set() for v in g.vertices}
    bwd: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        if e.source in known and e.target in known:
            fwd[e.source].add(e.target)
            bwd[e.target].add(e.source)

    def sweep(adj):
        seen = {g.vertices[0]}
        stack = [g.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    return (known - sweep(fwd)) | (known - sweep(bwd))


def matrix_at(g: MWGraph, s: complex) -> np.ndarray:
    """A(s) with a_uv(s) = sum of r_e**s over the edges u -> v, in vertex order."""
    n = len(g.vertices)
    a = np.zeros((n, n), dtype=complex)
    for e in g.edges:
        a[g.index[e.source], g.index[e.target]] += np.exp(s * math.log(e.ratio))
    return a


def real_matrix_at(g: MWGraph, s: float) -> np.ndarray:
    n = len(g.vertices)
    a = np.zeros((n, n))
    for e in g.edges:
        a[g.index[e.source], g.index[e.target]] += e.ratio**s
    return a


def enumerate_paths(g: MWGraph, u: str, min_ratio: float) -> Iterator[Path]:
    """Depth-first stream of every path from u with ratio strictly above min_ratio.

    The empty path at u is yielded first.
    """
    if not min_ratio > 0:
        raise InvalidRatioThreshold(
            f"min_ratio must be > 0 (got {min_ratio}); the enumeration would be infinite"
        )
    if u not in g.index:
        raise KeyError(f"Vertex '{u}' not found")
    return _walk(g, u, min_ratio)


def _walk(g: MWGraph, u: str, min_ratio: float) -> Iterator[Path]:
    stack: list[tuple[str, tuple[int, ...], float]] = [(u, (), 1.0)]
    while stack:
        vertex, edges, ratio = stack.pop()
        if ratio <= min_ratio:
            continue
        yield Path(start=u, edges=edges, ratio=ratio, terminal=vertex)
        # reversed so the first outgoing edge is explored first
        for k in reversed(g.out_edges[vertex]):
            e = g.edges[k]
            stack.append((e.target, edges + (k,), ratio * e.ratio))


def concatenate(first: Path, second: Path) -> Path:
    if first.terminal != second.start:
        raise ValueError(f"paths do not chain: {first.terminal} != {second.start}")
    return Path(
        start=first.start,
        edges=first.edges + second.edges,
        ratio=first.ratio * second.ratio,
        terminal=second.terminal,
    )
