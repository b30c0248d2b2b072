"""Model files: JSON description of a graph, its generators and solver settings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import structlog

from sprays.generators import GeneratorProfile, Piece, validate_profile
from sprays.graph import Edge, MWGraph, validate_graph
from sprays.validation import ValidationReport

log = structlog.get_logger()


@dataclass(frozen=True)
class SprayModel:
    graph: MWGraph
    profiles: dict[str, GeneratorProfile]
    settings: dict[str, Any] = field(default_factory=dict)
    hulls: dict[str, tuple[float, ...]] = field(default_factory=dict)
    name: str = ""

    @property
    def space_dimension(self) -> int:
        return self.graph.space_dimension


class _Malformed(Exception):
    def __init__(self, kind: str, message: str, where: str | None = None):
        super().__init__(message)
        self.kind = kind
        self.where = where


def parse_number(value: Any, where: str | None = None) -> float:
    """A JSON number or an exact string such as "1/3" or "0.125"."""
    if isinstance(value, bool):
        raise _Malformed("MalformedModel", f"expected a number, got {value!r}", where)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise _Malformed("MalformedModel", f"expected a number, got {value!r}", where)


def validate_model(model: SprayModel) -> ValidationReport:
    g = model.graph
    report = validate_graph(g)
    for v in g.vertices:
        p = model.profiles.get(v)
        if p is None:
            report.add("MissingGenerator", f"vertex '{v}' has no generator", v)
            continue
        if p.space_dimension != g.space_dimension:
            report.add(
                "DimensionMismatch",
                f"generator is {p.space_dimension}-dimensional, graph is {g.space_dimension}",
                v,
            )
            continue
        report.extend(validate_profile(p, v))
    for v in model.profiles:
        if v not in g.index:
            report.add("UnknownVertex", f"generator given for unknown vertex '{v}'", v)
    for v, hull in model.hulls.items():
        if v not in g.index:
            report.add("UnknownVertex", f"hull given for unknown vertex '{v}'", v)
        elif len(hull) != g.space_dimension + 1:
            report.add(
                "CoefficientCount",
                f"hull has {len(hull)} coefficients, expected {g.space_dimension + 1}",
                v,
            )
    return report


def _require(data: dict, key: str, where: str | None = None):
    if not isinstance(data, dict) or key not in data:
        raise _Malformed("MalformedModel", f"missing key '{key}'", where)
    return data[key]


def _parse_profile(v: str, entry: Any, n: int) -> GeneratorProfile:
    pieces = []
    for m, piece in enumerate(_require(entry, "pieces", v)):
        where = f"{v}: piece {m + 1}"
        coefs = _require(piece, "coefficients", where)
        if not isinstance(coefs, list):
            raise _Malformed("MalformedModel", "coefficients must be a list", where)
        pieces.append(
            Piece(
                parse_number(_require(piece, "breakpoint", where), where),
                tuple(parse_number(c, where) for c in coefs),
            )
        )
    return GeneratorProfile(n, tuple(pieces), parse_number(_require(entry, "volume", v), v))


def parse_model(data: dict, name: str = "") -> tuple[SprayModel | None, ValidationReport]:
    """Build a model from decoded JSON; structural problems come back as violations."""
    report = ValidationReport()
    try:
        n = int(_require(data, "space_dimension"))
        vertices = tuple(str(v) for v in _require(data, "vertices"))
        edges = []
        for k, e in enumerate(_require(data, "edges")):
            where = f"edge {k}"
            edges.append(
                Edge(
                    str(_require(e, "from", where)),
                    str(_require(e, "to", where)),
                    parse_number(_require(e, "ratio", where), where),
                )
            )
        profiles = {}
        for v, entry in _require(data, "generators").items():
            try:
                profiles[str(v)] = _parse_profile(str(v), entry, n)
            except _Malformed as e:
                report.add(e.kind, str(e), e.where)
        hulls = {
            str(v): tuple(parse_number(c, str(v)) for c in coefs)
            for v, coefs in data.get("hulls", {}).items()
        }
    except _Malformed as e:
        report.add(e.kind, str(e), e.where)
        return None, report
    except (TypeError, ValueError, AttributeError) as e:
        report.add("MalformedModel", f"malformed model: {e}")
        return None, report

    model = SprayModel(
        graph=MWGraph(vertices, tuple(edges), n),
        profiles=profiles,
        settings=dict(data.get("settings", {})),
        hulls=hulls,
        name=name or str(data.get("name", "")),
    )
    report.extend(validate_model(model))
    return model, report


def load_model(path: str | Path) -> SprayModel:
    """Read and validate a JSON model file; raises InvalidModel listing every violation."""
    path = Path(path)
    report = ValidationReport()
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        report.add("MalformedModel", f"cannot read {path.name}: {e}", str(path))
        report.raise_for_violations()
    model, report = parse_model(data, name=path.stem)
    report.raise_for_violations()
    log.info(
        "model_loaded",
        path=str(path),
        vertices=len(model.graph.vertices),
        edges=len(model.graph.edges),
    )
    return model


def _plain(x: float) -> float | int:
    return int(x) if math.isfinite(x) and x == int(x) else x


def dump_model(model: SprayModel) -> dict:
    g = model.graph
    out: dict[str, Any] = {
        "name": model.name,
        "space_dimension": g.space_dimension,
        "vertices": list(g.vertices),
        "edges": [{"from": e.source, "to": e.target, "ratio": _ratio(e.ratio)} for e in g.edges],
        "generators": {
            v: {
                "pieces": [
                    {
                        "breakpoint": p.breakpoint,
                        "coefficients": [_plain(c) for c in p.coefficients],
                    }
                    for p in prof.pieces
                ],
                "volume": prof.volume,
            }
            for v, prof in model.profiles.items()
        },
    }
    if model.hulls:
        out["hulls"] = {v: list(h) for v, h in model.hulls.items()}
    if model.settings:
        out["settings"] = dict(model.settings)
    return out


def _ratio(r: float) -> str | float:
    # exact strings keep lattice detection away from decimal noise
    f = Fraction(r).limit_denominator(10**6)
    return f"{f.numerator}/{f.denominator}" if float(f) == r else r
