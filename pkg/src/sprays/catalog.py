"""Built-in models, ready for tests and `sprays init`."""

from __future__ import annotations

import math
from collections.abc import Callable

from sprays.generators import GeneratorProfile, Piece
from sprays.graph import Edge, MWGraph
from sprays.loader import SprayModel

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


def worked_example() -> SprayModel:
    """Two vertices in the plane: a square generator at 1 and a triangle generator at 2."""
    edges = (
        *(Edge("1", "2", 0.5) for _ in range(4)),
        Edge("2", "1", 0.5),
        Edge("2", "2", 0.5),
        *(Edge("2", "2", 0.25) for _ in range(3)),
    )
    square = GeneratorProfile.monophase(2, (-4.0, 4 * SQRT2), SQRT2 / 2, 2.0)
    triangle = GeneratorProfile.monophase(
        2, (-(3 + 2 * SQRT2), (2 + SQRT2) / 2), (2 - SQRT2) / 4, 0.125
    )
    return SprayModel(
        graph=MWGraph(("1", "2"), edges, 2),
        profiles={"1": square, "2": triangle},
        name="worked",
    )


def cantor_string() -> SprayModel:
    """Middle-third Cantor string: one vertex, two maps of ratio 1/3, the middle interval."""
    third = 1 / 3
    return SprayModel(
        graph=MWGraph(("1",), (Edge("1", "1", third), Edge("1", "1", third)), 1),
        profiles={"1": GeneratorProfile.monophase(1, (2.0,), 1 / 6, third)},
        hulls={"1": (0.0, 2.0)},
        name="cantor",
    )


def sierpinski_gasket() -> SprayModel:
    """Unit gasket: the removed middle triangle of side 1/2, copied by three maps of ratio 1/2."""
    triangle = GeneratorProfile.monophase(2, (-3 * SQRT3, 1.5), 1 / (4 * SQRT3), SQRT3 / 16)
    return SprayModel(
        graph=MWGraph(("1",), tuple(Edge("1", "1", 0.5) for _ in range(3)), 2),
        profiles={"1": triangle},
        hulls={"1": (0.0, 3.0, math.pi)},
        name="gasket",
    )


def pluriphase_sample() -> SprayModel:
    """Generator made of two intervals of lengths 1 and 1/3, two maps of ratio 1/4."""
    profile = GeneratorProfile(
        1,
        (Piece(1 / 6, (4.0, 0.0)), Piece(0.5, (2.0, 1 / 3))),
        4 / 3,
    )
    return SprayModel(
        graph=MWGraph(("1",), (Edge("1", "1", 0.25), Edge("1", "1", 0.25)), 1),
        profiles={"1": profile},
        name="pluriphase",
    )


CATALOG: dict[str, Callable[[], SprayModel]] = {
    "worked": worked_example,
    "cantor": cantor_string,
    "gasket": sierpinski_gasket,
    "pluriphase": pluriphase_sample,
}


def get_example(name: str) -> SprayModel:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"Example '{name}' not found; choose from {', '.join(CATALOG)}") from None
