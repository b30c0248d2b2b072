import math

import numpy as np
import pytest

from sprays.dimensions import find_complex_dimensions
from sprays.errors import DegeneratePole, DimensionOutOfRange, HigherOrderPole, PoleCollision
from sprays.generators import GeneratorProfile, mellin_transform
from sprays.graph import Edge, MWGraph, matrix_at
from sprays.oracle import tube_volume_oracle
from sprays.tube import ZetaSystem, self_similar_tube_formula


@pytest.fixture(scope="module")
def worked_zeta():
    from sprays.catalog import worked_example

    model = worked_example()
    zeta = ZetaSystem(model.graph, model.profiles)
    dims = find_complex_dimensions(zeta.det, 200.0, right=(zeta.sim_value + zeta.n) / 2)
    return model, zeta, dims


@pytest.fixture(scope="module")
def cantor_zeta():
    from sprays.catalog import cantor_string

    model = cantor_string()
    zeta = ZetaSystem(model.graph, model.profiles)
    dims = find_complex_dimensions(zeta.det, 200.0, right=(zeta.sim_value + zeta.n) / 2)
    return model, zeta, dims


def test_validity_bound(worked_zeta, cantor_zeta):
    assert worked_zeta[1].validity_bound() == pytest.approx((2 - math.sqrt(2)) / 16, abs=1e-12)
    assert worked_zeta[1].validity_bound() == pytest.approx(0.0366116, abs=1e-7)
    assert cantor_zeta[1].validity_bound() == pytest.approx(1 / 6, abs=1e-12)


def test_zeta_matches_linear_solve(worked_zeta):
    model, zeta, _ = worked_zeta
    for s in (1.9 + 0j, 0.7 + 3.1j, -0.4 - 12j):
        m = np.eye(2) - matrix_at(model.graph, s)
        mellin = np.array([mellin_transform(model.profiles[v], s) for v in ("1", "2")])
        expected = np.linalg.solve(m, mellin)
        assert zeta.zeta_at("1", s) == pytest.approx(expected[0], rel=1e-10)
        assert zeta.zeta_at("2", s) == pytest.approx(expected[1], rel=1e-10)


def test_zeta_conjugate_symmetry(worked_zeta):
    _, zeta, _ = worked_zeta
    s = 1.3 + 7.7j
    assert zeta.zeta_at("2", s.conjugate()) == pytest.approx(zeta.zeta_at("2", s).conjugate())


def test_zeta_unknown_vertex(worked_zeta):
    with pytest.raises(KeyError):
        worked_zeta[1].zeta_at("9", 1.5 + 0j)


def test_cantor_integer_residue(cantor_zeta):
    _, zeta, _ = cantor_zeta
    for eps in (0.01, 0.05, 0.1):
        assert zeta.residue_at_integer("1", 0, eps) == pytest.approx(-2 * eps)


def test_worked_integer_residues(worked_zeta):
    model, zeta, _ = worked_zeta
    eps = 0.02
    # (I - A(0))^-1 [kappa_0] and (I - A(1))^-1 [kappa_1]
    k0 = np.array([-4.0, -(3 + 2 * math.sqrt(2))])
    k1 = np.array([4 * math.sqrt(2), (2 + math.sqrt(2)) / 2])
    r0 = np.linalg.solve(np.array([[1.0, -4.0], [-1.0, -3.0]]), k0) * eps**2
    r1 = np.linalg.solve(np.array([[1.0, -2.0], [-0.5, -0.25]]), k1) * eps
    assert zeta.residue_at_integer("1", 0, eps) == pytest.approx(r0[0])
    assert zeta.residue_at_integer("2", 1, eps) == pytest.approx(r1[1])


def test_residue_at_dimension_conjugates(worked_zeta):
    _, zeta, dims = worked_zeta
    omega = next(z.location for z in dims if z.location.imag > 0)
    a = zeta.residue_at_dimension("1", omega, 0.01)
    b = zeta.residue_at_dimension("1", omega.conjugate(), 0.01)
    assert b == pytest.approx(a.conjugate())


def test_residue_at_sim_value_is_real_and_positive(cantor_zeta):
    _, zeta, dims = cantor_zeta
    res = zeta.residue_at_dimension("1", dims.rightmost.location, 0.01)
    assert abs(res.imag) < 1e-14
    assert res.real > 0


def test_higher_order_pole_refused(worked_zeta):
    _, zeta, dims = worked_zeta
    with pytest.raises(HigherOrderPole):
        zeta.residue_at_dimension("1", dims.rightmost.location, 0.01, multiplicity=2)


def test_pole_collision(worked_zeta):
    with pytest.raises(PoleCollision):
        worked_zeta[1].residue_at_dimension("1", 1.0 + 1e-8j, 0.01)


def test_formula_matches_oracle_worked(worked_zeta):
    model, zeta, dims = worked_zeta
    for eps in (0.03, 0.01, 0.002):
        formula = zeta.tube_volume_formula(dims, eps)
        exact = tube_volume_oracle(model.graph, model.profiles, eps)
        assert formula.within_validity_bound
        assert formula.value == pytest.approx(exact.combined, rel=1e-3)
        for v in ("1", "2"):
            assert formula.per_vertex[v] == pytest.approx(exact[v], rel=1e-3)


def test_formula_matches_oracle_cantor(cantor_zeta):
    model, zeta, dims = cantor_zeta
    for eps in np.geomspace(2e-4, 0.16, 9):
        formula = zeta.tube_volume_formula(dims, float(eps))
        exact = tube_volume_oracle(model.graph, model.profiles, float(eps))
        assert formula.value == pytest.approx(exact.combined, rel=1e-3)


def test_formula_sums(worked_zeta):
    _, zeta, dims = worked_zeta
    result = zeta.tube_volume_formula(dims, 0.01)
    assert result.value == pytest.approx(sum(result.per_vertex.values()), rel=1e-14)
    assert result.value == pytest.approx(math.fsum(c.combined for c in result.contributions))
    assert result.discarded_imag < 1e-12
    kinds = [c.kind for c in result.contributions]
    assert kinds[:2] == ["integer", "integer"]
    assert kinds.count("real") == 1


def test_contributions_ordered_by_height(worked_zeta):
    _, zeta, dims = worked_zeta
    result = zeta.tube_volume_formula(dims, 0.01, height=50.0)
    heights = [abs(c.pole.imag) for c in result.contributions if c.kind != "integer"]
    assert heights == sorted(heights)
    assert max(heights) <= 50.0


def test_outside_validity_bound_flagged(worked_zeta):
    _, zeta, dims = worked_zeta
    assert not zeta.tube_volume_formula(dims, 0.05).within_validity_bound


def test_height_above_search_rejected(worked_zeta):
    _, zeta, dims = worked_zeta
    with pytest.raises(ValueError):
        zeta.tube_volume_formula(dims, 0.01, height=400.0)


def test_truncation_improves_with_height(worked_zeta):
    model, zeta, dims = worked_zeta
    grid = np.geomspace(1e-4, 0.03, 6)
    exact = [tube_volume_oracle(model.graph, model.profiles, float(e)).combined for e in grid]
    errors = []
    for t in (50.0, 100.0, 200.0):
        formula = [zeta.tube_volume_formula(dims, float(e), height=t).value for e in grid]
        errors.append(max(abs(f - x) for f, x in zip(formula, exact)))
    assert errors[0] >= errors[1] - 1e-12
    assert errors[1] >= errors[2] - 1e-12


def test_self_similar_reduction(cantor_zeta):
    model, zeta, dims = cantor_zeta
    for eps in (0.001, 0.01, 0.1):
        graph_value = zeta.tube_volume_formula(dims, eps).value
        direct = self_similar_tube_formula([1 / 3, 1 / 3], model.profiles["1"], dims, eps)
        assert direct == pytest.approx(graph_value, abs=1e-10)


def test_dimension_out_of_range():
    g = MWGraph(("a",), (Edge("a", "a", 1 / 3), Edge("a", "a", 1 / 3)), 2)
    profile = GeneratorProfile.monophase(2, (-1.0, 1.0), 0.5, 0.25)
    with pytest.raises(DimensionOutOfRange):
        ZetaSystem(g, {"a": profile})


def test_degenerate_integer_pole():
    edges = (
        Edge("a", "a", 0.1),
        Edge("a", "a", 0.1),
        Edge("a", "b", 0.1),
        Edge("b", "b", 0.1),
        Edge("b", "b", 0.1),
        Edge("b", "a", 0.1),
    )
    g = MWGraph(("a", "b"), edges, 1)
    profile = GeneratorProfile.monophase(1, (2.0,), 0.5, 1.0)
    zeta = ZetaSystem(g, {"a": profile, "b": profile})
    with pytest.raises(DegeneratePole):
        zeta.residue_at_integer("a", 0, 0.01)


def test_residue_envelope_decays(worked_zeta):
    _, zeta, _ = worked_zeta
    period = 2 * math.pi / math.log(2)
    d = zeta.sim_value
    scaled = [
        abs(zeta.residue_at_dimension("1", complex(d, k * period), 0.01)) * k for k in range(1, 21)
    ]
    # |res_k| * k stays bounded and does not grow over the second half
    assert max(scaled[10:]) <= max(scaled[:10])
