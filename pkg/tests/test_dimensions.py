import math

import numpy as np
import pytest

from sprays.dimensions import (
    Rectangle,
    count_zeros_in_rectangle,
    find_complex_dimensions,
    hausdorff_distance,
)
from sprays.exppoly import ExpPolynomial, det_and_adjugate, identity_minus
from sprays.tube import symbolic_matrix

SQRT29 = math.sqrt(29)
D = math.log2((SQRT29 + 1) / 2)
RIGHT = (D + 2) / 2
D_PRIME = math.log2((SQRT29 - 1) / 2)
PERIOD = 2 * math.pi / math.log(2)


@pytest.fixture
def worked_det(worked):
    det, _ = det_and_adjugate(identity_minus(symbolic_matrix(worked.graph)))
    return det


def expected_worked_zeros(height):
    out = []
    for k in range(-10, 11):
        if abs(k * PERIOD) <= height:
            out.append(complex(D, k * PERIOD))
        if abs((k + 0.5) * PERIOD) <= height:
            out.append(complex(D_PRIME, (k + 0.5) * PERIOD))
    return out


@pytest.mark.parametrize("height, count", [(20.0, 9), (30.0, 13)])
def test_worked_lattice_zeros(worked_det, height, count):
    found = find_complex_dimensions(worked_det, height, right=RIGHT)
    assert found.method == "lattice"
    assert len(found) == count
    for z in expected_worked_zeros(height):
        assert np.min(np.abs(found.locations - z)) < 1e-9
    assert found.base_real_parts == pytest.approx((D, D_PRIME), abs=1e-9)
    assert found.lattice.period == pytest.approx(PERIOD)


def test_worked_generic_agrees_with_lattice(worked_det):
    lattice = find_complex_dimensions(worked_det, 30.0, right=RIGHT, method="lattice")
    generic = find_complex_dimensions(worked_det, 30.0, right=RIGHT, method="generic")
    assert generic.method == "generic"
    assert len(generic) == 13
    assert hausdorff_distance(lattice, generic) < 1e-8


def test_zeros_are_conjugate_symmetric(worked_det):
    found = find_complex_dimensions(worked_det, 50.0, right=RIGHT)
    locs = set(np.round(found.locations, 9))
    assert all(complex(z).conjugate() in locs for z in locs)


def test_rightmost_is_sim_value(worked_det):
    found = find_complex_dimensions(worked_det, 30.0, right=RIGHT)
    assert found.rightmost.location == pytest.approx(D, abs=1e-12)


def test_non_lattice_generic():
    det = ExpPolynomial.from_terms([(1.0, 1.0), (-1.0, 0.5), (-1.0, 1 / 3)])
    found = find_complex_dimensions(det, 20.0, right=2.0)
    assert found.method == "generic"
    assert found.lattice is None
    for z in found.locations:
        assert abs(det.evaluate(z)) < 1e-8
    rect = Rectangle(found.strip.left, 2.0, -20.0, 20.0)
    assert count_zeros_in_rectangle(det, rect) == found.cardinality
    real = [z for z in found.locations if z.imag == 0]
    assert len(real) == 1
    assert 0.5 ** real[0].real + (1 / 3) ** real[0].real == pytest.approx(1.0)


def test_lattice_method_rejects_non_lattice():
    det = ExpPolynomial.from_terms([(1.0, 1.0), (-1.0, 0.5), (-1.0, 1 / 3)])
    with pytest.raises(ValueError):
        find_complex_dimensions(det, 10.0, right=2.0, method="lattice")


def test_double_zero_multiplicity():
    det = ExpPolynomial.from_terms([(1.0, 1.0), (-4.0, 0.5), (4.0, 0.25)])
    found = find_complex_dimensions(det, 5.0, right=2.0)
    assert len(found) == 1
    assert found.zeros[0].multiplicity == 2
    assert found.cardinality == 2
    assert found.zeros[0].location == pytest.approx(1.0, abs=1e-6)
    assert count_zeros_in_rectangle(det, Rectangle(0.5, 1.5, -1.0, 1.0)) == 2


def test_count_in_rectangle(worked_det):
    assert count_zeros_in_rectangle(worked_det, Rectangle(0.0, 3.0, -1.0, 1.0)) == 1
    assert count_zeros_in_rectangle(worked_det, Rectangle(0.0, 3.0, -10.0, 10.0)) == 5
    assert count_zeros_in_rectangle(worked_det, Rectangle(1.5, 3.0, 1.0, 8.0)) == 0


def test_boundary_through_zero_is_perturbed(worked_det):
    # left edge passes through the real zero at D
    assert count_zeros_in_rectangle(worked_det, Rectangle(D, 3.0, -1.0, 1.0)) == 1


def test_bands_match_single_pass(worked_det):
    single = find_complex_dimensions(worked_det, 40.0, right=RIGHT, method="generic")
    banded = find_complex_dimensions(worked_det, 40.0, right=RIGHT, method="generic", workers=3)
    assert len(single) == len(banded)
    assert hausdorff_distance(single, banded) < 1e-8


def test_strip_bounds(worked_det):
    found = find_complex_dimensions(worked_det, 30.0, right=RIGHT)
    assert found.strip.left < 0
    assert all(found.strip.left <= z.real <= found.strip.right for z in found.locations)


def test_to_dict(worked_det):
    data = find_complex_dimensions(worked_det, 10.0, right=RIGHT).to_dict()
    assert data["method"] == "lattice"
    assert data["lattice"]["period"] == pytest.approx(PERIOD)
    assert len(data["zeros"]) == 5


def test_height_must_be_positive(worked_det):
    with pytest.raises(ValueError):
        find_complex_dimensions(worked_det, 0.0)


@pytest.mark.parametrize(
    "rect",
    [Rectangle(1.5, 1.8, -1.0, 1.0), Rectangle(1.0, 1.3, 3.5, 5.5)],
)
def test_one_zero_per_family_box(worked_det, rect):
    assert count_zeros_in_rectangle(worked_det, rect) == 1


def test_tiling_counts_add_up(worked_det):
    found = find_complex_dimensions(worked_det, 30.0, right=RIGHT)
    # cuts avoid every zero: imaginary parts are multiples of PERIOD / 2, real parts D and D'
    re_cuts = [found.strip.left, 1.4, found.strip.right]
    im_cuts = [-31.0, -16.0, -2.0, 2.0, 16.0, 31.0]
    total = sum(
        count_zeros_in_rectangle(worked_det, Rectangle(a, b, c, d))
        for a, b in zip(re_cuts, re_cuts[1:])
        for c, d in zip(im_cuts, im_cuts[1:])
    )
    assert total == found.cardinality == 13
