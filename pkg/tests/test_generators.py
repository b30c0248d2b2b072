import math

import numpy as np
import pytest

from sprays.errors import PoleProximity
from sprays.generators import (
    GeneratorProfile,
    Piece,
    mellin_integer_residue,
    mellin_quadrature,
    mellin_transform,
    tube_volume,
    tube_volumes,
    validate_profile,
)


@pytest.fixture
def interval():
    return GeneratorProfile.monophase(1, (2.0,), 1 / 6, 1 / 3)


@pytest.fixture
def two_intervals():
    return GeneratorProfile(1, (Piece(1 / 6, (4.0, 0.0)), Piece(0.5, (2.0, 1 / 3))), 4 / 3)


def test_monophase_appends_zero(interval):
    assert interval.pieces[0].coefficients == (2.0, 0.0)
    assert interval.is_monophase
    assert interval.inradius == pytest.approx(1 / 6)


def test_tube_volume_interval(interval):
    assert tube_volume(interval, 0.0) == 0.0
    assert tube_volume(interval, 0.1) == pytest.approx(0.2)
    assert tube_volume(interval, 1 / 6) == pytest.approx(1 / 3)
    assert tube_volume(interval, 5.0) == pytest.approx(1 / 3)


def test_tube_volume_pluriphase(two_intervals):
    assert tube_volume(two_intervals, 0.1) == pytest.approx(0.4)
    assert tube_volume(two_intervals, 0.3) == pytest.approx(0.6 + 1 / 3)
    assert tube_volume(two_intervals, 0.7) == pytest.approx(4 / 3)


def test_tube_volume_negative_eps(interval):
    with pytest.raises(ValueError):
        tube_volume(interval, -0.1)


def test_tube_volumes_match_scalar(two_intervals):
    grid = np.linspace(0.0, 1.0, 57)
    assert tube_volumes(two_intervals, grid) == pytest.approx(
        [tube_volume(two_intervals, e) for e in grid]
    )


def test_worked_profiles_valid(worked):
    for v, p in worked.profiles.items():
        assert validate_profile(p, v).ok


def test_mellin_closed_form_interval(interval):
    s = 0.4 + 2.5j
    g = 1 / 6
    expected = 2 * g**s / s - (1 / 3) * g ** (s - 1) / (s - 1)
    assert mellin_transform(interval, s) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("s", [0.5 + 0j, 0.3 + 4j, 0.8 - 11j])
def test_mellin_matches_quadrature_pluriphase(two_intervals, s):
    assert mellin_transform(two_intervals, s) == pytest.approx(
        mellin_quadrature(two_intervals, s), rel=1e-7
    )


@pytest.mark.parametrize("s", [1.5 + 0j, 1.2 + 3j, 1.9 - 7j])
def test_mellin_matches_quadrature_plane(worked, gasket, s):
    for p in [*worked.profiles.values(), *gasket.profiles.values()]:
        assert mellin_transform(p, s) == pytest.approx(mellin_quadrature(p, s), rel=1e-7)


def test_mellin_conjugate_symmetry(worked):
    p = worked.profiles["2"]
    s = 0.7 + 5.5j
    assert mellin_transform(p, s.conjugate()) == pytest.approx(mellin_transform(p, s).conjugate())


def test_mellin_pole_exclusion(interval):
    with pytest.raises(PoleProximity):
        mellin_transform(interval, 1.0 + 1e-12j)


def test_quadrature_strip(interval):
    with pytest.raises(ValueError):
        mellin_quadrature(interval, 1.5 + 0j)


def test_integer_residues(interval, two_intervals):
    assert mellin_integer_residue(interval, 0) == pytest.approx(2.0)
    assert mellin_integer_residue(interval, 1) == pytest.approx(-1 / 3)
    assert mellin_integer_residue(two_intervals, 0) == pytest.approx(4.0)
    assert mellin_integer_residue(two_intervals, 1) == pytest.approx(-4 / 3)


def test_integer_residue_is_laurent_coefficient(worked):
    p = worked.profiles["1"]
    h = 1e-5
    for i in (0, 1):
        angles = np.linspace(0, 2 * math.pi, 65)[:-1]
        around = [h * complex(math.cos(t), math.sin(t)) for t in angles]
        mean = np.mean([mellin_transform(p, i + z) * z for z in around])
        assert mean == pytest.approx(mellin_integer_residue(p, i), rel=1e-6)


def test_continuity_violation():
    p = GeneratorProfile.monophase(1, (2.0,), 1 / 6, 0.5)
    assert validate_profile(p).kinds() == {"ContinuityViolation"}


def test_zero_limit_violation():
    p = GeneratorProfile(1, (Piece(1 / 6, (2.0, 0.1)),), 2 / 6 + 0.1)
    assert validate_profile(p).kinds() == {"ZeroLimitViolation"}


def test_monotonicity_violation():
    p = GeneratorProfile(2, (Piece(0.2, (-4.0, 1.0, 0.0)),), 0.04)
    report = validate_profile(p, "x")
    assert report.kinds() == {"MonotonicityViolation"}
    assert "eps=" in next(iter(report)).where


def test_breakpoint_order():
    p = GeneratorProfile(1, (Piece(0.5, (2.0, 0.0)), Piece(0.25, (0.0, 1.0))), 1.0)
    assert "BreakpointOrder" in validate_profile(p).kinds()


def test_coefficient_count():
    p = GeneratorProfile(1, (Piece(0.5, (1.0, 2.0, 0.0)),), 1.0)
    assert "CoefficientCount" in validate_profile(p).kinds()


def test_scaled(interval):
    q = interval.scaled(3.0)
    assert q.volume == pytest.approx(1.0)
    assert tube_volume(q, 0.1) == pytest.approx(0.6)


def test_mellin_quadrature_deep_in_first_piece(two_intervals):
    # 4/sqrt(6) twice plus 4/sqrt(2) twice
    expected = 8 / math.sqrt(6) + 8 / math.sqrt(2)
    assert mellin_quadrature(two_intervals, 0.5 + 0j) == pytest.approx(expected, rel=1e-8)
    near_edge = 0.1 + 0j
    assert mellin_quadrature(two_intervals, near_edge) == pytest.approx(
        mellin_transform(two_intervals, near_edge), rel=1e-6
    )
