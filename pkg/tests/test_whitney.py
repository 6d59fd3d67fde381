"""Dyadic Whitney cubes and the ball cell family.

The half-space family is exact binary arithmetic, so cover and
disjointness are asserted without tolerances.  The frozen comparison
value 15/32 for the linear field is by hand: the midpoint rule is exact
on integrands linear in ``s``, so the cube sum and the integral agree.
"""

import math

import numpy as np
import pytest

from bergman_lab.errors import DomainError, EvaluationError
from bergman_lab.whitney import (CUBE_CSV_HEADER, cube_at, cube_rows,
                                 discrete_vs_integral, point_to_cell,
                                 point_to_cube, whitney_ball,
                                 whitney_halfspace)

UNIT_STRIP = [(0.0, 1.0)]


# ---------------------------------------------------------------------------
# Cube geometry


def test_cube_exact_geometry():
    c = cube_at(-2, (3,))
    assert c.side == 0.25
    assert c.lower_corner == (0.75, 0.25)
    assert c.heights == (0.25, 0.5)
    assert c.center == ((0.875,), 0.375)
    assert c.volume == 0.0625
    assert c.contains(0.75, 0.25)          # closed below
    assert not c.contains(0.75, 0.5)       # open above in s
    assert not c.contains(1.0, 0.3)        # open above in y
    # the vertical extent equals the side: boundary distance over side
    # spans exactly [1, 2) inside the cube
    assert c.heights[1] / c.side == 2.0


@pytest.mark.parametrize("y,s", [
    ((0.3,), 0.7),
    ((-0.3,), 0.5),        # dyadic height: ties go to the lower cube
    ((0.0, 0.0), 1.0),
    ((2.7, -1.2), 0.11),
])
def test_point_to_cube_roundtrip(y, s):
    c = point_to_cube(np.asarray(y), s)
    assert c.contains(np.asarray(y), s)
    assert c.side <= s < 2.0 * c.side


@pytest.mark.parametrize("L", [2, 3, 4])
def test_unit_strip_cube_count(L):
    # levels -L..-1 over a unit lateral strip: 2^L + ... + 2 cubes
    cubes = whitney_halfspace(UNIT_STRIP, (2.0**-L, 1.0))
    assert len(cubes) == 2 ** (L + 1) - 2


def test_cover_and_disjointness_exact():
    cubes = whitney_halfspace(UNIT_STRIP, (0.25, 1.0))
    keys = {(c.level, c.lattice_index) for c in cubes}
    assert len(keys) == len(cubes)
    ys = np.linspace(0.0, 1.0, 9)[:-1]     # includes dyadic lattice points
    ss = [0.25, 0.3, 0.49999, 0.5, 0.75, 0.99]
    for y in ys:
        for s in ss:
            hits = [c for c in cubes if c.contains(y, s)]
            assert len(hits) == 1
            assert hits[0] == point_to_cube(np.array([y]), s)


def test_empty_regions():
    assert whitney_halfspace([(0.0, 0.0)], (0.25, 1.0)) == []
    assert whitney_halfspace(UNIT_STRIP, (0.5, 0.5)) == []


def test_halfspace_guards():
    with pytest.raises(DomainError, match="0 < s_lo"):
        whitney_halfspace(UNIT_STRIP, (0.0, 1.0))
    with pytest.raises(DomainError, match="a <= b"):
        whitney_halfspace([(1.0, 0.0)], (0.25, 1.0))
    with pytest.raises(DomainError, match="level range"):
        whitney_halfspace(UNIT_STRIP, (0.0625, 1.0), level_range=(-2, -1))


def test_level_range_matches_default():
    full = whitney_halfspace(UNIT_STRIP, (0.0625, 1.0))
    ranged = whitney_halfspace(UNIT_STRIP, (0.0625, 1.0),
                               level_range=(-4, -1))
    assert full == ranged


def test_cube_rows_round_trip():
    cubes = whitney_halfspace(UNIT_STRIP, (0.25, 1.0))
    rows = cube_rows(cubes)
    assert len(rows) == len(cubes)
    assert CUBE_CSV_HEADER.split(",") == ["level", "lattice_index",
                                          "lower_corner", "side"]
    level, idx, corner, side = rows[0].split(",")
    assert int(level) == cubes[0].level
    assert float(side) == cubes[0].side


# ---------------------------------------------------------------------------
# Discrete sum against the integral


def test_linear_field_sum_equals_integral():
    # f = s on [0,1) x [1/4,1): both sides equal
    # int_0^1 int_{1/4}^1 s ds dy = 15/32, since the midpoint rule is
    # exact on integrands linear in s
    cubes = whitney_halfspace(UNIT_STRIP, (0.25, 1.0))
    total, integral, ratio = discrete_vs_integral(
        lambda Y, s: s, 0.0, cubes)
    assert total == pytest.approx(15.0 / 32.0, rel=1e-14)
    assert integral == pytest.approx(15.0 / 32.0, rel=1e-12)
    assert ratio == pytest.approx(1.0, rel=1e-12)


def test_weighted_constant_field_ratio_band():
    # weight s^-1: midpoint value (1.5 side)^-1 against log 2 per
    # level, ratio (1/1.5)/log 2, well inside [1/2, 2]; the order-4
    # rule resolves 1/s only to about 1e-6
    cubes = whitney_halfspace(UNIT_STRIP, (0.0625, 1.0))
    _, _, ratio = discrete_vs_integral(
        lambda Y, s: np.ones(s.size), -1.0, cubes)
    assert ratio == pytest.approx(2.0 / (3.0 * math.log(2.0)), rel=1e-5)
    assert 0.5 <= ratio <= 2.0


def test_discrete_vs_integral_guards():
    cubes = whitney_halfspace(UNIT_STRIP, (0.25, 1.0))
    with pytest.raises(DomainError, match="at least one cube"):
        discrete_vs_integral(lambda Y, s: s, 0.0, [])
    with pytest.raises(EvaluationError, match="nonnegative"):
        discrete_vs_integral(lambda Y, s: -s, 0.0, cubes)


# ---------------------------------------------------------------------------
# Ball cells


def test_ball_family_constants():
    fam = whitney_ball(2, 4)
    assert fam.level_counts == (8, 16, 32, 64)
    assert fam.overlap_bound == 1
    assert 0.0 < fam.c1 <= fam.c2 < math.inf
    assert fam.c2 / fam.c1 <= 8.0


def test_ball_family_deterministic():
    a = whitney_ball(2, 4)
    b = whitney_ball(2, 4)
    assert a.level_counts == b.level_counts
    assert np.array_equal(a.centers_at(1), b.centers_at(1))


@pytest.mark.parametrize("r,level", [(0.6, 1), (0.8, 2), (0.9, 3)])
def test_point_to_cell_levels(r, level):
    fam = whitney_ball(2, 4)
    cell = point_to_cell(fam, np.array([r, 0.0]))
    assert cell is not None and cell.annulus_level == level


def test_point_to_cell_outside_family():
    fam = whitney_ball(2, 4)
    assert point_to_cell(fam, np.array([0.49, 0.0])) is None
    assert point_to_cell(fam, np.array([0.99, 0.0])) is None


def test_point_to_cell_unique_nearest_center():
    # membership is Voronoi within the level: the returned center is
    # the (unique) nearest one for a generic direction
    fam = whitney_ball(3, 3)
    x = np.array([0.55, 0.2, -0.1])
    cell = point_to_cell(fam, x)
    d = x / np.linalg.norm(x)
    dots = fam.centers_at(cell.annulus_level) @ d
    assert np.isclose(np.max(dots), float(cell.cap_center @ d))


def test_ball_guards():
    with pytest.raises(DomainError, match="n >= 2"):
        whitney_ball(1, 3)
    with pytest.raises(DomainError, match="level_max"):
        whitney_ball(2, 0)
