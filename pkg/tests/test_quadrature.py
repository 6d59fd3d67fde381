"""Quadrature rules: exactness degrees, normalization, tail handling."""

import math

import numpy as np
import pytest

from bergman_lab.errors import DomainError
from bergman_lab.quadrature import (
    composite_gauss,
    geometric_edges,
    halfspace_rule,
    integrate_halfspace,
    radial_rule,
    sphere_rule,
    zonal_rule,
)
from bergman_lab.quadrature import TailDecay


@pytest.mark.parametrize("order", [2, 4, 8])
def test_composite_gauss_polynomial_exactness(order):
    # a Gauss-Legendre panel of ``order`` nodes is exact through
    # degree 2*order - 1
    edges = np.array([0.0, 0.3, 1.0])
    nodes, weights = composite_gauss(edges, order)
    for k in range(2 * order):
        exact = 1.0 / (k + 1)
        assert abs(weights @ nodes**k - exact) < 1e-13


def test_composite_gauss_interval_additivity():
    one = composite_gauss(np.array([0.0, 1.0]), 6)
    two = composite_gauss(np.array([0.0, 0.5, 1.0]), 6)
    f = lambda x: np.exp(-3.0 * x)
    exact = (1.0 - math.exp(-3.0)) / 3.0
    assert abs(one[1] @ f(one[0]) - exact) < 1e-9
    assert abs(two[1] @ f(two[0]) - exact) < 1e-12


def test_geometric_edges_refine_toward_right_endpoint():
    edges = geometric_edges(0.0, 1.0, 6, toward="b")
    assert edges[0] == 0.0 and edges[-1] == 1.0
    gaps = np.diff(edges)
    assert np.all(gaps[1:] <= gaps[:-1])
    # panel widths halve toward the refined endpoint
    assert gaps[-1] <= 2.0 ** -5


@pytest.mark.parametrize("n", [2, 3])
def test_sphere_rule_weights_normalized(n):
    sr = sphere_rule(n, 17)
    assert abs(sr.weights.sum() - 1.0) < 1e-14
    assert np.allclose(np.linalg.norm(sr.nodes, axis=1), 1.0, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_sphere_rule_kills_low_harmonics(n):
    # coordinate monomials of odd degree average to zero; x_1^2
    # averages to 1/n by symmetry
    sr = sphere_rule(n, 17)
    x1 = sr.nodes[:, 0]
    assert abs(sr.weights @ x1) < 1e-14
    assert abs(sr.weights @ x1**3) < 1e-14
    assert abs(sr.weights @ x1**2 - 1.0 / n) < 1e-13


@pytest.mark.parametrize("n", [2, 3])
def test_zonal_rule_matches_sphere_rule(n):
    # a zonal integrand reduces the sphere mean to the u-line
    zr = zonal_rule(n, order=12, refinement=24)
    sr = sphere_rule(n, 23)
    g = lambda u: np.exp(u) + 1.0 / (2.5 - u)
    via_sphere = sr.weights @ g(sr.nodes[:, 0])
    via_zonal = zr.weights @ g(zr.u_nodes)
    assert abs(via_sphere - via_zonal) < 1e-9
    assert abs(zr.weights.sum() - 1.0) < 1e-13


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
def test_radial_rule_beta_moments(alpha):
    # int_0^1 r^2 (1-r)^alpha dr = B(3, alpha+1), singular weight at
    # the boundary end
    rr = radial_rule(10, 14)
    got = rr.weights @ (rr.nodes**2 * (1.0 - rr.nodes) ** alpha)
    exact = math.gamma(3.0) * math.gamma(alpha + 1.0) / math.gamma(alpha + 4.0)
    assert abs(got - exact) < 1e-12


def test_radial_rule_truncation_index_is_monotone():
    rr = radial_rule(8, 12)
    i1 = rr.truncation_index(0.9)
    i2 = rr.truncation_index(0.99)
    assert 0 < i1 <= i2 <= rr.nodes.size


def test_halfspace_rule_gaussian_mass():
    # exp(-y^2 - s) over |y| <= R, s_min <= s <= s_max factorizes;
    # the rule covers exactly that box, so compare the box integral
    s_min, s_max = 2.0**-12, 32.0
    rule = halfspace_rule(1, R_xy=8.0, s_min=s_min, s_max=s_max,
                          order=10, lateral_refinement=8)
    mesh, w_lat = rule.lateral_mesh()
    lat = w_lat @ np.exp(-mesh[:, 0] ** 2)
    heights = rule.s_weights @ np.exp(-rule.s_nodes)
    exact = math.sqrt(math.pi) * (math.exp(-s_min) - math.exp(-s_max))
    assert abs(lat * heights - exact) < 1e-8


def test_integrate_halfspace_reports_tail():
    decay = TailDecay(power_infinity=4.0)
    rule = halfspace_rule(1, R_xy=16.0, s_min=2.0**-10, s_max=16.0)

    def g(Y, s):
        u = Y[:, 0] ** 2
        return 1.0 / (1.0 + u + s * s) ** 2

    out = integrate_halfspace(g, rule, decay)
    assert out.value > 0.0
    assert 0.0 < out.tail_bound < 0.1 * out.value


def test_integrate_halfspace_refuses_slow_decay():
    decay = TailDecay(power_infinity=1.5)
    rule = halfspace_rule(1)
    with pytest.raises(DomainError):
        integrate_halfspace(lambda Y, s: np.ones(Y.shape[0]), rule, decay)
