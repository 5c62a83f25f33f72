"""Radial grid construction and quadrature."""

import math

import numpy as np
import pytest

from critvar import RadialGrid, ball_volume, build_grid, integrate, unit_sphere_area
from critvar.errors import BadDomain, GridTooCoarse, ShapeMismatch


def test_unit_sphere_areas():
    assert unit_sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert unit_sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-15)
    assert unit_sphere_area(4) == pytest.approx(2.0 * math.pi ** 2, rel=1e-15)
    assert unit_sphere_area(5) == pytest.approx(8.0 * math.pi ** 2 / 3.0, rel=1e-15)


def test_ball_volumes_exact():
    assert ball_volume(4, 1.0) == pytest.approx(math.pi ** 2 / 2.0, rel=1e-15)
    assert ball_volume(5, 1.0) == pytest.approx(8.0 * math.pi ** 2 / 15.0, rel=1e-15)
    assert ball_volume(4, 2.0) == pytest.approx(math.pi ** 2 / 2.0 * 16.0, rel=1e-15)


@pytest.mark.parametrize("dim", [4, 5, 6])
@pytest.mark.parametrize("grading,ratio", [("uniform", None), ("geometric", 1.01)])
def test_volume_matches_closed_form(dim, grading, ratio):
    grid = build_grid(dim, 1.0, 400, grading=grading, ratio=ratio)
    # cell masses are exact per cell; only the innermost O(h^N) sliver is dropped
    assert grid.volume == pytest.approx(ball_volume(dim, 1.0), rel=1e-9)


def test_integrate_monomial_second_order():
    # int r^2 dx over the unit ball = sigma / (N + 2)
    dim = 5
    exact = unit_sphere_area(dim) / (dim + 2)
    errs = []
    for n in (200, 400, 800):
        g = build_grid(dim, 1.0, n)
        errs.append(abs(integrate(g.nodes ** 2, g) - exact))
    order = math.log2(errs[0] / errs[1])
    assert order > 1.8
    assert math.log2(errs[1] / errs[2]) > 1.8


def test_integrate_smooth_field(grid5):
    # int cos(pi r / 2) over the ball, reference from dense quadrature
    from scipy.integrate import quad

    ref, _ = quad(lambda r: math.cos(math.pi * r / 2.0) * r ** 4, 0.0, 1.0)
    ref *= grid5.surface_factor
    val = integrate(np.cos(math.pi * grid5.nodes / 2.0), grid5)
    assert val == pytest.approx(ref, rel=1e-5)


def test_geometric_nodes_cluster_at_origin():
    g = build_grid(5, 1.0, 500, grading="geometric", ratio=1.01)
    assert g.spacings[0] < g.spacings[-1]
    assert np.allclose(np.diff(g.spacings) / g.spacings[:-1], 0.01, rtol=1e-8)
    assert g.nodes[0] == 0.0
    assert g.nodes[-1] == 1.0


def test_masses_and_weights_consistent(grid5):
    assert np.all(grid5.masses[1:] > 0.0)
    assert grid5.masses[0] == 0.0  # origin node carries no quadrature mass


def test_bad_domain_errors():
    with pytest.raises(BadDomain):
        build_grid(1, 1.0, 100)
    with pytest.raises(BadDomain):
        build_grid(5, -1.0, 100)
    with pytest.raises(BadDomain):
        build_grid(5, 1.0, 100, grading="geometric")  # ratio missing
    with pytest.raises(BadDomain):
        build_grid(5, 1.0, 100, grading="weird")
    with pytest.raises(GridTooCoarse):
        build_grid(5, 1.0, 8)


def test_check_shape(grid5):
    with pytest.raises(ShapeMismatch):
        grid5.check_shape(np.zeros(3))
    with pytest.raises(ShapeMismatch):
        integrate(np.zeros(grid5.nodes.size + 1), grid5)


def test_nodes_must_start_at_zero():
    nodes = np.linspace(0.1, 1.0, 50)
    with pytest.raises(BadDomain):
        RadialGrid(dimension=5, radius=1.0, nodes=nodes,
                   quad_weights=np.ones_like(nodes),
                   surface_factor=unit_sphere_area(5), grading="uniform")
