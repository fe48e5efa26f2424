import math

import numpy as np
import pytest

from coupled_nls.discretization import (
    apply_laplacian,
    conform,
    gradient_inner,
    h1_seminorm_sq,
    laplacian_values,
    lp_norm_p,
    radial_operator,
    weighted_inner,
)
from coupled_nls.model import GridMismatchError, RadialField, make_grid


def sech(r):
    return 1.0 / np.cosh(r)


def test_constant_has_zero_interior_laplacian():
    g = make_grid(2, 10.0, 512)
    f = RadialField(g, np.full(g.num_points, 3.0))
    lap = apply_laplacian(radial_operator(g), f).values
    assert np.max(np.abs(lap[: -4])) <= 1e-10


def test_gaussian_second_derivative_1d():
    errs = []
    for N in (513, 1025):
        g = make_grid(1, 8.0, N)
        r = g.nodes
        lap = laplacian_values(radial_operator(g), np.exp(-r * r))
        exact = (4 * r * r - 2) * np.exp(-r * r)
        errs.append(np.max(np.abs(lap[:-4] - exact[:-4])))
    assert errs[0] < 1e-5
    assert errs[0] / errs[1] > 4  # at least second order


def test_spherical_bessel_identity_3d():
    g = make_grid(3, 20.0, 2048)
    r = g.nodes
    f = np.sinc(r / np.pi)  # sin(r)/r with the removable origin value
    lap = laplacian_values(radial_operator(g), f)
    interior = slice(1, -8)
    h = g.spacing
    assert np.max(np.abs(lap[interior] + f[interior])) <= 10 * h * h


def test_operator_grid_mismatch():
    g1, g2 = make_grid(1, 5.0, 64), make_grid(1, 6.0, 64)
    with pytest.raises(GridMismatchError):
        apply_laplacian(radial_operator(g1), RadialField.zeros(g2))


def test_lp_norm_zero():
    g = make_grid(1, 5.0, 64)
    assert lp_norm_p(RadialField.zeros(g), 2) == 0.0


def test_soliton_norms(grid1):
    f = RadialField.from_function(grid1, lambda r: math.sqrt(2) * sech(r))
    assert abs(lp_norm_p(f, 2) ** 2 - 4.0) <= 1e-8
    assert abs(lp_norm_p(f, 4) ** 4 - 16.0 / 3.0) <= 1e-8


def test_lp_norm_rejects_p_below_one():
    g = make_grid(1, 5.0, 64)
    with pytest.raises(ValueError):
        lp_norm_p(RadialField.zeros(g), 0.5)


def test_constant_seminorm_zero():
    g = make_grid(3, 10.0, 256)
    assert h1_seminorm_sq(RadialField(g, np.ones(g.num_points))) <= 1e-10


def test_soliton_gradient_norm(grid1):
    f = RadialField.from_function(grid1, lambda r: math.sqrt(2) * sech(r))
    assert abs(h1_seminorm_sq(f) - 4.0 / 3.0) <= 1e-6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_summation_by_parts_exponential(n):
    g = make_grid(n, 20.0, 1024)
    op = radial_operator(g)
    f = RadialField(g, conform(op, np.exp(-g.nodes)))
    lhs = -weighted_inner(apply_laplacian(op, f), f)
    rhs = h1_seminorm_sq(f)
    assert abs(lhs - rhs) / rhs <= 1e-6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_laplacian_symmetry(n):
    g = make_grid(n, 20.0, 1024)
    op = radial_operator(g)
    r = g.nodes
    f = RadialField(g, conform(op, np.exp(-r * r / 4)))
    h = RadialField(g, conform(op, (1 + r) * np.exp(-r)))
    a = weighted_inner(apply_laplacian(op, f), h)
    b = weighted_inner(f, apply_laplacian(op, h))
    assert abs(a - b) / abs(a) <= 1e-8
    assert abs(-a - gradient_inner(f, h)) / abs(a) <= 1e-8


def test_stiffness_symmetric_banded():
    op = radial_operator(make_grid(2, 10.0, 128))
    k = op.stiffness.toarray()
    assert np.array_equal(k, k.T)
    i, j = np.nonzero(k)
    assert np.max(np.abs(i - j)) <= 3


def test_conform_three_dimensional_origin():
    g = make_grid(3, 10.0, 128)
    op = radial_operator(g)
    vals = conform(op, np.exp(-g.nodes ** 2))
    assert vals[-1] == 0.0
    assert abs(vals[0] - 1.0) < 1e-4
