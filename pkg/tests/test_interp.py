"""Dual bases on spectra and the grid-matching interpolant."""

import numpy as np
import pytest

from matfn import (
    InterpolationError,
    derivative_grid,
    hermite_basis,
    interpolate,
    parse_field,
)


def test_lagrange_pair():
    basis = hermite_basis([(0.0, 1), (2.0, 1)])
    # P_0 = 1 - x/2 picks out the node at 0, P_1 = x/2 the node at 2
    p0 = basis.coeff_vector(0, 0)
    p1 = basis.coeff_vector(1, 0)
    assert np.allclose(p0, [1.0, -0.5])
    assert np.allclose(p1, [0.0, 0.5])


def test_dual_property_random_nodes():
    rng = np.random.default_rng(3)
    nodes = [(complex(rng.normal(), rng.normal()), r) for r in (2, 1, 3)]
    basis = hermite_basis(nodes)
    polys = basis.polynomials()
    for t, (m, j) in enumerate(basis.functionals):
        for m2, (lam, r2) in enumerate(nodes):
            p = polys[t]
            for j2 in range(r2):
                want = 1.0 if (m2, j2) == (m, j) else 0.0
                # differentiate the monomial form j2 times and evaluate
                q = p
                for _ in range(j2):
                    q = q.partial(0)
                assert q(lam) == pytest.approx(want, abs=1e-8)


def test_basis_rejects_near_coincident_nodes():
    with pytest.raises(InterpolationError):
        hermite_basis([(0.0, 1), (1e-13, 1)])


def test_exp_osculating_line():
    basis = hermite_basis([(0.0, 2)])
    grid = derivative_grid(parse_field("exp(x1)"), [[(0.0, 2)]])
    poly = interpolate(grid, [basis])
    assert poly.coeffs[(0,)] == pytest.approx(1.0)
    assert poly.coeffs[(1,)] == pytest.approx(1.0)
    assert len(poly.coeffs) == 2


def test_product_grid_reduces_degree():
    f = parse_field("x1*x2")
    b1 = hermite_basis([(1.0, 1), (2.0, 1)])
    b2 = hermite_basis([(3.0, 1)])
    grid = derivative_grid(f, [[(1.0, 1), (2.0, 1)], [(3.0, 1)]])
    poly = interpolate(grid, [b1, b2])
    # with a single node in x2 the interpolant collapses to 3 x1
    assert poly(1.0, 99.0) == pytest.approx(3.0)
    assert poly(2.0, -1.0) == pytest.approx(6.0)
    assert poly.degree(1) == 0


def test_interpolation_is_projection_on_polynomials():
    # a polynomial of degree below the grid total comes back unchanged
    f = parse_field("x1^2 - 3*x1 + 2")
    nodes = [(0.5, 2), (2.5, 1)]
    basis = hermite_basis(nodes)
    grid = derivative_grid(f, [nodes])
    poly = interpolate(grid, [basis])
    assert poly.coeffs[(2,)] == pytest.approx(1.0)
    assert poly.coeffs[(1,)] == pytest.approx(-3.0)
    assert poly.coeffs[(0,)] == pytest.approx(2.0)


def test_incomplete_grid_is_rejected():
    basis = hermite_basis([(0.0, 2)])
    with pytest.raises(InterpolationError, match="missing"):
        interpolate({((0,), (0,)): 1.0}, [basis])
    with pytest.raises(InterpolationError, match="unknown"):
        interpolate(
            {((0,), (0,)): 1.0, ((0,), (1,)): 1.0, ((1,), (0,)): 9.0},
            [basis],
        )


def test_condition_number_reported():
    tight = hermite_basis([(0.0, 1), (1e-3, 1)])
    wide = hermite_basis([(0.0, 1), (1.0, 1)])
    assert tight.condition > wide.condition > 0
