"""Product, composition and contraction identities as checkable objects."""

import numpy as np
import pytest

from matfn import (
    analyze,
    commuting_swap_check,
    compose_identity_check,
    contract_equal_slots_theorem,
    contract_trace_theorem,
    derived_spectrum,
    f_otimes,
    minimal_multiplicities,
    parse_field,
    product_identity_check,
)
from matfn.funcalc import jordan_matrix

rng = np.random.default_rng(41)


def test_product_identity_basic():
    mats = [rng.normal(size=(3, 3)), rng.normal(size=(2, 2))]
    f1 = parse_field("x1 + x2")
    f2 = parse_field("x1*x2")
    check = product_identity_check(f1, f2, mats)
    assert check.product_residual < 1e-8 * check.scale
    assert check.commutator_norm < 1e-8
    assert check.scale > 0


def test_product_identity_on_defective_input():
    mats = [jordan_matrix([(1.5, 3)])]
    check = product_identity_check(parse_field("exp(x1)"), parse_field("x1^2"), [mats[0]])
    assert check.product_residual < 1e-8 * check.scale


def test_trace_contraction_theorem():
    A = rng.normal(size=(2, 2))
    B = np.diag([3.0, 4.0])
    f = parse_field("x1*x2")
    check = contract_trace_theorem(f, [A, B], 1)
    assert check.residual < 1e-10
    # tracing out x2 at eigenvalues {3, 4} leaves the field x1*3 + x1*4
    reduced = check.reduced_field
    assert reduced.arity == 1
    assert reduced(2.0) == pytest.approx(14.0)
    assert np.allclose(check.contracted.data, 7.0 * A, atol=1e-10)


def test_trace_contraction_with_multiplicity():
    A = rng.normal(size=(2, 2))
    B = np.diag([5.0, 5.0, 2.0])
    f = parse_field("x1 + x2")
    check = contract_trace_theorem(f, [A, B], 1)
    # sum over the spectrum with multiplicity: 3 x1 + (5 + 5 + 2)
    assert check.reduced_field(1.0) == pytest.approx(15.0)
    assert check.residual < 1e-10


def test_equal_slots_contraction():
    M = rng.normal(size=(3, 3))
    B = rng.normal(size=(2, 2))
    f = parse_field("x1*x2*x3")
    check = contract_equal_slots_theorem(f, [M, B, M], 0, 2)
    assert check.order_residual < 1e-8
    assert check.reduced_residual < 1e-8
    # merged field is x1^2 * x2 on (M, B)
    assert check.reduced_field(2.0, 3.0) == pytest.approx(12.0)


def test_equal_slots_on_defective_matrix():
    M = jordan_matrix([(0.5, 2), (2.0, 1)])
    f = parse_field("x1*x2")
    check = contract_equal_slots_theorem(f, [M, M], 0, 1)
    assert check.order_residual < 1e-9
    assert check.reduced_residual < 1e-9


def test_equal_slots_requires_keep_before_drop():
    M = rng.normal(size=(2, 2))
    with pytest.raises(ValueError):
        contract_equal_slots_theorem(parse_field("x1*x2"), [M, M], 1, 0)


def test_swap_check_commuting():
    M = rng.normal(size=(3, 3))
    N = M @ M - 2 * M
    check = commuting_swap_check(parse_field("x1 + x2^2"), [M, N], 0, 1)
    assert check.commutator_norm < 1e-10
    assert check.residual < 1e-8


def test_swap_check_rejects_noncommuting():
    M = rng.normal(size=(3, 3))
    N = rng.normal(size=(3, 3))
    with pytest.raises(ValueError, match="commut"):
        commuting_swap_check(parse_field("x1*x2"), [M, N], 0, 1)


def test_derived_spectrum_values():
    f = parse_field("x1 + 10*x2")
    spectra = [analyze(np.diag([1.0, 2.0])), analyze(np.diag([1.0, 2.0]))]
    derived = derived_spectrum(f, spectra)
    assert sorted(v.real for v in derived.values) == pytest.approx([11, 12, 21, 22])
    assert derived.mult_bounds == (1, 1, 1, 1)
    assert sum(derived.alg_mults) == 4


def test_derived_spectrum_bounds_honest():
    # the declared multiplicity bound must dominate what the matrix
    # view of the extension actually has
    f = parse_field("x1*x2")
    J = jordan_matrix([(2.0, 2)])
    spectra = [analyze(J), analyze(np.diag([3.0, 5.0]))]
    derived = derived_spectrum(f, spectra)
    Mbar = f_otimes(f, [J, np.diag([3.0, 5.0])]).as_matrix()
    for value, bound in zip(derived.values, derived.mult_bounds):
        r_hat = minimal_multiplicities(Mbar, [value])[0]
        assert r_hat <= bound


def test_derived_spectrum_merges_collisions():
    f = parse_field("x1 + x2")
    spectra = [analyze(np.diag([1.0, 2.0])), analyze(np.diag([1.0, 2.0]))]
    derived = derived_spectrum(f, spectra)
    # sums 2, 3, 3, 4 collapse to three values with weights 1, 2, 1
    assert len(derived.values) == 3
    assert sorted(derived.alg_mults) == [1, 1, 2]


def test_compose_identity_scalar_outer():
    g = parse_field("x1^2")
    inner = parse_field("x1 + x2")
    mats = [rng.normal(size=(2, 2)), rng.normal(size=(2, 2))]
    check = compose_identity_check(g, [inner], [mats])
    assert check.residual < 1e-7


def test_compose_identity_two_bars():
    g = parse_field("x1*x2")
    inners = [parse_field("x1^2"), parse_field("x1 + 1")]
    groups = [[rng.normal(size=(2, 2))], [rng.normal(size=(3, 3))]]
    check = compose_identity_check(g, inners, groups)
    assert check.residual < 1e-7
    assert len(check.derived) == 2


def test_compose_identity_defective_inner():
    g = parse_field("exp(x1)")
    inner = parse_field("x1^2")
    J = jordan_matrix([(0.5, 2)])
    check = compose_identity_check(g, [inner], [[J]])
    assert check.residual < 1e-7
