"""Derivatives of matrix functions through divided differences.

The directional derivative of the tensor extension is itself a tensor
extension: differentiating slot p along H equals the extension of the
difference quotient in that slot, with the duplicated slot contracted
through H. Higher derivatives along a line M + zH reduce the same way to
divided-difference fields of higher order. The last section implements
the perturbation series of simple eigenvalues and their projectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SpectralError
from .funcalc import f_otimes
from .scalarfield import (
    ProjKernel,
    ScalarField,
    SlotDividedDifference,
    divided_difference_levels,
)
from .spectral import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_RANK_TOL,
    analyze,
    as_square_matrix,
    hs_norm,
)
from .tensor import OperatorTensor, contract_adjacent_through


# ---------------------------------------------------------------------------
# divided differences of one-variable fields


@dataclass(frozen=True)
class DividedDifferenceTable:
    """Confluent Newton table of a one-variable field.

    ``nodes`` are the merged nodes in evaluation order; ``levels[s][i]``
    is the difference over nodes[i : i+s+1]. ``value`` is the full
    difference over all nodes.
    """

    nodes: tuple[complex, ...]
    levels: tuple[tuple[complex, ...], ...]

    @property
    def value(self) -> complex:
        return self.levels[-1][0]


def divided_difference_table(f: ScalarField, nodes) -> DividedDifferenceTable:
    if f.arity != 1:
        raise ValueError("divided differences need a one-variable field")
    derivs = [f]

    def deriv(x, m):
        while len(derivs) <= m:
            derivs.append(derivs[-1].partial(0))
        return derivs[m](x)

    zs, levels = divided_difference_levels(deriv, nodes)
    return DividedDifferenceTable(
        nodes=tuple(zs), levels=tuple(tuple(row) for row in levels)
    )


def divided_difference(f: ScalarField, nodes) -> complex:
    """f[x_0, ..., x_n]; repeated nodes take derivative values."""
    return divided_difference_table(f, nodes).value


# ---------------------------------------------------------------------------
# difference-quotient fields


def first_difference_field(f: ScalarField, slot: int) -> ScalarField:
    """The two-node difference quotient of ``f`` in one slot.

    Arity grows by one; the two nodes sit at positions ``slot`` and
    ``slot + 1``. Off the diagonal the value is
    (f(..., y, ...) - f(..., x, ...)) / (y - x); on it, the slot partial.
    """
    if not 0 <= slot < f.arity:
        raise ValueError(f"slot {slot} out of range for arity {f.arity}")
    return ScalarField(
        f.arity + 1, SlotDividedDifference(f.root, f.arity, slot, (1, 1))
    )


def divided_difference_field(f: ScalarField, n: int) -> ScalarField:
    """f[x_1, ..., x_{n+1}] as a field of n + 1 variables (f univariate)."""
    if f.arity != 1:
        raise ValueError("needs a one-variable field")
    if n < 0:
        raise ValueError("order must be nonnegative")
    return ScalarField(n + 1, SlotDividedDifference(f.root, 1, 0, (1,) * (n + 1)))


def doubled_node_difference_field(f: ScalarField, n: int, double_at: int) -> ScalarField:
    """n-variable field f[x_1, ..., x_n, x_d]: one node entered twice."""
    if f.arity != 1:
        raise ValueError("needs a one-variable field")
    if not 0 <= double_at < n:
        raise ValueError(f"double_at {double_at} out of range for {n} variables")
    mults = tuple(2 if t == double_at else 1 for t in range(n))
    return ScalarField(n, SlotDividedDifference(f.root, 1, 0, mults))


# ---------------------------------------------------------------------------
# directional and curve derivatives


def frechet_derivative(
    f: ScalarField,
    mats,
    slot: int,
    H,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> OperatorTensor:
    """Derivative of the tensor extension in one slot along H.

    Built as the tensor extension of the difference quotient in that
    slot, with the doubled slot contracted through H. The result has the
    same slots as the original tensor.
    """
    arrs = [as_square_matrix(M, f"slot {l} matrix") for l, M in enumerate(mats)]
    if f.arity != len(arrs):
        raise ValueError(f"field of arity {f.arity} applied to {len(arrs)} matrices")
    if not 0 <= slot < f.arity:
        raise ValueError(f"slot {slot} out of range for arity {f.arity}")
    Hm = as_square_matrix(H, "direction")
    if Hm.shape != arrs[slot].shape:
        raise ValueError("direction must match the differentiated slot's shape")
    g = first_difference_field(f, slot)
    doubled = arrs[: slot + 1] + [arrs[slot]] + arrs[slot + 1 :]
    data = [analyze(M, cluster_tol, rank_tol) for M in arrs]
    spectra = data[: slot + 1] + [data[slot]] + data[slot + 1 :]
    T = f_otimes(g, doubled, spectra=spectra)
    return contract_adjacent_through(T, slot, Hm)


def nth_derivative_curve(
    f: ScalarField,
    M,
    H,
    n: int,
    at: float = 0.0,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> np.ndarray:
    """d^n/dz^n f(M + zH) at z = ``at``, for a one-variable field.

    n! times the extension of the n-th divided-difference field of f at
    n + 1 copies of M + at H, chained through H between consecutive
    copies.
    """
    if f.arity != 1:
        raise ValueError("needs a one-variable field")
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    A = as_square_matrix(M) + complex(at) * as_square_matrix(H, "direction")
    Hm = as_square_matrix(H, "direction")
    sd = analyze(A, cluster_tol, rank_tol)
    if n == 0:
        T = f_otimes(f, [A], spectra=[sd])
        return np.asarray(T.data)
    g = divided_difference_field(f, n)
    T = f_otimes(g, [A] * (n + 1), spectra=[sd] * (n + 1))
    for _ in range(n):
        T = contract_adjacent_through(T, 0, Hm)
    return math.factorial(n) * np.asarray(T.data)


def trace_derivative(
    f: ScalarField,
    M,
    H,
    n: int,
    at: float = 0.0,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> complex:
    """d^n/dz^n Tr f(M + zH) at z = ``at``.

    Uses the n-argument field with one doubled node instead of the full
    (n+1)-argument field: the cyclic symmetry of the trace closes the
    chain, so one slot fewer is needed than for the matrix derivative.
    """
    if f.arity != 1:
        raise ValueError("needs a one-variable field")
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    A = as_square_matrix(M) + complex(at) * as_square_matrix(H, "direction")
    Hm = as_square_matrix(H, "direction")
    sd = analyze(A, cluster_tol, rank_tol)
    if n == 0:
        T = f_otimes(f, [A], spectra=[sd])
        return complex(np.trace(T.data))
    h = doubled_node_difference_field(f, n, n - 1)
    T = f_otimes(h, [A] * n, spectra=[sd] * n)
    for _ in range(n - 1):
        T = contract_adjacent_through(T, 0, Hm)
    R = np.asarray(T.data)
    return math.factorial(n) * complex(np.trace(R @ Hm))


# ---------------------------------------------------------------------------
# perturbation series for simple spectra


def u_function(anchor: complex, n: int) -> ScalarField:
    """The order-n kernel of the projector perturbation series.

    A symmetric function of n + 1 arguments attached to one eigenvalue.
    With m of the arguments equal to ``anchor`` and the others z_h, the
    value is the (m-1)-st Taylor coefficient of prod_h 1/(z - z_h) at the
    anchor, and 0 when m = 0. Arguments within 1e-10 of the anchor
    without being equal to it are rejected as ambiguous.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    return ScalarField(n + 1, ProjKernel(complex(anchor), n))


def _simple_spectrum_frame(A, cluster_tol, rank_tol):
    sd = analyze(A, cluster_tol, rank_tol)
    if any(s != 1 for s in sd.alg_mult):
        raise SpectralError(
            f"perturbation series needs a simple spectrum; multiplicities {sd.alg_mult}"
        )
    lams = sd.eigenvalues
    threshold = cluster_tol * hs_norm(A)
    gap = min(
        abs(a - b) for a, b in itertools.combinations(lams, 2)
    ) if len(lams) > 1 else math.inf
    if gap <= 10 * threshold:
        raise SpectralError(
            f"eigenvalue gap {gap:.3e} is within 10x of the clustering "
            f"threshold {threshold:.3e}; the series is not trustworthy here"
        )
    w, V = np.linalg.eig(A)
    order = []
    for lam in lams:
        order.append(int(np.argmin(np.abs(w - lam))))
    if len(set(order)) != len(order):
        raise SpectralError("could not match clustered eigenvalues to eigenvectors")
    W = np.linalg.inv(V)
    projs = [np.outer(V[:, i], W[i, :]) for i in order]
    return lams, projs


def projector_derivative(
    M,
    H,
    which: int,
    n: int,
    at: float = 0.0,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> np.ndarray:
    """d^n/dz^n of the spectral projector of the ``which``-th eigenvalue.

    Taken along M + zH at z = ``at``; eigenvalues are indexed in the
    sorted clustered order. Requires a simple spectrum. The order-n term
    is n! sum over (n+1)-tuples of eigenvalue indices of
    u(lam_{k_0}, ..., lam_{k_n}) P_{k_0} H P_{k_1} H ... H P_{k_n}.
    """
    A = as_square_matrix(M) + complex(at) * as_square_matrix(H, "direction")
    Hm = as_square_matrix(H, "direction")
    lams, projs = _simple_spectrum_frame(A, cluster_tol, rank_tol)
    if not 0 <= which < len(lams):
        raise ValueError(f"eigenvalue index {which} out of range")
    if n == 0:
        return projs[which]
    anchor = lams[which]
    u = u_function(anchor, n)
    d = len(lams)
    total = np.zeros_like(Hm)
    for ks in itertools.product(range(d), repeat=n + 1):
        if which not in ks:
            continue  # no anchor among the arguments, the kernel vanishes
        coeff = u(*(lams[k] for k in ks))
        if coeff == 0:
            continue
        term = projs[ks[0]]
        for k in ks[1:]:
            term = term @ Hm @ projs[k]
        total = total + coeff * term
    return math.factorial(n) * total


def eigenvalue_derivative(
    M,
    H,
    which: int,
    n: int,
    at: float = 0.0,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> complex:
    """d^n/dz^n of the ``which``-th eigenvalue along M + zH at z = ``at``.

    Requires a simple spectrum. Order n >= 1 uses the order n-1 kernel:
    (n-1)! sum over n-tuples of u(lam_{k_0}, ..., lam_{k_{n-1}})
    Tr(P_{k_0} H P_{k_1} H ... P_{k_{n-1}} H).
    """
    A = as_square_matrix(M) + complex(at) * as_square_matrix(H, "direction")
    Hm = as_square_matrix(H, "direction")
    lams, projs = _simple_spectrum_frame(A, cluster_tol, rank_tol)
    if not 0 <= which < len(lams):
        raise ValueError(f"eigenvalue index {which} out of range")
    if n == 0:
        return complex(lams[which])
    anchor = lams[which]
    u = u_function(anchor, n - 1)
    d = len(lams)
    total = 0j
    for ks in itertools.product(range(d), repeat=n):
        if which not in ks:
            continue
        coeff = u(*(lams[k] for k in ks))
        if coeff == 0:
            continue
        term = projs[ks[0]]
        for k in ks[1:]:
            term = term @ Hm @ projs[k]
        total += coeff * complex(np.trace(term @ Hm))
    return math.factorial(n - 1) * total
