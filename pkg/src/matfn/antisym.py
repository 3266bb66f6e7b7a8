"""The antisymmetrizer and what the tensor extension does on it.

Pairing the extension of a symmetric function against the antisymmetric
projector turns sums over distinct eigenvalue index tuples into a single
contraction, and restricting to the antisymmetric subspace diagonalizes
the extension over increasing index combinations. The determinant
expansion in power-sum traces drops out of the top exterior power.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .funcalc import f_otimes
from .scalarfield import ScalarField
from .spectral import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_RANK_TOL,
    analyze,
    as_square_matrix,
)
from .tensor import OperatorTensor, from_matrix


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def antisym_projector(dim: int, k: int) -> OperatorTensor:
    """Orthogonal projector of (C^dim)^(x k) onto the antisymmetric part.

    Idempotent, self-adjoint in the matrix view, with trace binom(dim, k);
    identically zero for k > dim.
    """
    if dim < 1 or k < 1:
        raise ValueError("dim and k must be positive")
    n = dim**k
    G = np.zeros((n, n), dtype=complex)
    strides = [dim ** (k - 1 - l) for l in range(k)]
    for perm in itertools.permutations(range(k)):
        sign = _perm_sign(perm)
        inv = [0] * k
        for l, pl in enumerate(perm):
            inv[pl] = l
        for P in itertools.product(range(dim), repeat=k):
            # row P, column Q with q_m = p_{perm^{-1}(m)}... the pairing
            # delta(p_l, q_{perm(l)}) fixes Q from P.
            row = sum(p * s for p, s in zip(P, strides))
            Q = tuple(P[inv[m]] for m in range(k))
            col = sum(q * s for q, s in zip(Q, strides))
            G[row, col] += sign
    G /= math.factorial(k)
    return from_matrix(G, (dim,) * k)


def distinct_tuple_sum(
    f: ScalarField,
    M,
    k: int,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> complex:
    """sum of f over k-tuples of distinct eigenvalue indices of M.

    Eigenvalues are counted with algebraic multiplicity and the indices,
    not the values, are pairwise distinct. Computed as k! times the full
    pairing of the tensor extension at k copies of M with the
    antisymmetric projector.
    """
    A = as_square_matrix(M)
    if f.arity != k:
        raise ValueError(f"field arity {f.arity} does not match k = {k}")
    sd = analyze(A, cluster_tol, rank_tol)
    T = f_otimes(f, [A] * k, spectra=[sd] * k)
    Pi = antisym_projector(A.shape[0], k)
    return math.factorial(k) * complex(np.trace(T.as_matrix() @ Pi.as_matrix()))


def _increasing_tuples(dim: int, k: int):
    return itertools.combinations(range(dim), k)


def wedge_basis(dim: int, k: int) -> np.ndarray:
    """Orthonormal wedge vectors as columns, one per increasing tuple.

    Column order is lexicographic in the index tuples; each column lives
    in C^(dim^k) with the row index running over plain product tuples.
    """
    n = dim**k
    cols = []
    strides = [dim ** (k - 1 - l) for l in range(k)]
    norm = 1.0 / math.sqrt(math.factorial(k))
    for combo in _increasing_tuples(dim, k):
        v = np.zeros(n, dtype=complex)
        for perm in itertools.permutations(range(k)):
            sign = _perm_sign(perm)
            idx = sum(combo[perm[l]] * strides[l] for l in range(k))
            v[idx] += sign * norm
        cols.append(v)
    return np.column_stack(cols)


def wedge_restrict(
    f: ScalarField,
    M,
    k: int,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> np.ndarray:
    """Matrix of the projected extension on the antisymmetric subspace.

    Rows and columns follow the lexicographic increasing-tuple basis of
    :func:`wedge_basis`. For diagonalizable M the eigenvalues of the
    result are the symmetrized values of f over increasing eigenvalue
    tuples.
    """
    A = as_square_matrix(M)
    if f.arity != k:
        raise ValueError(f"field arity {f.arity} does not match k = {k}")
    if k > A.shape[0]:
        raise ValueError(f"k = {k} exceeds the dimension {A.shape[0]}")
    sd = analyze(A, cluster_tol, rank_tol)
    T = f_otimes(f, [A] * k, spectra=[sd] * k)
    Pi = antisym_projector(A.shape[0], k).as_matrix()
    B = wedge_basis(A.shape[0], k)
    return B.conj().T @ Pi @ T.as_matrix() @ Pi @ B


def det_from_traces(M) -> complex:
    """Determinant from the power-sum traces Tr M, Tr M^2, ..., Tr M^d.

    The expansion runs over multisets of cycle lengths: each exponent
    vector (a_1, ..., a_d) with sum i a_i = d contributes
    (-1)^(d - sum a_i) / prod(a_i! i^{a_i}) prod Tr(M^i)^{a_i}.
    """
    A = as_square_matrix(M)
    d = A.shape[0]
    traces = []
    P = np.eye(d, dtype=complex)
    for _ in range(d):
        P = P @ A
        traces.append(complex(np.trace(P)))

    total = 0j
    for counts in _cycle_type_vectors(d):
        weight = 1.0
        power = 1.0 + 0j
        parts = 0
        for i, a in enumerate(counts, start=1):
            weight *= math.factorial(a) * i**a
            power *= traces[i - 1] ** a
            parts += a
        total += (-1) ** (d - parts) / weight * power
    return total


def _cycle_type_vectors(d: int):
    """All (a_1, ..., a_d) with sum i a_i = d."""

    def rec(i, remaining):
        if i > d:
            if remaining == 0:
                yield ()
            return
        for a in range(remaining // i + 1):
            for rest in rec(i + 1, remaining - a * i):
                yield (a,) + rest

    yield from rec(1, d)
