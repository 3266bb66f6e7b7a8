"""Tensor extensions of scalar functions to tuples of matrices.

The central construction: given f of k variables and square matrices
M_1, ..., M_k, build the interpolating polynomial P that matches f's
mixed derivatives on the product of the spectra (orders set by each
eigenvalue's multiplicity in the minimal polynomial) and evaluate

    sum_alpha c_alpha  M_1^{a_1} (x) ... (x) M_k^{a_k}.

The value does not depend on which matching polynomial is used, which is
what the independence-of-interpolant tests exercise. Two more routes
compute the same tensor: an eigenbasis sum for diagonalizable arguments
and a closed form for explicit Jordan matrices; they serve as mutual
cross-checks.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import FieldDomainError, NotDiagonalizableError
from .interp import hermite_basis, interpolate
from .scalarfield import ScalarField, derivative_grid
from .spectral import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_RANK_TOL,
    SpectralData,
    analyze,
    as_square_matrix,
)
from .tensor import OperatorTensor, contract_pair, poly_tensor_eval


def _slot_matrices(f: ScalarField, mats) -> list[np.ndarray]:
    arrs = [as_square_matrix(M, f"slot {l} matrix") for l, M in enumerate(mats)]
    if f.arity != len(arrs):
        raise ValueError(f"field of arity {f.arity} applied to {len(arrs)} matrices")
    if not arrs:
        raise ValueError("at least one matrix is required")
    return arrs


def f_otimes(
    f: ScalarField,
    mats,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
    spectra: list[SpectralData] | None = None,
    extra_multiplicity: int = 0,
) -> OperatorTensor:
    """The tensor extension of ``f`` at ``mats`` via interpolation.

    ``spectra`` overrides the per-slot eigenvalue analysis; pass it when
    the spectra are known exactly or are over-provisioned upper bounds
    (matching on a finer grid still yields the same tensor, it only asks
    more smoothness of ``f``). ``extra_multiplicity`` pads every grid
    order, which changes the interpolant but must not change the result;
    the invariance tests rely on that knob.
    """
    arrs = _slot_matrices(f, mats)
    if spectra is None:
        data = [analyze(M, cluster_tol, rank_tol) for M in arrs]
    else:
        data = list(spectra)
        if len(data) != len(arrs):
            raise ValueError(f"{len(arrs)} matrices but {len(data)} spectra given")
    pad = int(extra_multiplicity)
    if pad < 0:
        raise ValueError("extra_multiplicity must be nonnegative")
    grid_nodes = [
        [(lam, r + pad) for lam, r in sd.grid_entries()] for sd in data
    ]
    bases = [hermite_basis(nodes) for nodes in grid_nodes]
    try:
        grid = derivative_grid(f, grid_nodes)
    except FieldDomainError as exc:
        raise FieldDomainError(
            f"field is not defined on the spectral grid of the arguments: {exc}"
        ) from exc
    poly = interpolate(grid, bases)
    return poly_tensor_eval(poly, arrs)


def f_otimes_diagonalizable(
    f: ScalarField,
    mats,
    *,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> OperatorTensor:
    """Eigenbasis route: T = sum_m f(lam_m) prod_l v_{l m_l} (x) w_{l m_l}.

    Every argument must be diagonalizable; defective input raises
    :class:`NotDiagonalizableError` (the interpolation route
    :func:`f_otimes` handles those). Because only point values of ``f``
    enter, evaluation-only fields such as ``abs`` are usable here.
    """
    arrs = _slot_matrices(f, mats)
    for l, M in enumerate(arrs):
        sd = analyze(M, cluster_tol, rank_tol)
        if not sd.is_diagonalizable:
            raise NotDiagonalizableError(
                f"slot {l} matrix has minimal multiplicities {sd.min_mult}; "
                "use f_otimes, which handles defective matrices"
            )
    eigs = []
    vmats = []
    wmats = []
    for M in arrs:
        w, V = np.linalg.eig(M)
        eigs.append(w)
        vmats.append(V)
        wmats.append(np.linalg.inv(V))

    dims = [M.shape[0] for M in arrs]
    k = len(arrs)
    values = np.empty(tuple(dims), dtype=complex)
    for idx in itertools.product(*(range(d) for d in dims)):
        point = tuple(eigs[l][idx[l]] for l in range(k))
        values[idx] = f(*point)

    # T[i1, j1, ..., ik, jk] = sum_m values[m] prod_l V_l[i_l, m_l] W_l[m_l, j_l]
    shape = []
    for d in dims:
        shape.extend([d, d])
    total = np.zeros(tuple(shape), dtype=complex)
    for idx in itertools.product(*(range(d) for d in dims)):
        term = None
        for l, m in enumerate(idx):
            outer = np.multiply.outer(vmats[l][:, m], wmats[l][m, :])
            term = outer if term is None else np.multiply.outer(term, outer)
        total += values[idx] * term
    return OperatorTensor(total)


def jordan_matrix(blocks) -> np.ndarray:
    """Block-diagonal matrix with one Jordan block per (value, size) pair."""
    blocks = [(complex(lam), int(size)) for lam, size in blocks]
    if not blocks or any(size < 1 for _, size in blocks):
        raise ValueError("block sizes must be positive")
    dim = sum(size for _, size in blocks)
    J = np.zeros((dim, dim), dtype=complex)
    at = 0
    for lam, size in blocks:
        for i in range(size):
            J[at + i, at + i] = lam
            if i + 1 < size:
                J[at + i, at + i + 1] = 1.0
        at += size
    return J


def jordan_closed_form(f: ScalarField, mats, blocks_per_slot) -> OperatorTensor:
    """Entrywise formula for arguments in explicit Jordan form.

    ``blocks_per_slot`` declares each matrix's blocks as (value, size)
    pairs; the matrices must equal the declared structure entry for
    entry, with no tolerance. The tensor entry at (i_1, j_1, ..., i_k, j_k)
    vanishes unless every index pair lies upper-triangular in one block,
    and otherwise equals the mixed derivative
    prod_l (1/(j_l - i_l)!) d_l^{j_l - i_l} f at the block eigenvalues.
    """
    arrs = _slot_matrices(f, mats)
    specs = [list(b) for b in blocks_per_slot]
    if len(specs) != len(arrs):
        raise ValueError(f"{len(arrs)} matrices but {len(specs)} block structures given")
    for l, (M, blocks) in enumerate(zip(arrs, specs)):
        expected = jordan_matrix(blocks)
        if expected.shape != M.shape or not np.array_equal(expected, M):
            raise ValueError(
                f"slot {l} matrix does not equal its declared Jordan structure"
            )

    k = len(arrs)
    block_of = []  # global index -> block number
    offset_in = []  # global index -> position inside its block
    for blocks in specs:
        bmap = []
        omap = []
        for b, (_, size) in enumerate(blocks):
            bmap.extend([b] * size)
            omap.extend(range(size))
        block_of.append(bmap)
        offset_in.append(omap)

    # One derivative grid call covers every needed mixed derivative:
    # block m of slot l needs orders up to its size - 1.
    grid = derivative_grid(
        f, [[(lam, size) for lam, size in blocks] for blocks in specs]
    )

    dims = [M.shape[0] for M in arrs]
    shape = []
    for d in dims:
        shape.extend([d, d])
    total = np.zeros(tuple(shape), dtype=complex)
    for ij in itertools.product(*(range(d) for d in dims for _ in (0, 1))):
        # ij interleaves (i_1, j_1, i_2, j_2, ...)
        ivals = ij[0::2]
        jvals = ij[1::2]
        ok = True
        for l in range(k):
            if block_of[l][ivals[l]] != block_of[l][jvals[l]] or ivals[l] > jvals[l]:
                ok = False
                break
        if not ok:
            continue
        m_tuple = tuple(block_of[l][ivals[l]] for l in range(k))
        d_tuple = tuple(jvals[l] - ivals[l] for l in range(k))
        value = grid[(m_tuple, d_tuple)]
        for d in d_tuple:
            value /= math.factorial(d)
        total[ij] = value
    return OperatorTensor(total)


def chain_contract(T: OperatorTensor):
    """Contract neighbouring slots in sequence down to a single matrix.

    Every slot must have the same dimension. On a tensor built from a
    polynomial sum_alpha c_alpha M_1^{a_1} (x) ... (x) M_k^{a_k} the
    result is sum_alpha c_alpha M_1^{a_1} M_2^{a_2} ... M_k^{a_k}, the
    noncommutative ordered product.
    """
    dims = set(T.slot_dims)
    if len(dims) > 1:
        raise ValueError(f"chain contraction needs equal slot dims, got {T.slot_dims}")
    out = T
    while isinstance(out, OperatorTensor) and out.k > 1:
        out = contract_pair(out, 1, 0)
    return np.asarray(out.data)


def matrix_function(
    f: ScalarField,
    M,
    *,
    route: str = "interp",
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
    spectra: SpectralData | None = None,
) -> np.ndarray:
    """f(M) for a one-variable field; thin wrapper over the tensor routes."""
    if f.arity != 1:
        raise ValueError("matrix_function needs a one-variable field")
    if route == "interp":
        T = f_otimes(
            f,
            [M],
            cluster_tol=cluster_tol,
            rank_tol=rank_tol,
            spectra=None if spectra is None else [spectra],
        )
    elif route == "diag":
        T = f_otimes_diagonalizable(f, [M], cluster_tol=cluster_tol, rank_tol=rank_tol)
    else:
        raise ValueError(f"unknown route {route!r}")
    return np.asarray(T.data)
