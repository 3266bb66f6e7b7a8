"""Interpolation on spectra with derivative conditions.

The dual basis solved for here consists of polynomials P_{mj} with

    d^{j'}/dx^{j'} P_{mj}(lam_{m'}) = 1 if (m, j) == (m', j') else 0,

one for every node m and derivative order j < r_m. Any function with
enough derivatives at the nodes then has the interpolant
sum f^{(j)}(lam_m) P_{mj}, and products of one such basis per variable
interpolate mixed derivative grids of several variables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InterpolationError
from .scalarfield import MultiPoly

#: Distinct nodes closer than this cannot be told apart reliably by the
#: confluent Vandermonde system; merging them (one node, higher order) is
#: the caller's decision to make.
NODE_SEPARATION_LIMIT = 1e-12


@dataclass(frozen=True)
class HermiteBasis:
    """Dual polynomial basis for one variable's interpolation nodes.

    ``nodes`` holds (value, order) pairs; ``coeff`` column t is the
    monomial coefficient vector of the t-th dual polynomial, columns
    ordered like ``functionals``. ``condition`` is the condition number
    of the confluent Vandermonde system that produced them.
    """

    nodes: tuple[tuple[complex, int], ...]
    coeff: np.ndarray
    condition: float

    @property
    def size(self) -> int:
        return self.coeff.shape[0]

    @property
    def functionals(self) -> list[tuple[int, int]]:
        return [(m, j) for m, (_, r) in enumerate(self.nodes) for j in range(r)]

    def coeff_vector(self, m: int, j: int) -> np.ndarray:
        pos = 0
        for mm, (_, r) in enumerate(self.nodes):
            if mm == m:
                if j >= r:
                    raise ValueError(f"order {j} out of range for node {m} (order {r})")
                return self.coeff[:, pos + j]
            pos += r
        raise ValueError(f"node index {m} out of range")

    def polynomials(self) -> list[MultiPoly]:
        out = []
        for t in range(self.size):
            out.append(
                MultiPoly(1, {(n,): c for n, c in enumerate(self.coeff[:, t]) if c != 0})
            )
        return out


def _confluent_vandermonde(nodes) -> np.ndarray:
    n_total = sum(r for _, r in nodes)
    A = np.zeros((n_total, n_total), dtype=complex)
    row = 0
    for lam, r in nodes:
        for j in range(r):
            for n in range(j, n_total):
                fall = math.perm(n, j)
                A[row, n] = fall * lam ** (n - j)
            row += 1
    return A


def hermite_basis(nodes) -> HermiteBasis:
    """Solve for the dual basis on ``nodes`` = [(value, order), ...]."""
    cleaned = []
    for lam, r in nodes:
        r = int(r)
        if r < 1:
            raise ValueError("node orders must be at least 1")
        cleaned.append((complex(lam), r))
    if not cleaned:
        raise ValueError("at least one node is required")
    for (a, _), (b, _) in itertools.combinations(cleaned, 2):
        if abs(a - b) < NODE_SEPARATION_LIMIT:
            raise InterpolationError(
                f"nodes {a} and {b} are closer than {NODE_SEPARATION_LIMIT}; "
                "merge them into one node of higher order"
            )
    A = _confluent_vandermonde(cleaned)
    n_total = A.shape[0]
    try:
        C = np.linalg.solve(A, np.eye(n_total, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise InterpolationError(
            f"confluent Vandermonde system for nodes {cleaned} is singular"
        ) from exc
    condition = float(np.linalg.cond(A))
    return HermiteBasis(nodes=tuple(cleaned), coeff=C, condition=condition)


def interpolate(grid: dict, bases: list[HermiteBasis]) -> MultiPoly:
    """The polynomial matching a mixed derivative grid.

    ``grid`` maps ``(m_tuple, j_tuple)`` to the prescribed value of
    (prod_l d_l^{j_l}) P at the node tuple; one basis per variable fixes
    the nodes. The grid must be complete. The result is verified against
    the grid and an :class:`InterpolationError` carries the residual if
    the defining conditions are not met to within what the conditioning
    allows.
    """
    k = len(bases)
    if k == 0:
        raise ValueError("at least one variable is required")

    required = set()
    for combo in itertools.product(*(b.functionals for b in bases)):
        m_t = tuple(m for m, _ in combo)
        j_t = tuple(j for _, j in combo)
        required.add((m_t, j_t))
    given = set(grid)
    missing = required - given
    if missing:
        sample = sorted(missing)[:4]
        raise InterpolationError(
            f"derivative grid is missing {len(missing)} entries, e.g. {sample}"
        )
    extra = given - required
    if extra:
        sample = sorted(extra)[:4]
        raise InterpolationError(f"derivative grid has unknown keys, e.g. {sample}")

    shape = tuple(b.size for b in bases)
    dense = np.zeros(shape, dtype=complex)
    for (m_t, j_t), val in grid.items():
        term = None
        for l in range(k):
            vec = bases[l].coeff_vector(m_t[l], j_t[l])
            term = vec if term is None else np.multiply.outer(term, vec)
        dense = dense + complex(val) * term

    _verify_against_grid(dense, grid, bases)

    coeffs = {}
    for alpha in np.ndindex(*shape):
        c = dense[alpha]
        if c != 0:
            coeffs[alpha] = c
    return MultiPoly(k, coeffs)


def _verify_against_grid(dense: np.ndarray, grid: dict, bases: list[HermiteBasis]):
    # Applying each variable's confluent Vandermonde matrix to the
    # coefficient tensor evaluates every grid functional at once.
    values = dense
    for l, b in enumerate(bases):
        A = _confluent_vandermonde(b.nodes)
        values = np.moveaxis(np.tensordot(A, values, axes=(1, l)), 0, l)

    k = len(bases)
    positions = []
    for b in bases:
        pos = {}
        for t, (m, j) in enumerate(b.functionals):
            pos[(m, j)] = t
        positions.append(pos)

    scale = max(1.0, max(abs(complex(v)) for v in grid.values()))
    kappa = 1.0
    for b in bases:
        kappa *= max(b.condition, 1.0)
    allowed = max(1e-10 * kappa * scale, 1e-12)

    worst = 0.0
    for (m_t, j_t), val in grid.items():
        idx = tuple(positions[l][(m_t[l], j_t[l])] for l in range(k))
        worst = max(worst, abs(values[idx] - complex(val)))
    if worst > allowed:
        raise InterpolationError(
            f"interpolant misses its defining grid by {worst:.3e} "
            f"(allowed {allowed:.3e} at condition product {kappa:.3e})"
        )
