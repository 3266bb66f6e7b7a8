"""Eigenvalue clustering and minimal-polynomial multiplicities.

Computed spectra of nearby-defective matrices scatter; every consumer in
this package goes through the clustering here so that one tolerance
discipline decides what counts as a single eigenvalue.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SpectralError
from .scalarfield import MultiPoly

DEFAULT_CLUSTER_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-10


def as_square_matrix(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def hs_norm(A) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(np.asarray(A)))


def _describe(M: np.ndarray) -> str:
    return np.array2string(M, precision=4, suppress_small=True, threshold=16)


@dataclass(frozen=True)
class SpectralData:
    """Clustered spectrum of one matrix.

    ``eigenvalues`` are cluster centroids sorted by (real, imag);
    ``alg_mult`` counts computed eigenvalues per cluster; ``min_mult`` is
    the multiplicity of each eigenvalue in the minimal polynomial (1 for
    every eigenvalue iff the matrix is diagonalizable).
    """

    eigenvalues: tuple[complex, ...]
    alg_mult: tuple[int, ...]
    min_mult: tuple[int, ...]
    dim: int
    cluster_tol: float

    def __post_init__(self):
        if not (len(self.eigenvalues) == len(self.alg_mult) == len(self.min_mult)):
            raise ValueError("spectral data fields have mismatched lengths")
        if sum(self.alg_mult) != self.dim:
            raise ValueError("algebraic multiplicities must sum to the dimension")
        for s, r in zip(self.alg_mult, self.min_mult):
            if not 1 <= r <= s:
                raise ValueError(f"minimal multiplicity {r} outside [1, {s}]")

    @property
    def is_diagonalizable(self) -> bool:
        return all(r == 1 for r in self.min_mult)

    def grid_entries(self) -> list[tuple[complex, int]]:
        """(eigenvalue, multiplicity) pairs in the stored order."""
        return list(zip(self.eigenvalues, self.min_mult))


def eigen_cluster(M, tol: float = DEFAULT_CLUSTER_TOL) -> tuple[tuple[complex, ...], tuple[int, ...]]:
    """Cluster the computed eigenvalues of ``M``.

    ``tol`` is relative: two eigenvalues belong to one cluster when their
    distance is at most ``tol * ||M||_HS``. Clusters are merged until the
    centroids are pairwise farther apart than that threshold, each
    centroid weighted by its multiplicity, and the result is sorted by
    (real, imag).
    """
    A = as_square_matrix(M)
    try:
        w = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(
            f"eigenvalue iteration failed for matrix\n{_describe(A)}"
        ) from exc
    threshold = float(tol) * hs_norm(A)

    clusters = [[z] for z in w]
    merged = True
    while merged and len(clusters) > 1:
        merged = False
        cents = [sum(c) / len(c) for c in clusters]
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                if abs(cents[i] - cents[j]) <= threshold:
                    clusters[i].extend(clusters[j])
                    del clusters[j]
                    merged = True
                    break
            if merged:
                break

    pairs = sorted(
        ((sum(c) / len(c), len(c)) for c in clusters),
        key=lambda p: (p[0].real, p[0].imag),
    )
    values = tuple(complex(v) for v, _ in pairs)
    counts = tuple(int(n) for _, n in pairs)
    return values, counts


def minimal_multiplicities(
    M, eigenvalues, rank_tol: float = DEFAULT_RANK_TOL
) -> tuple[int, ...]:
    """Multiplicity of each eigenvalue in the minimal polynomial.

    For each eigenvalue the rank of (M - lam I)^j is tracked until it
    stabilizes; the first stable power is the multiplicity. Ranks count
    singular values above ``rank_tol * sigma_max(M - lam I)^j``, the scale
    a j-fold product can reach, so that numerically nilpotent powers read
    as rank zero. A singular value within a factor 10 of the threshold
    triggers a warning since the decision is then fragile.
    """
    A = as_square_matrix(M)
    d = A.shape[0]
    out = []
    for lam in eigenvalues:
        B = A - complex(lam) * np.eye(d)
        sigma1 = float(np.linalg.svd(B, compute_uv=False)[0]) if d else 0.0
        if sigma1 == 0.0:
            out.append(1)  # B = 0, the eigenvalue is the whole spectrum
            continue

        def rank_of(P, j):
            s = np.linalg.svd(P, compute_uv=False)
            thr = rank_tol * sigma1**j
            fragile = np.any((s > thr / 10) & (s < thr * 10))
            if fragile:
                warnings.warn(
                    f"rank decision for eigenvalue {lam} at power {j} is within "
                    f"10x of the threshold {thr:.3e}",
                    RuntimeWarning,
                    stacklevel=3,
                )
            return int(np.count_nonzero(s > thr))

        prev = rank_of(B, 1)
        if prev == d:
            raise SpectralError(
                f"{lam} is not an eigenvalue of the matrix (full-rank shift)"
            )
        P = B
        r = None
        for j in range(1, d + 1):
            P = P @ B
            cur = rank_of(P, j + 1)
            if cur == prev:
                r = j
                break
            prev = cur
        out.append(r if r is not None else d)
    return tuple(out)


def eigenvectors(M, eigenvalues, rank_tol: float = DEFAULT_RANK_TOL):
    """Unit kernel bases of (M - lam I), one list per eigenvalue.

    The lists span the geometric eigenspaces; for a diagonalizable matrix
    the concatenation is a basis, for a defective one it is shorter and
    no vectors are invented. Each vector is normalized with its largest
    component rotated to the positive real axis, which pins the phase.
    """
    A = as_square_matrix(M)
    d = A.shape[0]
    out = []
    for lam in eigenvalues:
        B = A - complex(lam) * np.eye(d)
        _, s, vh = np.linalg.svd(B)
        thr = rank_tol * (s[0] if s[0] > 0 else 1.0)
        null_dim = int(np.count_nonzero(s <= thr)) + (d - len(s))
        vecs = []
        for row in vh[d - null_dim :] if null_dim else []:
            v = row.conj()
            pivot = v[np.argmax(np.abs(v))]
            v = v * (abs(pivot) / pivot)
            vecs.append(v)
        out.append(vecs)
    return out


def analyze(
    M,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> SpectralData:
    """Cluster the spectrum and attach minimal-polynomial multiplicities."""
    A = as_square_matrix(M)
    values, counts = eigen_cluster(A, cluster_tol)
    mins = minimal_multiplicities(A, values, rank_tol)
    return SpectralData(
        eigenvalues=values,
        alg_mult=counts,
        min_mult=mins,
        dim=A.shape[0],
        cluster_tol=float(cluster_tol),
    )


def minimal_polynomial(data: SpectralData) -> MultiPoly:
    """prod_m (x - lam_m)^{r_m} as a univariate polynomial."""
    poly = MultiPoly(1, {(0,): 1.0})
    for lam, r in zip(data.eigenvalues, data.min_mult):
        factor = MultiPoly(1, {(1,): 1.0, (0,): -lam})
        for _ in range(r):
            poly = poly * factor
    return poly
