"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
helpers here fix the conventions shared by the rest of the package:

* the trace is the *normalized* trace ``trace(x) / N`` on ``M_N``;
* the Hilbert-Schmidt inner product is ``<x, y> = tr(y^* x)`` with that trace;
* :func:`vec` flattens row-major and divides by ``sqrt(N)``, so that the
  Euclidean inner product of two vectorized matrices equals their
  Hilbert-Schmidt inner product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ClusterAmbiguity, NotNormal

__all__ = [
    "SpectralDecomposition",
    "as_cmat",
    "dagger",
    "kron",
    "kron_all",
    "tr_norm",
    "hs_inner",
    "vec",
    "unvec",
    "identity",
    "matrix_unit",
    "uniform_projection",
    "pauli_x",
    "pauli_y",
    "pauli_z",
    "swap_operator",
    "block_diag",
    "is_unitary",
    "is_normal",
    "max_abs",
    "random_unitary",
    "eig_normal",
    "nullspace_basis",
    "orthonormalize_hs",
    "orthonormal_rows",
]


def as_cmat(a) -> np.ndarray:
    """Return ``a`` as a two-dimensional ``complex128`` array."""
    out = np.asarray(a, dtype=np.complex128)
    if out.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {out.shape}")
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(a).T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the row-major index rule.

    ``kron(A, B)[i*rB + k, j*cB + l] == A[i, j] * B[k, l]``.
    """
    return np.kron(as_cmat(a), as_cmat(b))


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    """Left-to-right Kronecker product of a nonempty sequence."""
    mats = list(mats)
    if not mats:
        return np.ones((1, 1), dtype=np.complex128)
    return reduce(kron, mats)


def tr_norm(a: np.ndarray) -> complex:
    """Normalized trace ``trace(a) / N``."""
    return complex(np.trace(a)) / a.shape[0]


def hs_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``tr(y^* x)`` under the normalized trace."""
    return complex(np.vdot(y, x)) / x.shape[0]


def vec(x: np.ndarray) -> np.ndarray:
    """Row-major flattening scaled so that ``vdot(vec(y), vec(x)) == hs_inner(x, y)``."""
    return np.asarray(x, dtype=np.complex128).reshape(-1) / np.sqrt(x.shape[0])


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`vec` for an ``n x n`` matrix."""
    return np.asarray(v, dtype=np.complex128).reshape(n, n) * np.sqrt(n)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def matrix_unit(i: int, j: int, n: int) -> np.ndarray:
    """Matrix unit with a single 1 at (zero-based) position ``(i, j)``."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def uniform_projection(n: int) -> np.ndarray:
    """Rank-one projection onto the all-ones vector, ``(1/n) * ones``."""
    return np.full((n, n), 1.0 / n, dtype=np.complex128)


def pauli_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


def pauli_y() -> np.ndarray:
    return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


def pauli_z() -> np.ndarray:
    return np.array([[1, 0], [0, -1]], dtype=np.complex128)


def swap_operator(d1: int, d2: int) -> np.ndarray:
    """Permutation ``S`` with ``S (x kron y) = y kron x`` for ``x`` in C^d1, ``y`` in C^d2.

    Consequently ``S (A kron B) S^* = B kron A`` for ``A`` of size ``d1``.
    """
    s = np.zeros((d1 * d2, d1 * d2), dtype=np.complex128)
    for i in range(d1):
        for j in range(d2):
            s[j * d1 + i, i * d2 + j] = 1.0
    return s


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    return np.asarray(sla.block_diag(*blocks), dtype=np.complex128)


def max_abs(a: np.ndarray) -> float:
    """Entrywise max norm (0 for an empty array)."""
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def is_unitary(a: np.ndarray, tol: float = 1e-9) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return max_abs(a @ dagger(a) - np.eye(a.shape[0])) <= tol


def is_normal(a: np.ndarray, tol: float = 1e-8) -> bool:
    return max_abs(a @ dagger(a) - dagger(a) @ a) <= tol


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Clustered spectral data of a normal matrix.

    Attributes
    ----------
    eigenvalues:
        One representative (the cluster mean) per eigenvalue cluster.
    projectors:
        Orthogonal projections onto the corresponding eigenspaces.
    multiplicities:
        Rank of each projector.
    bases:
        Orthonormal columns spanning each eigenspace, in the same order.
    """

    eigenvalues: tuple[complex, ...]
    projectors: tuple[np.ndarray, ...]
    multiplicities: tuple[int, ...]
    bases: tuple[np.ndarray, ...] = field(repr=False, default=())

    @property
    def dimension(self) -> int:
        return int(sum(self.multiplicities))

    def reconstruct(self) -> np.ndarray:
        return sum(value * p for value, p in zip(self.eigenvalues, self.projectors))


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage clusters of complex numbers at distance ``<= tol``."""
    n = len(values)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(values[:, None] - values[None, :])
    ambiguous = (dist > tol) & (dist < 2 * tol)
    if np.any(ambiguous):
        i, j = np.argwhere(ambiguous)[0]
        raise ClusterAmbiguity(
            f"eigenvalues {values[i]:.3e} and {values[j]:.3e} are {dist[i, j]:.3e} apart, "
            f"inside the ambiguity band [{tol:.1e}, {2 * tol:.1e})"
        )
    for i, j in np.argwhere(np.triu(dist <= tol, k=1)):
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def eig_normal(a: np.ndarray, cluster_tol: float = 1e-7) -> SpectralDecomposition:
    """Spectral decomposition of a normal matrix with eigenvalue clustering.

    The complex Schur form of a normal matrix is diagonal, so the Schur
    vectors form an orthonormal eigenbasis; eigenvalues closer than
    ``cluster_tol`` are merged into one cluster.

    Raises
    ------
    NotNormal
        If ``max|A A^* - A^* A| > 1e-8``.
    ClusterAmbiguity
        If two eigenvalues lie in ``[cluster_tol, 2 cluster_tol)`` of each other.
    """
    a = as_cmat(a)
    if not is_normal(a, 1e-8):
        raise NotNormal("matrix is not normal within 1e-8")
    t, z = sla.schur(a, output="complex")
    values = np.diag(t).copy()
    groups = _cluster(values, cluster_tol)
    reps = [complex(np.mean(values[g])) for g in groups]
    order = sorted(range(len(groups)), key=lambda k: (round(reps[k].real, 9), round(reps[k].imag, 9)))
    eigenvalues, projectors, mults, bases = [], [], [], []
    for k in order:
        cols = z[:, groups[k]]
        eigenvalues.append(reps[k])
        projectors.append(cols @ dagger(cols))
        mults.append(len(groups[k]))
        bases.append(cols)
    return SpectralDecomposition(tuple(eigenvalues), tuple(projectors), tuple(mults), tuple(bases))


def nullspace_basis(a: np.ndarray, tol: float = 1e-10, atol: float = 0.0) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``a``.

    The kernel is spanned by the right singular vectors whose singular
    values are at most ``max(tol * s_max, atol)`` with ``s_max`` the largest singular value; for ``a == 0`` it is
    everything.  The absolute floor ``atol`` matters when ``a`` is pure
    rounding noise, where a purely relative cut would report full rank.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n, dtype=np.complex128)
    # the right factor is square either way; the left one is not needed
    _, s, vh = np.linalg.svd(a, full_matrices=a.shape[0] < n)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(n, dtype=np.complex128)
    rank = int(np.sum(s > max(tol * smax, atol)))
    return dagger(vh[rank:])


def orthonormal_rows(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``v`` (rank cut at ``tol`` times the largest singular value)."""
    v = np.atleast_2d(np.asarray(v, dtype=np.complex128))
    if v.shape[0] == 0:
        return v
    _, s, vh = np.linalg.svd(v, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return v[:0]
    rank = int(np.sum(s > tol * s[0]))
    return vh[:rank]


def orthonormalize_hs(mats: Sequence[np.ndarray], tol: float = 1e-10) -> list[np.ndarray]:
    """Gram-Schmidt under the normalized Hilbert-Schmidt inner product.

    Linearly dependent inputs are dropped, so the length of the result is
    the rank of the input family.  Each vector is orthogonalized twice
    against the accepted ones to keep the Gram matrix at the identity to
    working precision.
    """
    out: list[np.ndarray] = []
    for m in mats:
        x = np.array(m, dtype=np.complex128)
        for _ in range(2):
            for q in out:
                x = x - hs_inner(x, q) * q
        norm = np.sqrt(max(hs_inner(x, x).real, 0.0))
        if norm > tol:
            out.append(x / norm)
    return out
