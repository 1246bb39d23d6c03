"""Finite-dimensional unital *-subalgebras of ``M_N``.

A :class:`SubAlgebra` is stored in one of two interchangeable forms:

* a *basis* form: rows of a matrix whose rows are :func:`~spinlab.linalg.vec`
  images of a Hilbert-Schmidt orthonormal basis;
* a *structured* form ``(U, block_sizes, multiplicities)`` describing
  ``Ad_U(direct sum of M_{n_r} kron I_{m_r})``.

The structured form scales to large ambient dimensions because
expectations, random elements, central projections and commutants are all
computed blockwise.  The basis form is materialized lazily and only for
``N <= 64``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CenterDegenerate, ClusterAmbiguity, DimensionOverflow, NonIntegerEntry, NotIncluded
from .linalg import (
    as_cmat,
    block_diag,
    dagger,
    eig_normal,
    identity,
    kron,
    max_abs,
    nullspace_basis,
    orthonormal_rows,
    swap_operator,
    unvec,
    vec,
)

__all__ = [
    "BASIS_LIMIT",
    "SUPEROPERATOR_LIMIT",
    "Structure",
    "SubAlgebra",
    "Superoperator",
    "WedderburnData",
    "InclusionMatrix",
    "generate_algebra",
    "commutant",
    "intersect",
    "conditional_expectation",
    "wedderburn",
    "inclusion_matrix",
    "squared_norm",
]

#: Largest ambient dimension for which an explicit basis is materialized.
BASIS_LIMIT = 64
#: Largest ambient dimension for which an ``N^2 x N^2`` superoperator is formed.
SUPEROPERATOR_LIMIT = 32

_DEFAULT_SEED = 20240917


def _rng(rng: np.random.Generator | None) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(_DEFAULT_SEED)


def _random_complex(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@dataclass(frozen=True)
class Structure:
    """``Ad_U`` of a block-diagonal algebra ``direct sum of M_{n_r} kron I_{m_r}``.

    Blocks are laid out contiguously; block ``r`` occupies ``n_r * m_r``
    consecutive coordinates in the order ``(i, a)`` with ``i < n_r`` the
    matrix index and ``a < m_r`` the multiplicity index.
    """

    unitary: np.ndarray
    block_sizes: tuple[int, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        n = self.unitary.shape[0]
        total = sum(b * m for b, m in zip(self.block_sizes, self.multiplicities))
        if total != n:
            raise ValueError(f"blocks cover {total} coordinates, ambient is {n}")

    @property
    def offsets(self) -> list[int]:
        out, pos = [], 0
        for b, m in zip(self.block_sizes, self.multiplicities):
            out.append(pos)
            pos += b * m
        return out

    def embed(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        """``U (direct sum of X_r kron I_{m_r}) U^*`` for the given ``X_r``."""
        inner = block_diag(*[kron(x, identity(m)) for x, m in zip(blocks, self.multiplicities)])
        return self.unitary @ inner @ dagger(self.unitary)

    def compress(self, x: np.ndarray) -> list[np.ndarray]:
        """Blockwise partial traces: the ``X_r`` with ``E(x) = embed(X_r)``."""
        y = dagger(self.unitary) @ x @ self.unitary
        out = []
        for off, b, m in zip(self.offsets, self.block_sizes, self.multiplicities):
            blk = y[off : off + b * m, off : off + b * m].reshape(b, m, b, m)
            out.append(np.einsum("iaja->ij", blk) / m)
        return out


class SubAlgebra:
    """A unital *-subalgebra of ``M_N``.

    Parameters
    ----------
    ambient_dim:
        The size ``N`` of the ambient matrix algebra.
    rows:
        Optional ``(d, N^2)`` array whose rows are ``vec`` images of an
        orthonormal basis.
    structure:
        Optional :class:`Structure`.  At least one of ``rows`` and
        ``structure`` must be given.
    label:
        Free-form name used in reports.
    """

    def __init__(
        self,
        ambient_dim: int,
        rows: np.ndarray | None = None,
        structure: Structure | None = None,
        label: str = "",
    ):
        if rows is None and structure is None:
            raise ValueError("need a basis or a structure")
        self.ambient_dim = int(ambient_dim)
        self._rows = None if rows is None else np.asarray(rows, dtype=np.complex128)
        self.structure = structure
        self.label = label

    # ------------------------------------------------------------------ constructors
    @classmethod
    def from_matrices(cls, mats: Sequence[np.ndarray], ambient_dim: int, tol: float = 1e-10, label: str = ""):
        """Span of ``mats`` (assumed already closed; no closure is performed)."""
        if not mats:
            return cls(ambient_dim, np.zeros((0, ambient_dim**2), dtype=np.complex128), label=label)
        v = np.stack([vec(as_cmat(m)) for m in mats])
        return cls(ambient_dim, orthonormal_rows(v, tol), label=label)

    @classmethod
    def from_structure(cls, unitary, block_sizes, multiplicities, label: str = ""):
        u = as_cmat(unitary)
        s = Structure(u, tuple(int(b) for b in block_sizes), tuple(int(m) for m in multiplicities))
        return cls(u.shape[0], structure=s, label=label)

    @classmethod
    def full(cls, n: int, label: str = "") -> "SubAlgebra":
        return cls.from_structure(identity(n), [n], [1], label=label or f"M_{n}")

    @classmethod
    def scalars(cls, n: int, label: str = "") -> "SubAlgebra":
        return cls.from_structure(identity(n), [1], [n], label=label or "C")

    @classmethod
    def diagonal(cls, n: int, label: str = "") -> "SubAlgebra":
        return cls.from_structure(identity(n), [1] * n, [1] * n, label=label or f"D_{n}")

    @classmethod
    def diagonal_tensor_full(cls, n: int, k: int, label: str = "") -> "SubAlgebra":
        """``D_n kron M_k`` inside ``M_{nk}``: ``n`` diagonal blocks of size ``k``."""
        return cls.from_structure(identity(n * k), [k] * n, [1] * n, label=label)

    @classmethod
    def scalar_tensor_full(cls, n: int, k: int, label: str = "") -> "SubAlgebra":
        """``I_n kron M_k`` inside ``M_{nk}``."""
        return cls.from_structure(swap_operator(k, n), [k], [n], label=label)

    # ------------------------------------------------------------------ basic data
    @property
    def dim(self) -> int:
        if self.structure is not None:
            return int(sum(b * b for b in self.structure.block_sizes))
        return int(self._rows.shape[0])

    @property
    def rows(self) -> np.ndarray:
        """Orthonormal ``vec`` rows; materialized on demand for ``N <= 64``."""
        if self._rows is None:
            if self.ambient_dim > BASIS_LIMIT:
                raise DimensionOverflow(
                    f"explicit basis requested at ambient {self.ambient_dim} > {BASIS_LIMIT}"
                )
            self._rows = self._structured_rows()
        return self._rows

    @property
    def basis(self) -> list[np.ndarray]:
        n = self.ambient_dim
        return [unvec(r, n) for r in self.rows]

    def _structured_rows(self) -> np.ndarray:
        s = self.structure
        n = self.ambient_dim
        u, ud = s.unitary, dagger(s.unitary)
        rows = []
        for off, b, m in zip(s.offsets, s.block_sizes, s.multiplicities):
            scale = np.sqrt(n / m)
            for i in range(b):
                for j in range(b):
                    inner = np.zeros((n, n), dtype=np.complex128)
                    for a in range(m):
                        inner[off + i * m + a, off + j * m + a] = scale
                    rows.append(vec(u @ inner @ ud))
        return np.array(rows)

    def __repr__(self) -> str:
        form = "structured" if self.structure is not None else "basis"
        return f"SubAlgebra({self.label or '?'}, N={self.ambient_dim}, dim={self.dim}, {form})"

    # ------------------------------------------------------------------ operations
    def expectation(self, x: np.ndarray) -> np.ndarray:
        """Trace-preserving conditional expectation onto this algebra."""
        x = as_cmat(x)
        if self.structure is not None:
            return self.structure.embed(self.structure.compress(x))
        r = self.rows
        return unvec(r.T @ (np.conj(r) @ vec(x)), self.ambient_dim)

    def residual(self, x: np.ndarray) -> float:
        """``max|x - E(x)|``; zero exactly when ``x`` lies in the algebra."""
        return max_abs(x - self.expectation(x))

    def contains(self, x: np.ndarray, tol: float = 1e-8) -> bool:
        return self.residual(x) <= tol * max(1.0, max_abs(x))

    def random_element(self, rng: np.random.Generator | None = None, hermitian: bool = False) -> np.ndarray:
        rng = _rng(rng)
        if self.structure is not None:
            blocks = []
            for b in self.structure.block_sizes:
                x = _random_complex((b, b), rng)
                blocks.append(x + dagger(x) if hermitian else x)
            return self.structure.embed(blocks)
        c = _random_complex(self.dim, rng)
        x = unvec(self.rows.T @ c, self.ambient_dim)
        return x + dagger(x) if hermitian else x

    def conjugate(self, u: np.ndarray, label: str = "") -> "SubAlgebra":
        """``Ad_u`` of this algebra."""
        u = as_cmat(u)
        if self.structure is not None:
            s = self.structure
            return SubAlgebra.from_structure(u @ s.unitary, s.block_sizes, s.multiplicities, label)
        n = self.ambient_dim
        ud = dagger(u)
        rows = np.array([vec(u @ unvec(r, n) @ ud) for r in self._rows])
        return SubAlgebra(n, rows, label=label)

    def ampliate(self, k: int, label: str = "") -> "SubAlgebra":
        """``I_k kron A`` inside ``M_{kN}``."""
        if k == 1:
            return self
        n = self.ambient_dim
        if self.structure is not None:
            s = self.structure
            u = kron(identity(k), s.unitary) @ swap_operator(n, k)
            mults = [m * k for m in s.multiplicities]
            return SubAlgebra.from_structure(u, s.block_sizes, mults, label or self.label)
        eye = identity(k)
        rows = np.array([vec(kron(eye, unvec(r, n))) for r in self._rows])
        return SubAlgebra(k * n, rows, label=label or self.label)

    def embed_into(self, ambient_dim: int) -> "SubAlgebra":
        """Ampliate to the given ambient dimension (a multiple of ``N``)."""
        if ambient_dim % self.ambient_dim:
            raise ValueError(f"{ambient_dim} is not a multiple of {self.ambient_dim}")
        return self.ampliate(ambient_dim // self.ambient_dim)

    def is_subalgebra_of(self, other: "SubAlgebra", tol: float = 1e-8, rng=None) -> bool:
        return inclusion_residual(self, other, rng) <= tol

    def closure_residual(self, rng: np.random.Generator | None = None, trials: int = 3) -> float:
        """Worst distance of products and adjoints of random elements from the algebra."""
        rng = _rng(rng)
        worst = 0.0
        for _ in range(trials):
            x, y = self.random_element(rng), self.random_element(rng)
            scale = max(1.0, max_abs(x) * max_abs(y) * self.ambient_dim)
            worst = max(worst, self.residual(x @ y) / scale, self.residual(dagger(x)) / scale)
        return worst


def inclusion_residual(small: SubAlgebra, large: SubAlgebra, rng=None, trials: int = 2) -> float:
    """Relative distance of random elements of ``small`` from ``large``.

    A generic element of ``small`` lies in ``large`` only if all of
    ``small`` does, so a couple of random probes decide inclusion.
    """
    rng = _rng(rng)
    worst = 0.0
    for _ in range(trials):
        x = small.random_element(rng)
        worst = max(worst, large.residual(x) / max(1.0, max_abs(x)))
    return worst


def spans_equal_residual(a: SubAlgebra, b: SubAlgebra, rng=None) -> float:
    """Symmetric inclusion residual, or ``inf`` when the dimensions differ."""
    if a.dim != b.dim or a.ambient_dim != b.ambient_dim:
        return float("inf")
    return max(inclusion_residual(a, b, rng), inclusion_residual(b, a, rng))


class Superoperator:
    """A linear map on ``M_N`` stored as an ``N^2 x N^2`` matrix on ``vec`` images."""

    def __init__(self, ambient_dim: int, matrix: np.ndarray):
        self.ambient_dim = int(ambient_dim)
        self.matrix = np.asarray(matrix, dtype=np.complex128)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(x), self.ambient_dim)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.ambient_dim, self.matrix @ other.matrix)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.ambient_dim, self.matrix - other.matrix)

    def norm(self) -> float:
        """Operator norm with respect to the Hilbert-Schmidt inner product."""
        return float(np.linalg.norm(self.matrix, 2)) if self.matrix.size else 0.0

    def axiom_residuals(self) -> dict[str, float]:
        """Residuals of the conditional-expectation axioms."""
        m = self.matrix
        n = self.ambient_dim
        one = vec(identity(n))
        return {
            "idempotent": max_abs(m @ m - m),
            "self_adjoint": max_abs(m - dagger(m)),
            "unital": max_abs(m @ one - one),
            "trace_preserving": max_abs(np.conj(one) @ m - np.conj(one)),
        }


def conditional_expectation(alg: SubAlgebra) -> Superoperator:
    """Orthogonal projection onto ``alg`` as a superoperator.

    Raises
    ------
    DimensionOverflow
        For ambient dimension above :data:`SUPEROPERATOR_LIMIT`; use
        :meth:`SubAlgebra.expectation` there instead.
    """
    if alg.ambient_dim > SUPEROPERATOR_LIMIT:
        raise DimensionOverflow(f"superoperator at ambient {alg.ambient_dim} > {SUPEROPERATOR_LIMIT}")
    r = alg.rows
    return Superoperator(alg.ambient_dim, r.T @ np.conj(r))


def generate_algebra(generators: Sequence[np.ndarray], ambient_dim: int, tol: float = 1e-9) -> SubAlgebra:
    """Smallest unital *-algebra containing ``generators``.

    Words in the generators and their adjoints are grown one letter at a
    time: only the elements added in the previous round are multiplied on
    the left by each generator, which suffices because the span of all
    words is stable under left multiplication by generators.

    Raises
    ------
    DimensionOverflow
        If ``ambient_dim > 64``.
    """
    n = int(ambient_dim)
    if n > BASIS_LIMIT:
        raise DimensionOverflow(f"generate_algebra at ambient {n} > {BASIS_LIMIT}")
    gens = []
    for g in generators:
        g = as_cmat(g)
        if g.shape != (n, n):
            raise ValueError(f"generator of shape {g.shape} in ambient {n}")
        s = max_abs(g)
        if s > 0:
            gens.extend([g / s, dagger(g) / s])
    rows = orthonormal_rows(np.stack([vec(identity(n))] + [vec(g) for g in gens]), tol)
    frontier = rows
    chunk = 256
    while frontier.shape[0] and rows.shape[0] < n * n:
        front = frontier.reshape(-1, n, n) * np.sqrt(n)
        added = []
        for g in gens:
            for start in range(0, front.shape[0], chunk):
                prod = np.einsum("ij,kjl->kil", g, front[start : start + chunk])
                v = prod.reshape(prod.shape[0], -1) / np.sqrt(n)
                scale = max(1.0, float(np.max(np.linalg.norm(v, axis=1))))
                for _ in range(2):
                    v = v - (v @ dagger(rows)) @ rows
                v = v[np.linalg.norm(v, axis=1) > tol * scale]
                if not v.shape[0]:
                    continue
                _, s, vh = np.linalg.svd(v, full_matrices=False)
                new = vh[s > tol * scale]
                if new.shape[0]:
                    new = orthonormal_rows(new - (new @ dagger(rows)) @ rows, tol)
                    rows = np.vstack([rows, new])
                    added.append(new)
        frontier = np.vstack(added) if added else rows[:0]
    return SubAlgebra(n, rows)


def _commutator_stack(gens: Sequence[np.ndarray], n: int) -> np.ndarray:
    """Rows ``(I kron g^T - g kron I)`` so that ``L vec(x) = vec([x, g])`` (row-major)."""
    eye = identity(n)
    return np.vstack([kron(eye, g.T) - kron(g, eye) for g in gens])


def commutant(source, ambient_dim: int | None = None, tol: float = 1e-9, rng=None) -> SubAlgebra:
    """Commutant ``{x : [x, g] = 0 for all g}``.

    Parameters
    ----------
    source:
        A :class:`SubAlgebra`, a single normal matrix, or a list of matrices.
    ambient_dim:
        Required only when ``source`` is an empty list.

    Notes
    -----
    Three paths are used:

    * a single normal matrix gives the structured algebra of its
      eigenspaces (any size);
    * a structured algebra ``Ad_U(sum M_n kron I_m)`` gives
      ``Ad_U(sum I_n kron M_m)`` (any size);
    * otherwise the kernel of the stacked commutator maps is computed,
      which needs ``N <= 64``.  For a basis-form algebra two random
      elements and their adjoints serve as generators.
    """
    if isinstance(source, SubAlgebra):
        if source.structure is not None:
            s = source.structure
            swaps = [swap_operator(m, b) for b, m in zip(s.block_sizes, s.multiplicities)]
            u = s.unitary @ block_diag(*swaps)
            return SubAlgebra.from_structure(u, s.multiplicities, s.block_sizes, label="commutant")
        rng = _rng(rng)
        gens = [source.random_element(rng) for _ in range(2)]
        return _commutant_generic(gens, source.ambient_dim, tol, rng)
    if isinstance(source, np.ndarray) and source.ndim == 2:
        source = [source]
    gens = [as_cmat(g) for g in source]
    if not gens:
        return SubAlgebra.full(int(ambient_dim))
    n = gens[0].shape[0]
    if len(gens) == 1 and max_abs(gens[0] @ dagger(gens[0]) - dagger(gens[0]) @ gens[0]) <= 1e-8:
        spectrum = eig_normal(gens[0])
        u = np.hstack(spectrum.bases)
        return SubAlgebra.from_structure(u, spectrum.multiplicities, [1] * len(spectrum.multiplicities), "commutant")
    return _commutant_generic(gens, n, tol, rng)


def _commutant_generic(gens: Sequence[np.ndarray], n: int, tol: float, rng=None) -> SubAlgebra:
    if n > BASIS_LIMIT:
        raise DimensionOverflow(f"generic commutant at ambient {n} > {BASIS_LIMIT}")
    gens = [g / max(max_abs(g), 1e-300) for g in gens]
    gens = gens + [dagger(g) for g in gens]
    if n <= 16:
        kernel = nullspace_basis(_commutator_stack(gens, n), tol, atol=tol)
        return SubAlgebra(n, kernel.T, label="commutant")
    return _commutant_in_eigenframe(gens, n, tol, _rng(rng))


def _commutant_in_eigenframe(gens: Sequence[np.ndarray], n: int, tol: float, rng) -> SubAlgebra:
    """Commutant of a self-adjoint family found inside the commutant of one generic member.

    A random self-adjoint combination ``h`` of the generators lies in the
    algebra they generate, so the commutant of the family sits inside the
    block algebra of the eigenspaces of ``h``.  Solving the commutation
    constraints in those block coordinates keeps the linear system small.
    """
    for _ in range(3):
        h = sum(_random_complex(1, rng)[0] * g for g in gens)
        h = h + dagger(h)
        try:
            spectrum = eig_normal(h, cluster_tol=1e-7 * max(1.0, max_abs(h)))
            break
        except ClusterAmbiguity:
            continue
    else:
        raise CenterDegenerate("random combinations of the generators kept clustering")
    frame = np.hstack(spectrum.bases)
    index_sets, pos = [], 0
    for m in spectrum.multiplicities:
        index_sets.append(range(pos, pos + m))
        pos += m
    units = [(a, b) for idx in index_sets for a in idx for b in idx]
    blocks = []
    for g in gens:
        gt = dagger(frame) @ g @ frame
        cols = np.zeros((len(units), n, n), dtype=np.complex128)
        for k, (a, b) in enumerate(units):
            cols[k, a, :] += gt[b, :]
            cols[k, :, b] -= gt[:, a]
        blocks.append(cols.reshape(len(units), -1).T)
    kernel = nullspace_basis(np.vstack(blocks), tol, atol=tol)
    rows = []
    for coeffs in kernel.T:
        x = np.zeros((n, n), dtype=np.complex128)
        for c, (a, b) in zip(coeffs, units):
            x[a, b] = c
        rows.append(vec(frame @ x @ dagger(frame)) * np.sqrt(n))
    return SubAlgebra(n, orthonormal_rows(np.array(rows), 1e-10), label="commutant")


def intersect(a: SubAlgebra, b: SubAlgebra, tol: float = 1e-8, rng=None) -> SubAlgebra:
    """Intersection of two subalgebras of the same ``M_N``.

    Coordinates ``c`` on ``a`` are kept when the corresponding element has
    no component orthogonal to ``b``, i.e. ``c`` lies in the kernel of
    ``K = Q_a^T - Q_b^T (conj(Q_b) Q_a^T)`` where ``Q`` are the orthonormal
    row matrices.  The result is checked to be closed under products.

    Raises
    ------
    DimensionOverflow
        For ambient dimension above 64.
    """
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimensions differ")
    n = a.ambient_dim
    if n > BASIS_LIMIT:
        raise DimensionOverflow(f"intersection at ambient {n} > {BASIS_LIMIT}")
    if a.dim > b.dim:
        a, b = b, a
    qa, qb = a.rows, b.rows
    k = qa.T - qb.T @ (np.conj(qb) @ qa.T)
    # k has N^2 >= dim(a) rows, so the thin factorization keeps all of vh
    _, s, vh = np.linalg.svd(k, full_matrices=False)
    coeffs = vh[s <= tol]
    rows = np.conj(coeffs) @ qa
    out = SubAlgebra(n, orthonormal_rows(rows, 1e-10) if rows.shape[0] else rows, label="intersection")
    if out.dim:
        res = out.closure_residual(rng)
        if res > 1e-7:
            raise AssertionError(f"intersection of algebras not closed under products (residual {res:.2e})")
    return out


@dataclass(frozen=True)
class WedderburnData:
    """Simple-summand data of a finite-dimensional algebra.

    Attributes
    ----------
    block_sizes:
        ``n_r``: the summand ``r`` is isomorphic to ``M_{n_r}``.
    multiplicities:
        ``m_r``: the summand acts with multiplicity ``m_r`` on ``C^N``.
    central_projections:
        Minimal central projections ``z_r``.
    minimal_projections:
        One minimal projection ``e_r <= z_r`` per summand.
    """

    block_sizes: tuple[int, ...]
    multiplicities: tuple[int, ...]
    central_projections: tuple[np.ndarray, ...] = field(repr=False)
    minimal_projections: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def traces(self) -> tuple[float, ...]:
        """Normalized traces ``m_r / N`` of the minimal projections."""
        n = sum(b * m for b, m in zip(self.block_sizes, self.multiplicities))
        return tuple(m / n for m in self.multiplicities)


def _projection_rank(p: np.ndarray) -> int:
    return int(round(float(np.trace(p).real)))


def wedderburn(alg: SubAlgebra, rng: np.random.Generator | None = None, retries: int = 3) -> WedderburnData:
    """Block sizes, multiplicities and central/minimal projections.

    Structured algebras return their stored data.  For a basis-form algebra
    the center is solved in algebra coordinates against random elements,
    the minimal central projections are the spectral projections of a
    random self-adjoint central element, and a minimal projection inside
    each summand is a spectral projection of a random self-adjoint element
    of ``z_r A z_r`` of the right rank.

    Raises
    ------
    CenterDegenerate
        If random elements keep producing clustered spectra.
    """
    if alg.structure is not None:
        s = alg.structure
        u, ud = s.unitary, dagger(s.unitary)
        zs, es = [], []
        n = alg.ambient_dim
        for off, b, m in zip(s.offsets, s.block_sizes, s.multiplicities):
            z = np.zeros((n, n), dtype=np.complex128)
            z[off : off + b * m, off : off + b * m] = identity(b * m)
            e = np.zeros((n, n), dtype=np.complex128)
            e[off : off + m, off : off + m] = identity(m)
            zs.append(u @ z @ ud)
            es.append(u @ e @ ud)
        return WedderburnData(s.block_sizes, s.multiplicities, tuple(zs), tuple(es))

    rng = _rng(rng)
    n = alg.ambient_dim
    basis = alg.basis
    probes = [alg.random_element(rng) for _ in range(2)]
    probes = probes + [dagger(p) for p in probes]
    cols = np.stack([np.concatenate([(b @ p - p @ b).reshape(-1) for p in probes]) for b in basis], axis=1)
    scale = max(1.0, max(max_abs(p) for p in probes))
    center_coeffs = nullspace_basis(cols, 1e-9, atol=1e-9 * scale * n)
    center = [sum(c * b for c, b in zip(col, basis)) for col in center_coeffs.T]
    n_central = len(center)

    for _ in range(retries):
        h = sum(_random_complex(1, rng)[0] * c for c in center)
        h = h + dagger(h)
        spectrum = eig_normal(h, cluster_tol=1e-6 * max(1.0, max_abs(h)))
        if len(spectrum.projectors) == n_central:
            break
    else:
        raise CenterDegenerate("random central elements kept clustering")

    sizes, mults, zs, es = [], [], [], []
    for z in spectrum.projectors:
        comp = SubAlgebra.from_matrices([z @ b @ z for b in basis], n, tol=1e-9)
        b_r = int(round(np.sqrt(comp.dim)))
        rank = _projection_rank(z)
        m_r = rank // b_r
        for _ in range(retries):
            x = z @ alg.random_element(rng, hermitian=True) @ z
            shift = 10.0 * (1.0 + max_abs(x) * n)
            sd = eig_normal(x + shift * (identity(n) - z), cluster_tol=1e-6 * max(1.0, max_abs(x)))
            candidates = [p for p, mult in zip(sd.projectors, sd.multiplicities) if mult == m_r and max_abs(p @ z - p) < 1e-6]
            if len(sd.projectors) == b_r + (1 if rank < n else 0) and candidates:
                es.append(candidates[0])
                break
        else:
            raise CenterDegenerate("random elements of a summand kept clustering")
        sizes.append(b_r)
        mults.append(m_r)
        zs.append(z)
    return WedderburnData(tuple(sizes), tuple(mults), tuple(zs), tuple(es))


@dataclass(frozen=True)
class InclusionMatrix:
    """Integer inclusion matrix: rows index summands of the smaller algebra."""

    entries: np.ndarray
    small: WedderburnData = field(repr=False)
    large: WedderburnData = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.entries.shape)

    def trace_residual(self) -> float:
        """``max|A t - s|`` with ``A`` the inclusion matrix, for the minimal-projection trace vectors."""
        t = np.array(self.large.traces)
        s = np.array(self.small.traces)
        return float(np.max(np.abs(self.entries @ t - s)))


def inclusion_matrix(small: SubAlgebra, large: SubAlgebra, tol: float = 1e-6, rng=None) -> InclusionMatrix:
    """Inclusion matrix of ``small`` inside ``large``.

    ``a[r, l] = rank(e_r z_l) / m_l`` where ``e_r`` is a minimal projection
    of summand ``r`` of ``small``, ``z_l`` the central support of summand
    ``l`` of ``large`` and ``m_l`` its multiplicity.

    Raises
    ------
    NotIncluded
        If ``small`` is not contained in ``large``.
    NonIntegerEntry
        If a rank or ratio fails to be an integer within ``tol``.
    """
    if small.ambient_dim != large.ambient_dim:
        raise ValueError("ambient dimensions differ")
    res = inclusion_residual(small, large, rng)
    if res > 1e-8:
        raise NotIncluded(f"inclusion residual {res:.2e}")
    ws, wl = wedderburn(small, rng), wedderburn(large, rng)
    entries = np.zeros((len(ws.block_sizes), len(wl.block_sizes)), dtype=int)
    for r, e in enumerate(ws.minimal_projections):
        for l, (z, m) in enumerate(zip(wl.central_projections, wl.multiplicities)):
            rank = float(np.trace(e @ z).real)
            ratio = rank / m
            if abs(rank - round(rank)) > tol or abs(ratio - round(ratio)) > tol:
                raise NonIntegerEntry(f"entry ({r},{l}) = {ratio!r}")
            entries[r, l] = int(round(ratio))
    return InclusionMatrix(entries, ws, wl)


def squared_norm(matrix) -> float:
    """Largest eigenvalue of ``A A^T`` for an inclusion matrix ``A`` (the squared operator norm)."""
    a = np.asarray(matrix.entries if isinstance(matrix, InclusionMatrix) else matrix, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(a @ a.T)[-1])
