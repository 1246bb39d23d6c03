"""Numerical invariants of pairs of subalgebras.

Covers Pimsner-Popa constants (closed forms and an independent
semidefinite oracle for pairs of maximal abelian subalgebras), relative
entropies, Sano-Watatani angle spectra, interior and exterior angles
between intermediate algebras, and commuting-square diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    InclusionMatrix,
    SubAlgebra,
    Superoperator,
    conditional_expectation,
    inclusion_residual,
    intersect,
    spans_equal_residual,
)
from .errors import (
    DimensionOverflow,
    IndexOne,
    InclusionViolated,
    IntersectionMismatch,
    NegativeInput,
    NotUnitary,
    ReductionUnavailable,
)
from .hadamard import hamming
from .linalg import dagger, identity, is_unitary, max_abs, orthonormal_rows, tr_norm

__all__ = [
    "neg_t_log_t",
    "pp_constant_masa_hamming",
    "pp_constant_masa_oracle",
    "BlockFactor",
    "pp_constant_block_factor",
    "PPData",
    "pp_constant_inclusion",
    "pp_entropy_inclusion",
    "masa_pair_entropy",
    "AngleSet",
    "sw_angle_spectrum",
    "AnglePair",
    "interior_exterior_angle",
    "interior_exterior_angle_from_traces",
    "commuting_square_test",
    "nondegenerate_test",
    "CubeAngle",
    "cube_angle",
    "LevelValue",
    "TowerSequence",
    "pp_constant_tower_sequence",
    "martingale_residual",
]

#: Largest ambient dimension for which angle superoperators are formed.
ANGLE_LIMIT = 16


# ---------------------------------------------------------------------- entropy function
def neg_t_log_t(t: float) -> float:
    """``-t ln t`` with the continuous extension ``0`` at ``t = 0``.

    Raises
    ------
    NegativeInput
        For ``t < 0``.
    """
    if t < 0:
        raise NegativeInput(f"negative argument {t!r}")
    return 0.0 if t == 0 else -t * math.log(t)


# ---------------------------------------------------------------------- masa pairs
def _require_unitary(u: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if not is_unitary(u, tol):
        raise NotUnitary("matrix is not unitary within 1e-9")
    return u


def pp_constant_masa_hamming(u: np.ndarray, tol: float = 1e-8) -> float:
    """Pimsner-Popa constant of the diagonal algebra and its ``Ad_u`` image.

    Equals the minimum over the columns of ``u^*`` of ``1 / hamming``.

    Raises
    ------
    NotUnitary
    """
    u = _require_unitary(u)
    return min(1.0 / hamming(col, tol) for col in dagger(u).T)


def pp_constant_masa_oracle(u: np.ndarray, tol: float = 1e-9) -> float:
    """Semidefinite oracle for the same constant.

    For each minimal projection ``p_i`` of the diagonal algebra let
    ``P = u^* p_i u`` and ``D`` its diagonal.  The best ``t`` with
    ``D - t P >= 0`` is ``0`` if the range of ``P`` leaves the support of
    ``D`` and otherwise the reciprocal of the top eigenvalue of ``D^{+1/2} P D^{+1/2}``; the
    constant is the minimum over ``i``.  Nothing here counts entries.

    Raises
    ------
    NotUnitary
    """
    u = _require_unitary(u)
    n = u.shape[0]
    best = math.inf
    for i in range(n):
        p = np.zeros((n, n), dtype=np.complex128)
        p[i, i] = 1.0
        proj = dagger(u) @ p @ u
        d = np.real(np.diag(proj))
        support = d > tol
        outside = ~support
        if outside.any() and max_abs(proj[np.ix_(outside, outside)]) > tol:
            return 0.0
        inv_sqrt = np.where(support, 1.0 / np.sqrt(np.where(support, d, 1.0)), 0.0)
        m = inv_sqrt[:, None] * proj * inv_sqrt[None, :]
        top = float(np.linalg.eigvalsh((m + dagger(m)) / 2)[-1])
        best = min(best, 1.0 / top)
    return best


def masa_pair_entropy(u: np.ndarray) -> float:
    """``(1/n) sum_ij -|u_ij|^2 ln |u_ij|^2``, the relative entropy of a masa pair."""
    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    return sum(neg_t_log_t(float(abs(x) ** 2)) for x in u.ravel()) / n


# ---------------------------------------------------------------------- block reduction
@dataclass(frozen=True)
class BlockFactor:
    """Outcome of the block-diagonal reduction of a Pimsner-Popa constant.

    ``kind`` is ``"exact"`` (with an exact ``value``) or
    ``"diagonal_non_scalar"`` (no closed form; ``value`` is ``None``).
    """

    kind: str
    value: Fraction | None = None

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def __str__(self) -> str:
        return f"Exactly({self.value})" if self.is_exact else "DiagonalNonScalar"


def pp_constant_block_factor(first: np.ndarray, second: np.ndarray, tol: float = 1e-9) -> BlockFactor:
    """Classify ``first^* second`` for a pair of diagonal blocks.

    A scalar product gives the constant ``1``; a product that is not
    diagonal gives ``1/2``; a diagonal non-scalar product is reported as
    such without a value.
    """
    prod = dagger(np.asarray(first)) @ np.asarray(second)
    n = prod.shape[0]
    off = prod - np.diag(np.diag(prod))
    if max_abs(off) > tol:
        return BlockFactor("exact", Fraction(1, 2))
    if max_abs(prod - prod[0, 0] * identity(n)) <= tol:
        return BlockFactor("exact", Fraction(1))
    return BlockFactor("diagonal_non_scalar")


# ---------------------------------------------------------------------- inclusions
@dataclass(frozen=True)
class PPData:
    """Bratteli data of an inclusion of finite-dimensional algebras.

    Attributes
    ----------
    inclusion:
        Integer matrix, rows indexed by summands of the smaller algebra.
    small_sizes, large_sizes:
        Matrix sizes of the summands.
    small_traces, large_traces:
        Normalized traces of minimal projections of each summand.
    """

    inclusion: np.ndarray
    small_sizes: tuple[int, ...]
    large_sizes: tuple[int, ...]
    small_traces: tuple[float, ...]
    large_traces: tuple[float, ...]

    def __post_init__(self):
        a = np.asarray(self.inclusion, dtype=float)
        if np.max(np.abs(a @ np.array(self.large_traces) - np.array(self.small_traces))) > 1e-8:
            raise ValueError("trace vectors violate inclusion @ large_traces = small_traces")
        if np.max(np.abs(a.T @ np.array(self.small_sizes) - np.array(self.large_sizes))) > 1e-8:
            raise ValueError("sizes violate inclusion^T @ small_sizes = large_sizes")

    @classmethod
    def from_inclusion(cls, incl: InclusionMatrix) -> "PPData":
        return cls(
            incl.entries,
            incl.small.block_sizes,
            incl.large.block_sizes,
            incl.small.traces,
            incl.large.traces,
        )


def pp_constant_inclusion(data: PPData) -> float:
    """``1 / max_l sum_r min(a_rl, n_r) s_r / t_l``."""
    a = np.asarray(data.inclusion, dtype=float)
    n = np.array(data.small_sizes, dtype=float)
    s = np.array(data.small_traces, dtype=float)
    t = np.array(data.large_traces, dtype=float)
    b = np.minimum(a, n[:, None])
    return 1.0 / float(np.max((b * s[:, None]).sum(axis=0) / t))


def pp_entropy_inclusion(data: PPData) -> float:
    """Relative entropy of an inclusion of finite-dimensional algebras.

    ``sum_l m_l t_l ln(m_l / t_l) + sum_r n_r s_r ln(s_r / n_r)
    + sum_{r,l} n_r a_rl t_l ln min(n_r / a_rl, 1)``, summing over
    ``a_rl > 0`` only.
    """
    a = np.asarray(data.inclusion, dtype=float)
    n = np.array(data.small_sizes, dtype=float)
    m = np.array(data.large_sizes, dtype=float)
    s = np.array(data.small_traces, dtype=float)
    t = np.array(data.large_traces, dtype=float)
    total = float(np.sum(m * t * np.log(m / t))) + float(np.sum(n * s * np.log(s / n)))
    for r in range(a.shape[0]):
        for l in range(a.shape[1]):
            if a[r, l] > 0:
                total += n[r] * a[r, l] * t[l] * math.log(min(n[r] / a[r, l], 1.0))
    return total


# ---------------------------------------------------------------------- angles
@dataclass(frozen=True)
class AngleSet:
    """Angles ``arccos sqrt(x)`` for the eigenvalues ``x`` of an angle operator.

    Attributes
    ----------
    angles:
        Sorted distinct angles in ``(0, pi/2]``.
    eigenvalues:
        Distinct eigenvalues in ``(tol, 1 - tol)`` with their multiplicities.
    operator_norm:
        Norm of the angle operator.
    """

    angles: tuple[float, ...]
    eigenvalues: tuple[tuple[float, int], ...]
    operator_norm: float


def _distinct(values: Sequence[float], tol: float) -> list[tuple[float, int]]:
    out: list[list] = []
    for v in sorted(values):
        if out and abs(v - out[-1][0]) <= tol:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return [(float(v), int(c)) for v, c in out]


def _superoperator(alg: SubAlgebra) -> Superoperator:
    return conditional_expectation(alg)


def sw_angle_spectrum(first: SubAlgebra, second: SubAlgebra, tol: float = 1e-7) -> AngleSet:
    """Sano-Watatani angles between two subalgebras of the same ``M_N``.

    The spectrum of ``E_P E_Q E_P - E_{P cap Q}`` on ``L^2(M_N)`` is
    computed; eigenvalues strictly between ``tol`` and ``1 - tol`` give the
    angles.  When the operator vanishes the set is ``{pi/2}``.

    Raises
    ------
    DimensionOverflow
        For ambient dimension above 16.
    """
    n = first.ambient_dim
    if n > ANGLE_LIMIT:
        raise DimensionOverflow(f"angle operator at ambient {n} > {ANGLE_LIMIT}")
    ep, eq = _superoperator(first), _superoperator(second)
    meet = _superoperator(intersect(first, second))
    op = (ep @ eq @ ep - meet).matrix
    op = (op + dagger(op)) / 2
    vals = np.linalg.eigvalsh(op)
    norm = float(np.max(np.abs(vals))) if vals.size else 0.0
    if norm <= tol:
        return AngleSet((math.pi / 2,), (), norm)
    inside = [v for v in vals if tol < v < 1 - tol]
    distinct = _distinct(inside, 1e-8)
    angles = sorted({round(math.acos(math.sqrt(v)), 12) for v, _ in distinct})
    return AngleSet(tuple(angles), tuple(distinct), norm)


@dataclass(frozen=True)
class AnglePair:
    """Cosines of the interior and (when available) exterior angles."""

    cos_interior: float
    cos_exterior: float | None = None

    @property
    def interior(self) -> float:
        return math.acos(max(-1.0, min(1.0, self.cos_interior)))

    @property
    def exterior(self) -> float | None:
        if self.cos_exterior is None:
            return None
        return math.acos(max(-1.0, min(1.0, self.cos_exterior)))


def _exterior_from_traces(tr_pq: float, tr_p: float, tr_q: float) -> float:
    denom = math.sqrt(tr_p - tr_p**2) * math.sqrt(tr_q - tr_q**2)
    return (tr_pq - tr_p * tr_q) / denom


def _check_indices(first_index: float, second_index: float) -> None:
    if abs(first_index - 1) < 1e-12 or abs(second_index - 1) < 1e-12:
        raise IndexOne("an intermediate index equals one; the angle is undefined")


def interior_exterior_angle(
    first_basis: Sequence[np.ndarray],
    second_basis: Sequence[np.ndarray],
    bottom_expectation: Callable[[np.ndarray], np.ndarray],
    first_index: float,
    second_index: float,
    traces: tuple[float, float, float] | None = None,
) -> AnglePair:
    """Interior angle from Pimsner-Popa bases, exterior angle from traces.

    ``cos(interior) = (sum_ij tr(E(l_i^* m_j) m_j^* l_i) - 1)
    / (sqrt(first_index - 1) sqrt(second_index - 1))`` where ``l_i`` and
    ``m_j`` run over the two bases and ``E`` is the expectation onto the
    common subalgebra.  When ``traces = (tr(e_P e_Q), tr(e_P), tr(e_Q))``
    is given the exterior cosine is
    ``(tr(e_P e_Q) - tr(e_P) tr(e_Q)) / (sqrt(tr e_P - tr e_P^2) sqrt(tr e_Q - tr e_Q^2))``.

    Raises
    ------
    IndexOne
        If either index equals one.
    """
    _check_indices(first_index, second_index)
    total = 0.0
    for left in first_basis:
        for right in second_basis:
            total += tr_norm(bottom_expectation(dagger(left) @ right) @ dagger(right) @ left).real
    cos_int = (total - 1.0) / (math.sqrt(first_index - 1) * math.sqrt(second_index - 1))
    cos_ext = _exterior_from_traces(*traces) if traces is not None else None
    return AnglePair(cos_int, cos_ext)


def interior_exterior_angle_from_traces(
    total_index: float,
    first_index: float,
    second_index: float,
    tr_pq: float,
    tr_p: float,
    tr_q: float,
) -> AnglePair:
    """Both angles from the traces of the two Jones projections.

    ``cos(interior) = (total_index * tr(e_P e_Q) - 1) /
    (sqrt(first_index - 1) sqrt(second_index - 1))``.

    Raises
    ------
    IndexOne
        If either intermediate index equals one.
    """
    _check_indices(first_index, second_index)
    cos_int = (total_index * tr_pq - 1.0) / (math.sqrt(first_index - 1) * math.sqrt(second_index - 1))
    return AnglePair(cos_int, _exterior_from_traces(tr_pq, tr_p, tr_q))


# ---------------------------------------------------------------------- commuting squares
def commuting_square_test(
    bottom: SubAlgebra,
    first: SubAlgebra,
    second: SubAlgebra,
    top: SubAlgebra,
    tol: float = 1e-9,
    rng: np.random.Generator | None = None,
    probes: int = 6,
) -> tuple[bool, float]:
    """Decide whether ``E_P E_Q = E_Q E_P = E_N`` on the top algebra.

    Superoperators are used up to ambient 16; beyond that the identity is
    tested on random elements of the top algebra.

    Raises
    ------
    InclusionViolated
        If ``bottom`` is not inside both sides or a side is not inside ``top``.
    """
    rng = rng if rng is not None else np.random.default_rng(5)
    for small, large, name in ((bottom, first, "bottom/first"), (bottom, second, "bottom/second"),
                               (first, top, "first/top"), (second, top, "second/top")):
        if inclusion_residual(small, large, rng) > 1e-8:
            raise InclusionViolated(f"{name} inclusion fails")
    n = top.ambient_dim
    if n <= ANGLE_LIMIT:
        ep, eq, en, em = (_superoperator(a) for a in (first, second, bottom, top))
        res = max(
            max_abs((ep @ eq @ em).matrix - (en @ em).matrix),
            max_abs((eq @ ep @ em).matrix - (en @ em).matrix),
        )
    else:
        res = 0.0
        for _ in range(probes):
            x = top.random_element(rng)
            scale = max(1.0, max_abs(x))
            target = bottom.expectation(x)
            res = max(
                res,
                max_abs(first.expectation(second.expectation(x)) - target) / scale,
                max_abs(second.expectation(first.expectation(x)) - target) / scale,
            )
    return res <= tol, float(res)


def nondegenerate_test(first: SubAlgebra, second: SubAlgebra, top: SubAlgebra, tol: float = 1e-9) -> bool:
    """Whether the products ``p q`` (``p`` in ``P``, ``q`` in ``Q``) span ``top``.

    Raises
    ------
    DimensionOverflow
        For ambient dimension above 64.
    """
    n = top.ambient_dim
    if n > 64:
        raise DimensionOverflow(f"span test at ambient {n} > 64")
    qs = np.stack(second.basis)
    rows = np.zeros((0, n * n), dtype=np.complex128)
    for p in first.basis:
        prods = np.einsum("ij,kjl->kil", p, qs).reshape(len(qs), -1) / np.sqrt(n)
        rows = orthonormal_rows(np.vstack([rows, prods]), tol)
        if rows.shape[0] >= top.dim:
            break
    return rows.shape[0] == top.dim


@dataclass(frozen=True)
class CubeAngle:
    """Classification of the defect operator ``S = E_Q E_P E_Q - E_C``.

    ``kind`` is ``"commuting_square"`` (``S = 0``), ``"angle"`` (``S^2 =
    c S`` with ``c = coefficient``; the angle is ``arccos sqrt(c)``) or
    ``"multiple_angles"`` (``spectrum`` lists the nonzero eigenvalues).
    """

    kind: str
    coefficient: float | None = None
    spectrum: tuple[float, ...] = ()
    residual: float = 0.0

    @property
    def angle(self) -> float | None:
        return None if self.coefficient is None else math.acos(math.sqrt(self.coefficient))


def cube_angle(first: SubAlgebra, second: SubAlgebra, bottom: SubAlgebra, tol: float = 1e-9) -> CubeAngle:
    """Classify ``S = E_second E_first E_second - E_bottom``.

    Raises
    ------
    IntersectionMismatch
        If ``bottom`` is not the intersection of the two sides.
    DimensionOverflow
        For ambient dimension above 16.
    """
    n = first.ambient_dim
    if n > ANGLE_LIMIT:
        raise DimensionOverflow(f"cube defect at ambient {n} > {ANGLE_LIMIT}")
    if spans_equal_residual(intersect(first, second), bottom) > 1e-7:
        raise IntersectionMismatch("bottom algebra differs from the intersection of the sides")
    e1, e2, ec = (_superoperator(a) for a in (first, second, bottom))
    s = (e2 @ e1 @ e2 - ec).matrix
    s = (s + dagger(s)) / 2
    vals = np.linalg.eigvalsh(s)
    norm = float(np.max(np.abs(vals)))
    if norm <= tol:
        return CubeAngle("commuting_square", residual=norm)
    coeff = float(vals[-1])
    res = max_abs(s @ s - coeff * s)
    nonzero = tuple(v for v, _ in _distinct([v for v in vals if abs(v) > tol], 1e-8))
    if res <= tol:
        return CubeAngle("angle", coeff, nonzero, res)
    return CubeAngle("multiple_angles", None, nonzero, res)


# ---------------------------------------------------------------------- tower sequences
@dataclass(frozen=True)
class LevelValue:
    """Pimsner-Popa constant at one odd tower index, or why none is given."""

    index: int
    factor: BlockFactor | None
    note: str = ""

    @property
    def value(self) -> Fraction | None:
        return self.factor.value if self.factor is not None else None


@dataclass(frozen=True)
class TowerSequence:
    """Per-level constants and their monotonicity."""

    levels: tuple[LevelValue, ...]

    @property
    def values(self) -> list[Fraction | None]:
        return [lv.value for lv in self.levels]

    @property
    def non_increasing(self) -> bool:
        known = [v for v in self.values if v is not None]
        return all(a >= b for a, b in zip(known, known[1:]))

    @property
    def eventual_value(self) -> Fraction | None:
        known = [v for v in self.values if v is not None]
        return known[-1] if known else None


def _diagonal_blocks(z: np.ndarray, parts: int, tol: float) -> list[np.ndarray]:
    size = z.shape[0] // parts
    mask = np.ones(z.shape, dtype=bool)
    blocks = []
    for i in range(parts):
        sl = slice(i * size, (i + 1) * size)
        mask[sl, sl] = False
        blocks.append(z[sl, sl])
    if mask.any() and float(np.max(np.abs(z[mask]))) > tol:
        raise ReductionUnavailable("the product is not block diagonal")
    return blocks


def reduced_block_pair(first_unitary: np.ndarray, second_unitary: np.ndarray, order: int, tol: float = 1e-9):
    """Split ``first^* second`` at an odd tower index into the pair of blocks to compare.

    For the two-by-two family the product is ``blockdiag(X_1, X_2)`` and the
    pair is ``(X_1, X_2)``.  For the four-by-four family it is
    ``blockdiag(X, X^*, X, X^*)`` and the pair is ``(X, X^*)``.

    Raises
    ------
    ReductionUnavailable
        If the expected block pattern is absent.
    """
    z = dagger(first_unitary) @ second_unitary
    blocks = _diagonal_blocks(z, order, tol)
    if order == 2:
        return blocks[0], blocks[1]
    x, xs = blocks[0], blocks[1]
    pattern = max(max_abs(xs - dagger(x)), max_abs(blocks[2] - x), max_abs(blocks[3] - dagger(x)))
    if pattern > tol:
        raise ReductionUnavailable(f"block pattern (X, X*, X, X*) fails by {pattern:.2e}")
    return x, xs


def pp_constant_tower_sequence(first, second, indices: Sequence[int]) -> TowerSequence:
    """Per-level constants of the seed-side pair at odd tower indices ``2k+1``.

    Parameters
    ----------
    first, second:
        :class:`~spinlab.towers.Tower` objects of the same family.
    indices:
        The values of ``k``; the towers must reach index ``2k+1``.

    Levels where the block reduction is unavailable are recorded with a
    note and no value.
    """
    out = []
    for k in indices:
        j = 2 * k + 1
        try:
            x1, x2 = reduced_block_pair(first[j], second[j], first.order)
            out.append(LevelValue(k, pp_constant_block_factor(x1, x2)))
        except ReductionUnavailable as exc:
            out.append(LevelValue(k, None, str(exc)))
    return TowerSequence(tuple(out))


def martingale_residual(grid, level: int, side: str = "first", rng=None, probes: int = 4) -> float:
    """Residual of ``E_{B_{j+2}} = E_{B_j}`` on the ladder algebra at level ``j``.

    ``B`` is the chosen side of the grid; all algebras are ampliated to the
    ambient of level ``j+2``.  A vanishing residual is the condition under
    which per-level constants decrease to the limiting one.
    """
    rng = rng if rng is not None else np.random.default_rng(3)
    sides = grid.first_side if side == "first" else grid.second_side
    n = sides[level + 2].ambient_dim
    low = sides[level].embed_into(n)
    high = sides[level + 2]
    amb = grid.ambient[level].embed_into(n)
    worst = 0.0
    for _ in range(probes):
        x = amb.random_element(rng)
        worst = max(worst, max_abs(high.expectation(x) - low.expectation(x)) / max(1.0, max_abs(x)))
    return worst
