"""Towers of basic constructions for the two-by-two and four-by-four spin models.

Level bookkeeping
-----------------
Level ``j >= 0`` of the ambient ladder for an ``n x n`` seed lives in
``M_{n^(floor((j+1)/2)+1)}``:

* even level ``2k``: the full algebra ``M_n kron M_n^(k)``;
* odd level ``2k+1``: ``D_n kron M_n^(k+1)`` (``D_n`` the diagonal algebra);
* level ``-1`` is ``D_n`` inside ``M_n``.

Each level sits inside the next through ``x -> I kron x`` whenever the
ambient grows and through the identity otherwise.  The seed side of the
grid is ``Ad_{u_j}`` of ``D_n kron M_n^(k)`` at even levels and of
``I_n kron M_n^(k+1)`` at odd levels, with the scalars at level ``-1``.
The projection ``e_j`` lies in level ``j`` and implements the
expectation onto level ``j-2`` restricted to level ``j-1``, on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    BASIS_LIMIT,
    SubAlgebra,
    commutant,
    intersect,
    spans_equal_residual,
    wedderburn,
)
from .errors import EquivalentSeeds
from .hadamard import HadamardMatrix, hadamard2, hadamard4, monomial_equivalent
from .linalg import (
    block_diag,
    dagger,
    identity,
    kron,
    kron_all,
    matrix_unit,
    max_abs,
    pauli_x,
    pauli_z,
    swap_operator,
    uniform_projection,
)

__all__ = [
    "Tower",
    "Grid",
    "VerificationReport",
    "ladder_ambient_dim",
    "ambient_level_algebra",
    "seed_level_standard",
    "seed_level_algebra",
    "spin_jones_projection",
    "pair_jones_projection",
    "ratio_diagonal",
    "ratio_unitary",
    "twist_unitary",
    "flip_unitary",
    "step_unitary_four",
    "block_phases_four",
    "tower2",
    "tower4",
    "verify_basic_step",
    "verify_tower",
    "build_grid",
    "tower_unitarity_residual",
    "odd_level_block_pattern_residual",
    "vertex_unitary",
    "vertex_unitary_residual",
    "step_corner_residual",
]


# ---------------------------------------------------------------------- ladder data
def ladder_ambient_dim(n: int, level: int) -> int:
    """Matrix size of ladder level ``level`` (``-1`` and ``0`` both give ``n``)."""
    if level < 0:
        return n
    return n ** ((level + 1) // 2 + 1)


def ambient_level_algebra(n: int, level: int) -> SubAlgebra:
    """The untwisted ladder algebra at ``level`` (diagonal, full, diagonal kron full, ...)."""
    if level < 0:
        return SubAlgebra.diagonal(n, label="ambient[-1]")
    dim = ladder_ambient_dim(n, level)
    if level % 2 == 0:
        return SubAlgebra.full(dim, label=f"ambient[{level}]")
    return SubAlgebra.diagonal_tensor_full(n, dim // n, label=f"ambient[{level}]")


def seed_level_standard(n: int, level: int) -> SubAlgebra:
    """The algebra conjugated by ``u_level`` on the seed side, before conjugation."""
    if level < 0:
        return SubAlgebra.scalars(n)
    dim = ladder_ambient_dim(n, level)
    if level % 2 == 0:
        return SubAlgebra.diagonal_tensor_full(n, dim // n)
    return SubAlgebra.scalar_tensor_full(n, dim // n)


def seed_level_algebra(unitaries: Sequence[np.ndarray], n: int, level: int, label: str = "") -> SubAlgebra:
    """``Ad_{u_level}`` of :func:`seed_level_standard` (the scalars at level ``-1``)."""
    if level < 0:
        return SubAlgebra.scalars(n, label=label)
    return seed_level_standard(n, level).conjugate(unitaries[level], label=label)


def spin_jones_projection(n: int, level: int) -> np.ndarray:
    """Projection ``e_level`` of the ladder, as a matrix of the level's ambient size.

    ``e_1 = sum_i E_ii kron E_ii``, ``e_2 = J_n kron I_n``; higher levels
    are ``J_n kron I`` at even and ``e_1 kron I`` at odd levels, where
    ``J_n`` is the averaging projection.
    """
    if level < 1:
        raise ValueError("projections start at level 1")
    dim = ladder_ambient_dim(n, level)
    if level % 2 == 0:
        return kron(uniform_projection(n), identity(dim // n))
    first = sum(kron(matrix_unit(i, i, n), matrix_unit(i, i, n)) for i in range(n))
    return kron(first, identity(dim // (n * n)))


def pair_jones_projection(level: int) -> np.ndarray:
    """``(1/2) sum_{ij} E_ij kron E_ij kron I`` for the two-by-two model at ``level >= 1``.

    This is the projection onto the span of ``(|11> + |22>) / sqrt(2)`` in
    the first two tensor factors.
    """
    dim = ladder_ambient_dim(2, level)
    pair = 0.5 * sum(kron(matrix_unit(i, j, 2), matrix_unit(i, j, 2)) for i in range(2) for j in range(2))
    return kron(pair, identity(dim // 4))


# ---------------------------------------------------------------------- two-by-two data
def ratio_diagonal(seed: np.ndarray) -> np.ndarray:
    """Diagonal unitary of the row ratios ``diag(u12/u11, u22/u21)``."""
    return np.diag([seed[0, 1] / seed[0, 0], seed[1, 1] / seed[1, 0]]).astype(np.complex128)


def ratio_unitary(seed: np.ndarray) -> np.ndarray:
    """``(1/sqrt 2) [[1, u12/u11], [1, u22/u21]]``."""
    return np.array(
        [[1, seed[0, 1] / seed[0, 0]], [1, seed[1, 1] / seed[1, 0]]], dtype=np.complex128
    ) / np.sqrt(2)


def twist_unitary(k: int) -> np.ndarray:
    """``E_11 kron I + E_22 kron (pauli_x)^(kron k)`` in ``M_2^(k+1)``."""
    flip = kron_all([pauli_x()] * k) if k else np.ones((1, 1), dtype=np.complex128)
    return kron(matrix_unit(0, 0, 2), identity(2**k)) + kron(matrix_unit(1, 1, 2), flip)


def flip_unitary() -> np.ndarray:
    """The tensor flip on ``C^2 kron C^2``."""
    return swap_operator(2, 2)


# ---------------------------------------------------------------------- four-by-four data
def step_unitary_four(a: complex) -> np.ndarray:
    """Even-step unitary of the four-by-four tower for circle parameter ``a``."""
    return 0.5 * np.array(
        [[1, 1, 1, 1], [-1j, a, 1j, -a], [1, -1, 1, -1], [1j, a, -1j, -a]], dtype=np.complex128
    )


def block_phases_four(a: complex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three diagonal unitaries twisting the odd steps of the four-by-four tower."""
    ac = np.conj(a)
    return (
        np.diag([1j, ac, -1j, -ac]).astype(np.complex128),
        np.diag([1, -1, 1, -1]).astype(np.complex128),
        np.diag([-1j, ac, 1j, -ac]).astype(np.complex128),
    )


# ---------------------------------------------------------------------- towers
@dataclass(frozen=True)
class Tower:
    """Unitaries ``u_0 = seed, u_1, ..., u_K`` of a spin-model tower.

    Attributes
    ----------
    family:
        ``"two_by_two"`` or ``"four_by_four"``.
    seed:
        The seed Hadamard matrix.
    unitaries:
        ``unitaries[j]`` acts on the ambient of ladder level ``j``.
    """

    family: str
    seed: HadamardMatrix
    unitaries: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def order(self) -> int:
        return self.seed.order

    @property
    def top_level(self) -> int:
        return len(self.unitaries) - 1

    @property
    def ambient_dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.unitaries)

    def __getitem__(self, level: int) -> np.ndarray:
        return self.unitaries[level]


def tower2(seed, levels: int = 4) -> Tower:
    """Tower of a two-by-two Hadamard seed up to ladder level ``levels``.

    ``u_{2k+1} = (I_2 kron u_{2k}) (E_11 kron I + E_22 kron d_k)`` with
    ``d_0`` the ratio diagonal of the seed and ``d_k = pauli_z kron I``;
    ``u_{2k} = u_{2k-1} (f_k kron I)`` with ``f_1`` the adjoint of the ratio
    unitary and ``f_k = F_2`` afterwards.
    """
    had = seed if isinstance(seed, HadamardMatrix) else HadamardMatrix(2, np.asarray(seed, dtype=complex), "two_by_two")
    u0 = had.matrix
    us = [u0]
    fourier2 = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    for level in range(1, levels + 1):
        prev = us[-1]
        if level % 2 == 1:
            k = (level - 1) // 2
            diag = ratio_diagonal(u0) if k == 0 else kron(pauli_z(), identity(2**k))
            size = prev.shape[0]
            twist = kron(matrix_unit(0, 0, 2), identity(size)) + kron(matrix_unit(1, 1, 2), diag)
            us.append(kron(identity(2), prev) @ twist)
        else:
            k = level // 2
            step = dagger(ratio_unitary(u0)) if k == 1 else fourier2
            us.append(prev @ kron(step, identity(2**k)))
    return Tower("two_by_two", had, tuple(us))


def tower4(seed_angle, levels: int = 3) -> Tower:
    """Tower of the four-by-four family member at ``seed_angle`` up to ``levels``.

    ``u_{2k+1} = blockdiag(u_{2k}, u_{2k}(P_1 kron I), u_{2k}(P_2 kron I), u_{2k}(P_3 kron I))``
    with ``P_j`` from :func:`block_phases_four`, and
    ``u_{2k} = u_{2k-1} (S kron I)`` with ``S`` from :func:`step_unitary_four`.
    """
    had = seed_angle if isinstance(seed_angle, HadamardMatrix) else hadamard4(seed_angle)
    a = had.parameters[0].unit()
    phases = block_phases_four(a)
    step = step_unitary_four(a)
    us = [had.matrix]
    for level in range(1, levels + 1):
        prev = us[-1]
        if level % 2 == 1:
            k = (level - 1) // 2
            eye = identity(4**k)
            us.append(block_diag(prev, *[prev @ kron(p, eye) for p in phases]))
        else:
            k = level // 2
            us.append(prev @ kron(step, identity(4**k)))
    return Tower("four_by_four", had, tuple(us))


# ---------------------------------------------------------------------- verification
@dataclass(frozen=True)
class VerificationReport:
    """Residuals of the three basic-construction identities.

    Attributes
    ----------
    commutation_residual:
        ``max |[e, x]|`` over a basis of the smallest algebra.
    expectation_residual:
        ``max |e x e - E(x) e|`` over a basis of the middle algebra.
    generation_residual:
        Span mismatch between the algebra generated by the middle algebra
        and ``e`` and the claimed largest algebra.
    generated_dim, expected_dim:
        Dimensions of the generated and the claimed algebras.
    """

    commutation_residual: float
    expectation_residual: float
    generation_residual: float
    generated_dim: int
    expected_dim: int
    tol: float = 1e-9

    @property
    def max_residual(self) -> float:
        return max(self.commutation_residual, self.expectation_residual, self.generation_residual)

    @property
    def passed(self) -> bool:
        return self.generated_dim == self.expected_dim and self.max_residual <= self.tol


def _spanning_elements(alg: SubAlgebra, rng, cap: int = 300) -> list[np.ndarray]:
    if alg.dim <= cap and alg.ambient_dim <= BASIS_LIMIT:
        return alg.basis
    return [alg.random_element(rng) for _ in range(8)]


def verify_basic_step(
    smaller: SubAlgebra,
    mid: SubAlgebra,
    projection: np.ndarray,
    larger: SubAlgebra,
    tol: float = 1e-9,
    rng: np.random.Generator | None = None,
) -> VerificationReport:
    """Check that ``larger`` is the basic construction of ``smaller`` inside ``mid``.

    The three algebras are first ampliated to the ambient of ``larger``.
    The generation check uses two random elements of ``mid`` together
    with the projection as generators, which generate the same algebra as
    the whole of ``mid`` and the projection for almost every draw.  The
    generated algebra is compared with ``larger`` through commutants: it
    is contained in ``larger`` when every generator is, and it contains
    ``larger`` when ``larger`` commutes with the commutant of the
    generators; its dimension comes from the Wedderburn data of that
    commutant.
    """
    rng = rng if rng is not None else np.random.default_rng(7)
    n = larger.ambient_dim
    small = smaller.embed_into(n)
    middle = mid.embed_into(n)
    e = np.asarray(projection, dtype=np.complex128)
    comm = max((max_abs(e @ x - x @ e) for x in _spanning_elements(small, rng)), default=0.0)
    expect = max(
        (max_abs(e @ x @ e - small.expectation(x) @ e) for x in _spanning_elements(middle, rng)),
        default=0.0,
    )
    gens = [middle.random_element(rng) for _ in range(2)] + [e]
    # The generated algebra is the bicommutant of the generators; its
    # dimension is read off the Wedderburn data of their commutant.
    comm_alg = commutant(gens, n, rng=rng)
    generated_dim = int(sum(m * m for m in wedderburn(comm_alg, rng).multiplicities))
    inside = max(larger.residual(g) / max(1.0, max_abs(g)) for g in gens)
    probe = larger.random_element(rng)
    scale = max(1.0, max_abs(probe))
    spans = max((max_abs(probe @ c - c @ probe) / scale for c in comm_alg.basis), default=0.0)
    gen_res = max(inside, spans)
    return VerificationReport(comm, expect, gen_res, generated_dim, larger.dim, tol)


def verify_tower(tower: Tower, tol: float = 1e-9, rng=None) -> list[tuple[str, int, VerificationReport]]:
    """Basic-step reports for both ladders of ``tower`` at every level ``1..K``.

    Returns a list of ``(side, level, report)`` with side ``"ambient"`` or
    ``"seed"``.
    """
    n = tower.order
    out = []
    for level in range(1, tower.top_level + 1):
        e = spin_jones_projection(n, level)
        amb = [ambient_level_algebra(n, j) for j in (level - 2, level - 1, level)]
        out.append(("ambient", level, verify_basic_step(amb[0], amb[1], e, amb[2], tol, rng)))
        side = [seed_level_algebra(tower.unitaries, n, j) for j in (level - 2, level - 1, level)]
        out.append(("seed", level, verify_basic_step(side[0], side[1], e, side[2], tol, rng)))
    return out


# ---------------------------------------------------------------------- grids
@dataclass
class Grid:
    """Finite levels of the quadruple generated by two towers of the same family.

    Attributes
    ----------
    first, second:
        The two towers.
    ambient:
        Ladder algebras (level ``j`` at index ``j``).
    first_side, second_side:
        ``Ad_{u_j}`` and ``Ad_{v_j}`` of the standard seed-side algebras.
    meet:
        Intersections ``first_side[j]`` with ``second_side[j]``, built in
        closed form where available; ``None`` where not computed.
    cross_checks:
        For each level where the closed form was compared with a direct
        subspace intersection, the span-equality residual.
    """

    family: str
    first: Tower
    second: Tower
    ambient: list[SubAlgebra]
    first_side: list[SubAlgebra]
    second_side: list[SubAlgebra]
    meet: list[SubAlgebra | None]
    cross_checks: dict[int, float] = field(default_factory=dict)

    @property
    def levels(self) -> int:
        return len(self.ambient) - 1


def _seed(family: str, param) -> HadamardMatrix:
    if isinstance(param, HadamardMatrix):
        return param
    return hadamard2(param) if family == "two_by_two" else hadamard4(param)


def _meet_two_by_two(first: Tower, second: Tower, level: int) -> SubAlgebra | None:
    if level % 2 == 0:
        k = level // 2
        standard = SubAlgebra.scalar_tensor_full(2, 2**k)
        return standard.conjugate(first[level] @ twist_unitary(k), label=f"meet[{level}]")
    return None


def _meet_four_by_four(first: Tower, second: Tower, level: int) -> SubAlgebra | None:
    if level == 0:
        perm = np.eye(4, dtype=np.complex128)[:, [0, 1, 3, 2]]
        return SubAlgebra.from_structure(first[0] @ perm, [1, 1, 1], [1, 2, 1], label="meet[0]")
    if level % 2 == 1:
        k = (level - 1) // 2
        ratio = dagger(first[2 * k]) @ second[2 * k]
        inner = commutant(ratio @ ratio)
        return inner.ampliate(4).conjugate(first[level], label=f"meet[{level}]")
    return None


def build_grid(
    family: str,
    first_param,
    second_param,
    levels: int = 3,
    cross_check: bool = True,
    allow_equivalent: bool = False,
    rng: np.random.Generator | None = None,
) -> Grid:
    """Assemble the grid of a pair of seeds up to ladder level ``levels``.

    Parameters
    ----------
    family:
        ``"two_by_two"`` (parameters are angles for :func:`hadamard2` or
        Hadamard matrices) or ``"four_by_four"`` (angles for
        :func:`hadamard4`).
    cross_check:
        Compare every closed-form intersection with a direct subspace
        intersection whenever the ambient is at most 64, and compute the
        intersection directly where no closed form is implemented.
    allow_equivalent:
        Permit monomially equivalent seeds (both sides then coincide).

    Raises
    ------
    EquivalentSeeds
        For monomially equivalent seeds unless ``allow_equivalent``.
    """
    rng = rng if rng is not None else np.random.default_rng(11)
    first_seed, second_seed = _seed(family, first_param), _seed(family, second_param)
    equivalent = monomial_equivalent(first_seed, second_seed)
    if equivalent and not allow_equivalent:
        raise EquivalentSeeds("the seeds are monomially equivalent; both sides coincide")
    build = tower2 if family == "two_by_two" else tower4
    first, second = build(first_seed, levels), build(second_seed, levels)
    n = first.order
    grid = Grid(family, first, second, [], [], [], [])
    for level in range(levels + 1):
        grid.ambient.append(ambient_level_algebra(n, level))
        left = seed_level_algebra(first.unitaries, n, level, label=f"first[{level}]")
        right = seed_level_algebra(second.unitaries, n, level, label=f"second[{level}]")
        grid.first_side.append(left)
        grid.second_side.append(right)
        if equivalent:
            grid.meet.append(left)
            continue
        closed = (_meet_two_by_two if family == "two_by_two" else _meet_four_by_four)(first, second, level)
        direct = None
        if cross_check and left.ambient_dim <= BASIS_LIMIT:
            direct = intersect(left, right, rng=rng)
            direct.label = f"meet[{level}]"
        if closed is not None and direct is not None:
            grid.cross_checks[level] = spans_equal_residual(closed, direct, rng)
        grid.meet.append(closed if closed is not None else direct)
    return grid


def tower_unitarity_residual(tower: Tower) -> float:
    """Worst ``max |u u^* - I|`` over the levels of ``tower``."""
    return max(max_abs(u @ dagger(u) - identity(u.shape[0])) for u in tower.unitaries)


def odd_level_block_pattern_residual(tower: Tower) -> float:
    """Worst off-block-diagonal entry of the odd-level unitaries.

    Odd-level unitaries lie in ``D_n kron M``, i.e. are block diagonal over
    the leading tensor factor.
    """
    n = tower.order
    worst = 0.0
    for level in range(1, tower.top_level + 1, 2):
        u = tower[level]
        b = u.shape[0] // n
        mask = np.ones_like(u, dtype=bool)
        for i in range(n):
            mask[i * b : (i + 1) * b, i * b : (i + 1) * b] = False
        worst = max(worst, float(np.max(np.abs(u[mask]))) if mask.any() else 0.0)
    return worst


def vertex_unitary(tower: Tower) -> np.ndarray:
    """``u_2 t f`` for a two-by-two tower, with ``t`` the level-one twist and ``f`` the flip.

    This single unitary of ``M_4`` generates the intersection grid.
    """
    if tower.family != "two_by_two" or tower.top_level < 2:
        raise ValueError("needs a two-by-two tower reaching level 2")
    return tower[2] @ twist_unitary(1) @ flip_unitary()


def vertex_unitary_residual(tower: Tower) -> float:
    """``max |u_2 t f - (F_2 kron u) diag(I_2, pauli_x)|``."""
    f2 = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    target = kron(f2, tower.seed.matrix) @ block_diag(identity(2), pauli_x())
    return max_abs(vertex_unitary(tower) - target)


def step_corner_residual(a: complex) -> float:
    """``max |S^* E_11 S - J_4|`` for the even-step unitary ``S`` at circle parameter ``a``."""
    s = step_unitary_four(a)
    return max_abs(dagger(s) @ matrix_unit(0, 0, 4) @ s - uniform_projection(4))
