"""Spectra of the four-by-four seed products and their consequences.

The square of ``u_{2k}^* v_{2k}`` controls the intersection of the two
seed sides at odd levels.  This module predicts its spectrum from an
exact multiplicity recurrence, measures it numerically, derives the
inclusion matrices of the intersections and the resulting index
predictions, computes relative commutants at desk scale and assembles
the closed-form summary of a four-by-four pair.

Eigenvalues are labelled by the even exponent ``e`` of ``ratio**e`` with
the phase ratio ``ratio = conj(a) b``; labels are enumerated as ``0, 2, -2, 4, -4, ...``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    SubAlgebra,
    commutant,
    inclusion_matrix,
    intersect,
)
from .errors import DimensionOverflow, PowerMatchFailure, RangeExceeded
from .hadamard import Angle, PhaseRatioClass, classify_phase_ratio, hadamard4
from .invariants import (
    interior_exterior_angle_from_traces,
    masa_pair_entropy,
    neg_t_log_t,
    pp_constant_tower_sequence,
)
from .linalg import dagger, eig_normal, kron, max_abs
from .towers import Grid, Tower, tower4, twist_unitary

__all__ = [
    "half_projection",
    "phase_block",
    "half_swap",
    "SeedSquare",
    "seed_product_square",
    "label_order",
    "SpectrumTable",
    "predicted_multiplicities",
    "measured_spectrum",
    "IndexPrediction",
    "predicted_inclusion_and_index",
    "odd_level_inclusion",
    "relative_commutant_dim",
    "masa_relative_commutant_dim",
    "FourByFourSummary",
    "four_by_four_summary",
    "entropy_table",
    "dihedral_angles",
    "entropy_lower_bound_formula",
    "GENERIC_LEVEL_LIMIT",
]

#: Largest level accepted by the generic multiplicity recurrence.
GENERIC_LEVEL_LIMIT = 6
#: Largest level at which the seed product square is formed (ambient 256).
SQUARE_LEVEL_LIMIT = 3


# ---------------------------------------------------------------------- fixed matrices
def half_projection() -> np.ndarray:
    """The rank-two projection with ``u^* v = half_projection() + phase_block(ratio)``."""
    return 0.5 * np.array(
        [[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1]], dtype=np.complex128
    )


def phase_block(ratio: complex) -> np.ndarray:
    """The complementary part of ``u^* v``; it satisfies ``phase_block(t)**n == phase_block(t**n)``."""
    t = complex(ratio)
    return 0.5 * np.array(
        [[1, 0, -1, 0], [0, t, 0, -t], [-1, 0, 1, 0], [0, -t, 0, t]], dtype=np.complex128
    )


def half_swap() -> np.ndarray:
    """Self-adjoint unitary bringing both fixed matrices to block-diagonal form.

    ``W p W = diag(1, 1, 0, 0)`` and ``W q(t) W = diag(0, 0, 1, t)``.
    """
    return np.array(
        [[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, -1, 0], [0, 1, 0, -1]], dtype=np.complex128
    ) / np.sqrt(2)


# ---------------------------------------------------------------------- seed products
@dataclass(frozen=True)
class SeedSquare:
    """``(u_{2k}^* v_{2k})^2`` from the towers and from the tensor recursion."""

    level: int
    direct: np.ndarray = field(repr=False)
    recursive: np.ndarray = field(repr=False)

    @property
    def residual(self) -> float:
        return max_abs(self.direct - self.recursive)


def _ratio(first: Tower, second: Tower) -> complex:
    return complex(np.conj(first.seed.parameters[0].unit()) * second.seed.parameters[0].unit())


def seed_product_square(k: int, first: Tower, second: Tower) -> SeedSquare:
    """Square of ``u_{2k}^* v_{2k}`` computed two ways.

    The recursion is ``X_0 = u^* v`` and
    ``X_j = p kron X_{j-1} + q(ratio) kron X_{j-1}^*``.

    Raises
    ------
    DimensionOverflow
        For ``k > 3``.
    """
    if k > SQUARE_LEVEL_LIMIT:
        raise DimensionOverflow(f"seed product square at level {k} > {SQUARE_LEVEL_LIMIT}")
    direct = dagger(first[2 * k]) @ second[2 * k]
    p, q = half_projection(), phase_block(_ratio(first, second))
    x = dagger(first[0]) @ second[0]
    for _ in range(k):
        x = kron(p, x) + kron(q, dagger(x))
    return SeedSquare(k, direct @ direct, x @ x)


# ---------------------------------------------------------------------- predicted spectra
def label_order(label: int) -> tuple[int, int]:
    """Sort key realizing the enumeration ``0, 2, -2, 4, -4, ...``."""
    return (abs(label), 0 if label >= 0 else 1)


@dataclass(frozen=True)
class SpectrumTable:
    """Eigenvalues ``ratio**power`` of the seed product square with multiplicities.

    Attributes
    ----------
    level:
        The level ``k``; the matrix has size ``4**(k+1)``.
    phase_class:
        Classification of the phase ratio.
    entries:
        ``(power, multiplicity)`` in enumeration order.
    """

    level: int
    phase_class: PhaseRatioClass
    entries: tuple[tuple[int, int], ...]

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.entries)

    @property
    def powers(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)


def _generic_counts(k: int) -> Counter:
    counts = Counter({0: 3, 2: 1})
    for _ in range(k):
        nxt: Counter = Counter()
        for e, c in counts.items():
            nxt[e] += 2 * c
            nxt[-e] += c
            nxt[2 - e] += c
        counts = nxt
    return counts


def _fold(counts: Counter, period: int) -> Counter:
    """Merge labels congruent modulo ``period``, keeping the first in enumeration order."""
    merged: Counter = Counter()
    reps: dict[int, int] = {}
    for e in sorted(counts, key=label_order):
        r = e % period
        reps.setdefault(r, e)
        merged[reps[r]] += counts[e]
    return merged


def _table(k: int, cls: PhaseRatioClass, counts: Counter) -> SpectrumTable:
    entries = tuple((e, int(counts[e])) for e in sorted(counts, key=label_order) if counts[e])
    return SpectrumTable(k, cls, entries)


def predicted_multiplicities(k: int, phase_class: PhaseRatioClass) -> SpectrumTable:
    """Multiplicities from the exact recurrence.

    In the Hadamard frame ``X_k^2 = p kron X_{k-1}^2 + q(ratio^2) kron X_{k-1}^{*2}``
    block-diagonalizes, so each label ``e`` at level ``k-1`` contributes
    twice to ``e`` and once each to ``-e`` and ``2 - e``.  For instance
    ``m_k(0) = 3 m_{k-1}(0) + m_{k-1}(2)``.  When the ratio is a
    primitive root with least even order ``m``, labels are merged modulo
    ``m``.

    Raises
    ------
    RangeExceeded
        For the even-root case beyond level ``2 k0 - 1`` with
        ``k0 = (m - 2) / 2``, and for ``k > 6`` in general.
    """
    if k < 0 or k > GENERIC_LEVEL_LIMIT:
        raise RangeExceeded(f"level {k} outside 0..{GENERIC_LEVEL_LIMIT}")
    counts = _generic_counts(k)
    if phase_class.is_even_root:
        m = phase_class.even_order
        k0 = (m - 2) // 2
        if k > max(2 * k0 - 1, 0):
            raise RangeExceeded(f"even order {m}: recurrence covers levels up to {2 * k0 - 1}")
        counts = _fold(counts, m)
    return _table(k, phase_class, counts)


def _admissible_labels(k: int) -> list[int]:
    """The first ``k + 2`` labels of the enumeration, which carry the level-``k`` spectrum."""
    top = 2 * (k + 1)
    return sorted(range(-top, top + 1, 2), key=label_order)[: k + 2]


def _power(angle: Angle, e: int) -> complex:
    if angle.is_rational:
        return Angle.rational(angle.pi_multiple * e).unit()
    return complex(np.exp(1j * e * angle.radians))


def measured_spectrum(
    k: int, first: Tower, second: Tower, cluster_tol: float = 1e-7, match_tol: float = 1e-5
) -> SpectrumTable:
    """Eigenvalue clusters of the seed product square matched to powers of the phase ratio.

    Rational ratios are matched to the exact powers ``ratio**e``; for a
    declared-irrational ratio each cluster is matched to the nearest
    admissible power.  Multiplicities are the projector ranks.

    Raises
    ------
    PowerMatchFailure
        If a cluster sits farther than ``match_tol`` from every admissible power.
    """
    cls = classify_phase_ratio(first.seed.parameters[0], second.seed.parameters[0])
    square = seed_product_square(k, first, second).direct
    spectrum = eig_normal(square, cluster_tol)
    labels = _admissible_labels(k)
    counts: Counter = Counter()
    for value, mult in zip(spectrum.eigenvalues, spectrum.multiplicities):
        dists = [abs(value - _power(cls.angle, e)) for e in labels]
        best = int(np.argmin(dists))
        if dists[best] > match_tol:
            raise PowerMatchFailure(f"eigenvalue {value:.6f} is {dists[best]:.2e} from every power")
        label = labels[best]
        if cls.is_even_root:
            # report the first congruent label in enumeration order
            label = next(e for e in labels if (e - label) % cls.even_order == 0)
        counts[label] += mult
    return _table(k, cls, counts)


# ---------------------------------------------------------------------- index
@dataclass(frozen=True)
class IndexPrediction:
    """Finite index ``2m`` with the drop level, or infinite index.

    Attributes
    ----------
    finite:
        Whether the index is finite.
    index:
        ``2m`` in the finite case.
    drop_level:
        ``k0 = (m - 2) / 2``, the level from which the inclusion matrices stop growing.
    inclusion_shape:
        Shape of the all-ones inclusion matrix at the drop level (finite case).
    """

    finite: bool
    index: int | None = None
    drop_level: int | None = None
    inclusion_shape: tuple[int, int] | None = None

    def inclusion_shape_at(self, k: int) -> tuple[int, int]:
        """Shape of the all-ones inclusion matrix of the intersection at level ``2k+1``."""
        rows = k + 2
        if self.finite:
            rows = min(rows, self.inclusion_shape[0])
        return (rows, 4)

    def pp_constant_at(self, k: int) -> Fraction:
        """``1 / ||A_k||^2`` for the inclusion matrix ``A_k`` at the grid level ``2k+1``."""
        rows, cols = self.inclusion_shape_at(k)
        return Fraction(1, rows * cols)

    def pp_sequence(self, levels: int) -> list[Fraction]:
        return [self.pp_constant_at(k) for k in range(levels)]

    @property
    def label(self) -> str:
        return f"Finite({self.index})" if self.finite else "Infinite"


def predicted_inclusion_and_index(phase_class: PhaseRatioClass) -> IndexPrediction:
    """Index of the intersection inside the whole algebra.

    For an even root of order ``m`` the inclusion matrices stop growing at
    ``k0 = (m - 2) / 2`` with ``k0 + 1`` rows, giving squared norm ``2m``.
    Otherwise the ``k``-th matrix is the ``(k+2) x 4`` all-ones matrix and
    the grid constants ``1 / (4 (k+2))`` tend to zero.
    """
    if phase_class.is_even_root:
        m = phase_class.even_order
        k0 = (m - 2) // 2
        return IndexPrediction(True, 2 * m, k0, (k0 + 1, 4))
    return IndexPrediction(False)


def odd_level_inclusion(grid: Grid, k: int):
    """Inclusion matrix of the intersection inside the ladder algebra at level ``2k+1``."""
    level = 2 * k + 1
    return inclusion_matrix(grid.meet[level], grid.ambient[level])


# ---------------------------------------------------------------------- relative commutants
def relative_commutant_dim(grid: Grid, tol: float = 1e-8) -> int:
    """Dimension of the finite-level relative commutant that computes the limit one.

    Two-by-two family: ``(Ad_{u_2 t}(C kron M_2))' cap (C kron M_2)`` in
    ``M_4`` with ``t`` the level-one twist.  Four-by-four family with an
    even root of order ``m = 4``: ``C_3' cap A_1`` inside ``M_64``, where
    ``C_3`` is the intersection at level three and ``A_1`` the level-one
    ladder algebra ampliated to that ambient.

    Raises
    ------
    DimensionOverflow
        For the four-by-four family with ``m >= 6`` (beyond desk scale).
    """
    if grid.family == "two_by_two":
        small = SubAlgebra.scalar_tensor_full(2, 2)
        twisted = small.conjugate(grid.first[2] @ twist_unitary(1))
        return intersect(commutant(twisted), small, tol).dim
    cls = classify_phase_ratio(grid.first.seed.parameters[0], grid.second.seed.parameters[0])
    if not cls.is_even_root or cls.even_order != 4:
        raise DimensionOverflow("four-by-four relative commutant implemented for even order 4 only")
    if grid.levels < 3:
        raise ValueError("grid must reach level 3")
    meet = grid.meet[3]
    bottom = grid.ambient[1].embed_into(meet.ambient_dim)
    return intersect(commutant(meet), bottom, tol).dim


def masa_relative_commutant_dim(u: np.ndarray, tol: float = 1e-8) -> int:
    """``(Ad_u(D_n))' cap D_n``; it is one-dimensional for a complex Hadamard ``u``."""
    n = u.shape[0]
    return intersect(commutant(SubAlgebra.diagonal(n).conjugate(u)), SubAlgebra.diagonal(n), tol).dim


# ---------------------------------------------------------------------- summary
@dataclass(frozen=True)
class FourByFourSummary:
    """Closed-form invariants of a four-by-four pair.

    Attributes
    ----------
    phase_class:
        Classification of the phase ratio ``conj(a) b``.
    dihedral_angles:
        ``{2 k pi / m : 1 <= k <= floor((m - 2) / 4)}``, or ``(pi/2,)`` when
        that set is empty; ``None`` if the ratio is not an even root.
    cos_interior, cos_exterior:
        Cosines of the angles between the two sides (even roots only).
    entropy:
        ``(lower, upper)`` bounds of the relative entropy of the two sides;
        equal in the even-root case.
    entropy_table:
        Relative entropies among the whole algebra, the two sides, their
        intersection and the algebra they generate (even roots only).
    pp_constant:
        Pimsner-Popa constant of the two sides.
    index:
        Index prediction for the intersection.
    """

    phase_class: PhaseRatioClass
    dihedral_angles: tuple[float, ...] | None
    cos_interior: float | None
    cos_exterior: float | None
    entropy: tuple[float, float]
    entropy_table: dict[str, dict[str, float]] | None
    pp_constant: Fraction
    index: IndexPrediction


TABLE_KEYS = ("whole", "first", "second", "meet", "join")


def entropy_table(m: int) -> dict[str, dict[str, float]]:
    """Relative entropies ``H(row | column)`` for an even root of order ``m``."""
    ln2, lnm = math.log(2), math.log(m)
    rows = {
        "whole": (0.0, math.log(4), math.log(4), math.log(2 * m), ln2),
        "first": (0.0, 0.0, ln2, lnm - ln2, 0.0),
        "second": (0.0, ln2, 0.0, lnm - ln2, 0.0),
        "meet": (0.0, 0.0, 0.0, 0.0, 0.0),
        "join": (0.0, ln2, ln2, lnm, 0.0),
    }
    return {r: dict(zip(TABLE_KEYS, vals)) for r, vals in rows.items()}


def dihedral_angles(m: int) -> tuple[float, ...]:
    ks = range(1, (m - 2) // 4 + 1)
    angles = tuple(2 * k * math.pi / m for k in ks)
    return angles if angles else (math.pi / 2,)


def four_by_four_summary(a_angle, b_angle) -> FourByFourSummary:
    """Closed-form invariants for the pair of four-by-four seeds at ``a`` and ``b``.

    The Pimsner-Popa constant is read off the block reduction at the first
    odd level; the entropy lower bound in the generic case is the masa-pair
    entropy of ``u^* v``.

    Raises
    ------
    OutOfParameterRange
        For parameters outside ``[0, pi)``.
    DegeneratePair
        For equal parameters.
    """
    first, second = tower4(hadamard4(a_angle), 1), tower4(hadamard4(b_angle), 1)
    cls = classify_phase_ratio(first.seed.parameters[0], second.seed.parameters[0])
    seq = pp_constant_tower_sequence(first, second, [0])
    pp = seq.levels[0].value
    index = predicted_inclusion_and_index(cls)
    if cls.is_even_root:
        m = cls.even_order
        angles = interior_exterior_angle_from_traces(2 * m, m / 2, m / 2, 1 / 8, 1 / 4, 1 / 4)
        ent = (math.log(2), math.log(2))
        return FourByFourSummary(cls, dihedral_angles(m), angles.cos_interior, angles.cos_exterior,
                                 ent, entropy_table(m), pp, index)
    lower = masa_pair_entropy(dagger(first[0]) @ second[0])
    return FourByFourSummary(cls, None, None, None, (lower, math.log(2)), None, pp, index)


def entropy_lower_bound_formula(a_angle, b_angle) -> float:
    """``ln 2 + (f(|1 + a conj(b)|^2) + f(|1 - a conj(b)|^2)) / 8`` with ``f(t) = -t ln t``."""
    a = hadamard4(a_angle).parameters[0].unit()
    b = hadamard4(b_angle).parameters[0].unit()
    w = a * np.conj(b)
    return math.log(2) + (neg_t_log_t(abs(1 + w) ** 2) + neg_t_log_t(abs(1 - w) ** 2)) / 8
