"""Complex Hadamard matrices and their equivalence relations.

Angles are handled by :class:`Angle`, which keeps a rational multiple of
``pi`` exact (as a :class:`fractions.Fraction`) so that questions such as
"is ``conj(a) b`` an even root of unity" are decided by integer arithmetic
instead of floating-point comparisons.  An angle may also be *declared*
irrational, in which case only its radian value is stored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegeneratePair, OrderTooLarge, OutOfParameterRange, UsageError, ZeroVector
from .linalg import dagger, is_unitary

__all__ = [
    "Angle",
    "HadamardMatrix",
    "PhaseRatioClass",
    "parse_angle",
    "fourier",
    "hadamard2",
    "hadamard2_full",
    "hadamard4",
    "is_complex_hadamard",
    "hamming",
    "monomial_equivalent",
    "hadamard_equivalent",
    "classify_phase_ratio",
]


@dataclass(frozen=True)
class Angle:
    """An angle in radians, exact when it is a rational multiple of ``pi``.

    Attributes
    ----------
    pi_multiple:
        The exact value ``angle / pi`` for rational angles, else ``None``.
    irrational_radians:
        The radian value of a declared-irrational angle, else ``None``.
    """

    pi_multiple: Fraction | None = None
    irrational_radians: float | None = None

    def __post_init__(self):
        if (self.pi_multiple is None) == (self.irrational_radians is None):
            raise ValueError("exactly one of pi_multiple and irrational_radians must be set")

    @classmethod
    def rational(cls, value) -> "Angle":
        """``Angle.rational(Fraction(1, 3))`` is ``pi / 3``."""
        return cls(pi_multiple=Fraction(value))

    @classmethod
    def irrational(cls, radians: float) -> "Angle":
        return cls(irrational_radians=float(radians))

    @property
    def is_rational(self) -> bool:
        return self.pi_multiple is not None

    @property
    def radians(self) -> float:
        if self.pi_multiple is not None:
            return math.pi * float(self.pi_multiple)
        return float(self.irrational_radians)

    def unit(self) -> complex:
        """The point ``exp(i * angle)`` on the unit circle."""
        if self.pi_multiple is not None:
            # exact values at multiples of pi/2 avoid 1e-16 residue in matrices
            f = self.pi_multiple % 2
            exact = {Fraction(0): 1, Fraction(1, 2): 1j, Fraction(1): -1, Fraction(3, 2): -1j}
            if f in exact:
                return complex(exact[f])
        return complex(np.exp(1j * self.radians))

    def __sub__(self, other: "Angle") -> "Angle":
        if self.is_rational and other.is_rational:
            return Angle.rational(self.pi_multiple - other.pi_multiple)
        return Angle.irrational(self.radians - other.radians)

    def __add__(self, other: "Angle") -> "Angle":
        if self.is_rational and other.is_rational:
            return Angle.rational(self.pi_multiple + other.pi_multiple)
        return Angle.irrational(self.radians + other.radians)

    def __str__(self) -> str:
        if self.pi_multiple is not None:
            f = self.pi_multiple
            return f"{f.numerator}/{f.denominator}"
        return f"irr:{self.irrational_radians!r}"

    def to_json(self) -> dict:
        if self.pi_multiple is not None:
            return {"kind": "rational_pi_multiple", "text": str(self), "radians": self.radians}
        return {"kind": "declared_irrational", "text": str(self), "radians": self.radians}


def parse_angle(text: str) -> Angle:
    """Parse ``"p/q"`` (meaning ``(p/q) pi``), ``"p"`` or ``"irr:<radians>"``.

    Raises
    ------
    UsageError
        For anything else, including plain decimals, which would silently
        lose the exactness the classification relies on.
    """
    text = text.strip()
    if text.startswith("irr:"):
        try:
            return Angle.irrational(float(text[4:]))
        except ValueError as exc:
            raise UsageError(f"bad irrational angle {text!r}") from exc
    num, _, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if den else 1
    except ValueError as exc:
        raise UsageError(f"bad angle {text!r}; expected p/q or irr:<radians>") from exc
    if q == 0:
        raise UsageError(f"bad angle {text!r}: zero denominator")
    return Angle.rational(Fraction(p, q))


def _as_angle(value) -> Angle:
    if isinstance(value, Angle):
        return value
    if isinstance(value, str):
        return parse_angle(value)
    if isinstance(value, (int, Fraction)):
        return Angle.rational(value)
    raise TypeError(
        f"angle must be an Angle, a 'p/q' string or an exact rational (multiple of pi), got {value!r}"
    )


@dataclass(frozen=True)
class HadamardMatrix:
    """A complex Hadamard matrix scaled to be unitary.

    Attributes
    ----------
    order:
        The size ``n``.
    matrix:
        The unitary matrix; every entry has modulus ``1/sqrt(n)``.
    family:
        ``"fourier"``, ``"two_by_two"`` or ``"four_by_four"``.
    parameters:
        The defining angles (empty for Fourier matrices).
    """

    order: int
    matrix: np.ndarray
    family: str
    parameters: tuple[Angle, ...] = ()


def fourier(n: int) -> HadamardMatrix:
    """Fourier matrix with entries ``exp(2 pi i jk / n) / sqrt(n)`` (zero-based ``j, k``)."""
    if n < 1:
        raise ValueError("order must be positive")
    j = np.arange(n)
    mat = np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)
    if n == 2:
        mat = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    return HadamardMatrix(n, mat.astype(np.complex128), "fourier")


def hadamard2(angle) -> HadamardMatrix:
    """Two-by-two Hadamard matrix with rows ``(1, 1)`` and ``(w, -w)`` for ``w = e^{i angle}``."""
    a = _as_angle(angle)
    w = a.unit()
    mat = np.array([[1, 1], [w, -w]], dtype=np.complex128) / np.sqrt(2)
    return HadamardMatrix(2, mat, "two_by_two", (a,))


def hadamard2_full(first, second, third) -> HadamardMatrix:
    """General two-by-two Hadamard matrix with three phase parameters.

    Rows are ``(e^{i a1}, e^{i (a1 + a3)})`` and ``(e^{i a2}, -e^{i (a2 + a3)})``.
    It is monomially equivalent to ``hadamard2(a2 - a1)``.
    """
    a1, a2, a3 = (_as_angle(x) for x in (first, second, third))
    mat = np.array(
        [[a1.unit(), (a1 + a3).unit()], [a2.unit(), -(a2 + a3).unit()]], dtype=np.complex128
    ) / np.sqrt(2)
    return HadamardMatrix(2, mat, "two_by_two", (a1, a2, a3))


def hadamard4(angle) -> HadamardMatrix:
    """Member of the one-parameter four-by-four family at ``z = e^{i angle}``.

    Raises
    ------
    OutOfParameterRange
        Unless ``0 <= angle < pi``; values are rejected rather than reduced,
        because reduction would change which pairs coincide up to sign.
    """
    p = _as_angle(angle)
    ok = (0 <= p.pi_multiple < 1) if p.is_rational else (0.0 <= p.radians < math.pi)
    if not ok:
        raise OutOfParameterRange(f"four-by-four parameter {p} outside [0, pi)")
    z = p.unit()
    iz = 1j * z
    mat = 0.5 * np.array(
        [[1, 1, 1, 1], [1, iz, -1, -iz], [1, -1, 1, -1], [1, -iz, -1, iz]], dtype=np.complex128
    )
    return HadamardMatrix(4, mat, "four_by_four", (p,))


def is_complex_hadamard(u: np.ndarray, tol: float = 1e-9) -> bool:
    """Unitary with every entry of modulus ``1/sqrt(n)``, both within ``tol``."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    n = u.shape[0]
    return is_unitary(u, tol) and bool(np.all(np.abs(np.abs(u) - 1 / np.sqrt(n)) <= tol))


def hamming(v, tol: float = 1e-8) -> int:
    """Number of entries of ``v`` with modulus above ``tol``.

    Raises
    ------
    ZeroVector
        If no entry exceeds ``tol``.
    """
    count = int(np.sum(np.abs(np.asarray(v)) > tol))
    if count == 0:
        raise ZeroVector("hamming number of the zero vector")
    return count


def _is_monomial(m: np.ndarray, tol: float) -> bool:
    big = np.abs(m) > 0.5
    small = np.abs(m) < tol
    if not np.all(big | small):
        return False
    return bool(np.all(big.sum(axis=0) == 1) and np.all(big.sum(axis=1) == 1))


def monomial_equivalent(u, v, tol: float = 1e-8) -> bool:
    """``v = u P D`` for a permutation ``P`` and a diagonal unitary ``D``.

    Equivalently ``u^* v`` is a monomial unitary.
    """
    u = getattr(u, "matrix", u)
    v = getattr(v, "matrix", v)
    if u.shape != v.shape:
        return False
    return _is_monomial(dagger(u) @ v, tol)


def hadamard_equivalent(u, v, tol: float = 1e-8) -> bool:
    """``u = D1 P1 v P2 D2`` for permutations ``P_i`` and diagonal unitaries ``D_i``.

    Exhaustive over permutation pairs; for each pair the phases are read
    off the first row and column and the full identity is checked.

    Raises
    ------
    OrderTooLarge
        For order above 5.
    """
    u = np.asarray(getattr(u, "matrix", u))
    v = np.asarray(getattr(v, "matrix", v))
    n = u.shape[0]
    if n > 5:
        raise OrderTooLarge(f"exhaustive equivalence search at order {n} > 5")
    if u.shape != v.shape:
        return False
    perms = [list(p) for p in itertools.permutations(range(n))]
    for p1 in perms:
        vr = v[p1, :]
        for p2 in perms:
            x = vr[:, p2]
            if np.any(np.abs(x[0, :]) < tol) or np.any(np.abs(x[:, 0]) < tol):
                continue
            d2 = u[0, :] / x[0, :]
            d1 = u[:, 0] / (x[:, 0] * d2[0])
            if np.max(np.abs(d1[:, None] * x * d2[None, :] - u)) <= tol:
                if np.allclose(np.abs(d1), 1, atol=1e-6) and np.allclose(np.abs(d2), 1, atol=1e-6):
                    return True
    return False


@dataclass(frozen=True)
class PhaseRatioClass:
    """Classification of the phase ratio ``conj(a) b`` of two circle parameters.

    Attributes
    ----------
    value:
        The unit complex number ``conj(a) b``.
    angle:
        Its argument as an :class:`Angle` (exact when both inputs are).
    even_order:
        The least even ``m >= 4`` with ``value**m == 1``; ``None`` when
        the ratio is not an even root of unity.
    """

    value: complex
    angle: Angle
    even_order: int | None

    @property
    def is_even_root(self) -> bool:
        return self.even_order is not None

    @property
    def label(self) -> str:
        return f"EvenRoot({self.even_order})" if self.is_even_root else "NotEvenRoot"


def classify_phase_ratio(a_angle, b_angle) -> PhaseRatioClass:
    """Decide whether the ratio ``exp(i (b - a))`` is an even root of unity.

    For a rational difference ``(p/q) pi`` in lowest terms, the ratio has
    order ``2q / gcd(p, 2)`` and the least even power killing it is
    ``m = 2q``.  Declared-irrational inputs are classified as not being
    an even root.

    Raises
    ------
    DegeneratePair
        If ``b = a`` or ``b = -a`` (difference a multiple of ``pi``).
    """
    a, b = _as_angle(a_angle), _as_angle(b_angle)
    diff = b - a
    if diff.is_rational:
        if diff.pi_multiple.denominator == 1:
            raise DegeneratePair(f"b = +-a (difference {diff} pi)")
        m = 2 * diff.pi_multiple.denominator
        return PhaseRatioClass(diff.unit(), diff, m)
    if abs(math.remainder(diff.radians, math.pi)) < 1e-12:
        raise DegeneratePair("b = +-a")
    return PhaseRatioClass(diff.unit(), diff, None)
