"""Entropy, Pimsner-Popa constants, angles and commuting squares."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinlab.algebra import SubAlgebra, inclusion_matrix
from spinlab.errors import IndexOne, InclusionViolated, IntersectionMismatch, NegativeInput, NotUnitary
from spinlab.hadamard import fourier, hadamard2, parse_angle
from spinlab.invariants import (
    BlockFactor,
    PPData,
    commuting_square_test,
    cube_angle,
    interior_exterior_angle_from_traces,
    masa_pair_entropy,
    neg_t_log_t,
    nondegenerate_test,
    pp_constant_block_factor,
    pp_constant_inclusion,
    pp_constant_masa_hamming,
    pp_constant_masa_oracle,
    pp_constant_tower_sequence,
    pp_entropy_inclusion,
    reduced_block_pair,
    sw_angle_spectrum,
)
from spinlab.linalg import identity, pauli_x, random_unitary
from spinlab.towers import tower2, tower4


def test_neg_t_log_t():
    assert neg_t_log_t(0.0) == 0.0
    assert neg_t_log_t(1.0) == 0.0
    assert neg_t_log_t(0.5) == pytest.approx(0.5 * math.log(2))
    with pytest.raises(NegativeInput):
        neg_t_log_t(-1e-3)


def test_masa_constants_of_identity_and_fourier():
    assert pp_constant_masa_hamming(identity(3)) == 1.0
    assert pp_constant_masa_oracle(identity(3)) == pytest.approx(1.0)
    for n in (2, 3, 5):
        assert pp_constant_masa_hamming(fourier(n).matrix) == pytest.approx(1 / n)
        assert masa_pair_entropy(fourier(n).matrix) == pytest.approx(math.log(n))


def test_masa_constant_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        pp_constant_masa_hamming(2 * identity(2))


def test_masa_constant_block_unitary():
    u = np.kron(identity(2), fourier(2).matrix)
    assert pp_constant_masa_hamming(u) == pytest.approx(0.5)
    assert pp_constant_masa_oracle(u) == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_entropy_bounded_by_log_of_constant(n, seed):
    u = random_unitary(n, np.random.default_rng(seed))
    incl = pp_constant_masa_oracle(u)
    assert masa_pair_entropy(u) <= -math.log(incl) + 1e-12


def test_block_factor_classification():
    assert pp_constant_block_factor(identity(2), 1j * identity(2)) == BlockFactor("exact", Fraction(1))
    assert pp_constant_block_factor(identity(2), pauli_x()).value == Fraction(1, 2)
    assert not pp_constant_block_factor(identity(2), np.diag([1, -1])).is_exact
    assert str(pp_constant_block_factor(identity(2), pauli_x())) == "Exactly(1/2)"


def _data(small, large):
    return PPData.from_inclusion(inclusion_matrix(small, large))


def test_pp_inclusion_examples():
    scalars_in_m2 = _data(SubAlgebra.scalars(2), SubAlgebra.full(2))
    assert pp_constant_inclusion(scalars_in_m2) == pytest.approx(0.5)
    assert pp_entropy_inclusion(scalars_in_m2) == pytest.approx(math.log(2))
    m2_in_m4 = _data(SubAlgebra.scalar_tensor_full(2, 2), SubAlgebra.full(4))
    assert pp_constant_inclusion(m2_in_m4) == pytest.approx(0.25)
    assert pp_entropy_inclusion(m2_in_m4) == pytest.approx(2 * math.log(2))
    diag_in_m4 = _data(SubAlgebra.diagonal(4), SubAlgebra.full(4))
    assert pp_constant_inclusion(diag_in_m4) == pytest.approx(0.25)
    assert pp_entropy_inclusion(diag_in_m4) == pytest.approx(math.log(4))


def test_pp_data_validation():
    with pytest.raises(ValueError):
        PPData(np.array([[1]]), (1,), (2,), (1.0,), (1.0,))


def test_sw_angle_two_by_two_masa_pair():
    gap = math.pi / 5
    u = hadamard2(parse_angle("0")).matrix
    v = hadamard2(parse_angle("1/5")).matrix
    a = SubAlgebra.diagonal(2).conjugate(u)
    b = SubAlgebra.diagonal(2).conjugate(v)
    out = sw_angle_spectrum(a, b)
    assert out.angles == pytest.approx((math.acos(abs(math.cos(gap))),), abs=1e-9)


def test_sw_angle_boundary_is_right_angle():
    a = SubAlgebra.diagonal(2)
    b = SubAlgebra.diagonal(2).conjugate(fourier(2).matrix)
    out = sw_angle_spectrum(a, b)
    assert out.angles == (math.pi / 2,)
    assert out.operator_norm < 1e-9


def test_commuting_square_examples():
    top = SubAlgebra.full(4)
    first = SubAlgebra.from_structure(identity(4), [2], [2])
    second = SubAlgebra.scalar_tensor_full(2, 2)
    bottom = SubAlgebra.scalars(4)
    ok, res = commuting_square_test(bottom, first, second, top)
    assert ok and res < 1e-12
    assert nondegenerate_test(first, second, top)
    diag = SubAlgebra.diagonal(4)
    ok, _ = commuting_square_test(bottom, diag, diag.conjugate(random_unitary(4, np.random.default_rng(0))), top)
    assert not ok
    with pytest.raises(InclusionViolated):
        commuting_square_test(SubAlgebra.diagonal(4), first, second, top)


def test_cube_angle_quarter():
    gap = math.pi / 3
    u = hadamard2(parse_angle("0")).matrix
    v = hadamard2(parse_angle("1/3")).matrix
    a = SubAlgebra.diagonal(2).conjugate(u)
    b = SubAlgebra.diagonal(2).conjugate(v)
    out = cube_angle(a, b, SubAlgebra.scalars(2))
    assert out.kind == "angle"
    assert out.coefficient == pytest.approx(math.cos(gap) ** 2)
    with pytest.raises(IntersectionMismatch):
        cube_angle(a, b, SubAlgebra.diagonal(2))


def test_interior_angle_from_traces_and_index_one():
    pair = interior_exterior_angle_from_traces(4.0, 2.0, 2.0, 0.25, 0.5, 0.5)
    assert pair.cos_interior == pytest.approx(0.0)
    assert pair.cos_exterior == pytest.approx(0.0)
    with pytest.raises(IndexOne):
        interior_exterior_angle_from_traces(2.0, 1.0, 2.0, 0.5, 1.0, 0.5)


def test_reduced_block_pair_and_sequence():
    first = tower2(hadamard2(parse_angle("0")), 7)
    second = tower2(hadamard2(parse_angle("1/3")), 7)
    x1, x2 = reduced_block_pair(first[5], second[5], 2)
    assert x1.shape == x2.shape == (8, 8)
    seq = pp_constant_tower_sequence(first, second, [2, 3])
    assert seq.values == [Fraction(1, 2), Fraction(1, 2)]
    assert seq.non_increasing
    same = pp_constant_tower_sequence(first, first, [0, 1])
    assert same.values == [Fraction(1), Fraction(1)]


def test_four_by_four_block_pattern():
    first, second = tower4(parse_angle("0"), 3), tower4(parse_angle("1/3"), 3)
    seq = pp_constant_tower_sequence(first, second, [0, 1])
    assert seq.eventual_value == Fraction(1, 2)


def test_masa_constant_permutation_and_two_by_two_product():
    perm = np.eye(4)[[2, 0, 3, 1]]
    assert pp_constant_masa_hamming(perm) == 1.0
    u = hadamard2(parse_angle("0")).matrix
    v = hadamard2(parse_angle("2/7")).matrix
    assert pp_constant_masa_hamming(u.conj().T @ v) == pytest.approx(0.5)
    assert pp_constant_masa_oracle(u.conj().T @ v) == pytest.approx(0.5)


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_angle_set_is_symmetric(angle_one, angle_two):
    p = SubAlgebra.diagonal(2).conjugate(hadamard2(parse_angle(f"irr:{angle_one!r}")).matrix)
    q = SubAlgebra.diagonal(2).conjugate(hadamard2(parse_angle(f"irr:{angle_two!r}")).matrix)
    assert sw_angle_spectrum(p, q).angles == pytest.approx(sw_angle_spectrum(q, p).angles, abs=1e-8)


@pytest.mark.parametrize("angle_two", ["1/2", "-1/2", "1/3", "1/5", "3/4"])
def test_commuting_square_iff_right_angle(angle_two):
    u = hadamard2(parse_angle("0")).matrix
    v = hadamard2(parse_angle(angle_two)).matrix
    p = SubAlgebra.diagonal(2).conjugate(u)
    q = SubAlgebra.diagonal(2).conjugate(v)
    ok, _ = commuting_square_test(SubAlgebra.scalars(2), p, q, SubAlgebra.full(2))
    assert ok == (sw_angle_spectrum(p, q).angles == (math.pi / 2,))
    assert ok == (angle_two in ("1/2", "-1/2"))
