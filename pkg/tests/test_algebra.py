"""Subalgebras, conditional expectations, commutants and inclusion matrices."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinlab.algebra import (
    SubAlgebra,
    commutant,
    conditional_expectation,
    generate_algebra,
    inclusion_matrix,
    intersect,
    spans_equal_residual,
    squared_norm,
    wedderburn,
)
from spinlab.errors import DimensionOverflow, NotIncluded
from spinlab.linalg import identity, kron, max_abs, pauli_x, pauli_z, random_unitary, tr_norm


def test_expectation_onto_diagonal_keeps_diagonal(rng):
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    d = SubAlgebra.diagonal(4)
    assert max_abs(d.expectation(x) - np.diag(np.diag(x))) < 1e-14


def test_expectation_onto_scalars_is_trace():
    x = np.diag([1.0, 2.0, 3.0, 6.0])
    assert max_abs(SubAlgebra.scalars(4).expectation(x) - 3.0 * identity(4)) < 1e-14


def test_expectation_onto_second_tensor_factor(rng):
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3))
    alg = SubAlgebra.scalar_tensor_full(2, 3)
    expected = tr_norm(a) * kron(identity(2), b)
    assert max_abs(alg.expectation(kron(a, b)) - expected) < 1e-12


def test_structured_and_basis_forms_agree(rng):
    u = random_unitary(6, rng)
    structured = SubAlgebra.from_structure(u, [2, 1], [2, 2])
    basis = SubAlgebra(6, structured.rows)
    assert structured.dim == basis.dim == 5
    x = rng.standard_normal((6, 6))
    assert max_abs(structured.expectation(x) - basis.expectation(x)) < 1e-12


def test_generate_algebra_from_pauli_x():
    alg = generate_algebra([pauli_x()], 2)
    assert alg.dim == 2
    assert alg.contains(identity(2))
    assert not alg.contains(pauli_z())


def test_generate_algebra_full_matrices():
    assert generate_algebra([pauli_x(), pauli_z()], 2).dim == 4


def test_generate_algebra_overflow():
    with pytest.raises(DimensionOverflow):
        generate_algebra([identity(65)], 65)


def test_commutant_of_diagonal_is_diagonal():
    c = commutant(SubAlgebra.diagonal(3))
    assert c.dim == 3
    assert spans_equal_residual(SubAlgebra(3, c.rows), SubAlgebra(3, SubAlgebra.diagonal(3).rows)) < 1e-12


def test_commutant_of_tensor_factor():
    c = commutant(SubAlgebra.scalar_tensor_full(2, 2))
    target = SubAlgebra.from_matrices([kron(m, identity(2)) for m in _units(2)], 4)
    assert spans_equal_residual(SubAlgebra(4, c.rows), target) < 1e-12


def test_commutant_of_normal_matrix_uses_eigenspaces():
    c = commutant(np.diag([1.0, 1.0, 2.0]))
    assert c.dim == 5


def test_commutant_of_generic_list_small_and_eigenframe(rng):
    for n in (4, 20):
        gens = [kron(random_unitary(n // 2, rng), identity(2)) for _ in range(2)]
        c = commutant(gens, rng=rng)
        assert c.dim == 4


def test_intersect_of_diagonal_and_block():
    d = SubAlgebra(4, SubAlgebra.diagonal(4).rows)
    block = SubAlgebra(4, SubAlgebra.diagonal_tensor_full(2, 2).rows)
    assert intersect(d, block).dim == 4
    assert intersect(d, SubAlgebra(4, SubAlgebra.scalar_tensor_full(2, 2).rows)).dim == 2


def test_wedderburn_of_basis_form_algebra(rng):
    u = random_unitary(6, rng)
    alg = SubAlgebra(6, SubAlgebra.from_structure(u, [2, 1], [2, 2]).rows)
    w = wedderburn(alg, rng)
    assert sorted(zip(w.block_sizes, w.multiplicities)) == [(1, 2), (2, 2)]
    for z in w.central_projections:
        assert max_abs(z @ z - z) < 1e-8


def test_inclusion_matrix_examples():
    incl = inclusion_matrix(SubAlgebra.scalars(4), SubAlgebra.diagonal(4))
    assert incl.entries.tolist() == [[1, 1, 1, 1]]
    assert squared_norm(incl) == pytest.approx(4.0)
    incl = inclusion_matrix(SubAlgebra.scalar_tensor_full(2, 2), SubAlgebra.full(4))
    assert incl.entries.tolist() == [[2]]
    assert incl.trace_residual() < 1e-12


def test_inclusion_matrix_rejects_non_inclusion():
    with pytest.raises(NotIncluded):
        inclusion_matrix(SubAlgebra.full(2), SubAlgebra.diagonal(2))


def _units(n):
    out = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n))
            e[i, j] = 1
            out.append(e)
    return out


def _random_subalgebra(seed):
    r = np.random.default_rng(seed)
    shapes = [([2, 1], [1, 2]), ([1, 1, 1], [1, 1, 2]), ([2], [2]), ([1, 2], [2, 1]), ([3], [1])]
    blocks, mults = shapes[seed % len(shapes)]
    n = sum(b * m for b, m in zip(blocks, mults))
    return SubAlgebra.from_structure(random_unitary(n, r), blocks, mults), r


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_conditional_expectation_axioms(seed):
    alg, r = _random_subalgebra(seed)
    n = alg.ambient_dim
    e = conditional_expectation(alg)
    res = e.axiom_residuals()
    assert max(res.values()) < 1e-10
    x = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    a, b = alg.random_element(r), alg.random_element(r)
    assert max_abs(e(a @ x @ b) - a @ e(x) @ b) < 1e-10
    assert abs(tr_norm(e(x)) - tr_norm(x)) < 1e-10
    assert max_abs(e(e(x)) - e(x)) < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_bicommutant_equals_algebra(seed):
    alg, r = _random_subalgebra(seed)
    basis_form = SubAlgebra(alg.ambient_dim, alg.rows)
    double = commutant(commutant(basis_form, rng=r), rng=r)
    assert spans_equal_residual(double, basis_form, r) < 1e-8
