"""Dense linear algebra conventions."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinlab.errors import ClusterAmbiguity, NotNormal
from spinlab.hadamard import hadamard2, hadamard4, parse_angle
from spinlab.linalg import (
    block_diag,
    dagger,
    eig_normal,
    hs_inner,
    identity,
    kron,
    matrix_unit,
    max_abs,
    nullspace_basis,
    orthonormalize_hs,
    pauli_x,
    pauli_z,
    random_unitary,
    swap_operator,
    tr_norm,
    unvec,
    vec,
)


def test_kron_identity():
    assert np.array_equal(kron(identity(2), identity(2)), identity(4))


def test_kron_matrix_units_index_rule():
    out = kron(matrix_unit(0, 0, 2), matrix_unit(1, 1, 2))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    assert np.array_equal(out, expected)


def test_kron_flip_term_in_two_by_two_product():
    angle_one, angle_two = parse_angle("1/7"), parse_angle("3/5")
    u, v = hadamard2(angle_one).matrix, hadamard2(angle_two).matrix
    w = (angle_two - angle_one).unit()
    # level-one product of the two-by-two towers, written with kron
    from spinlab.towers import tower2

    x = dagger(tower2(hadamard2(angle_one), 2)[2]) @ tower2(hadamard2(angle_two), 2)[2]
    target = 0.5 * (1 + w) * identity(4) + 0.5 * (1 - w) * kron(pauli_x(), pauli_x())
    assert max_abs(x - target) < 1e-12
    assert u.shape == v.shape


def test_kron_mixed_product(rng):
    a, b, c, d = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)) for _ in range(4))
    assert max_abs(kron(a, b) @ kron(c, d) - kron(a @ c, b @ d)) < 1e-12
    assert max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) < 1e-12


def test_trace_and_inner_product_are_normalized(rng):
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    y = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert tr_norm(identity(5)) == pytest.approx(1.0)
    assert hs_inner(x, y) == pytest.approx(tr_norm(dagger(y) @ x))
    assert np.vdot(vec(y), vec(x)) == pytest.approx(hs_inner(x, y))
    assert max_abs(unvec(vec(x), 3) - x) < 1e-14


def test_swap_operator_exchanges_factors(rng):
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3))
    s = swap_operator(2, 3)
    assert max_abs(s @ kron(a, b) @ dagger(s) - kron(b, a)) < 1e-14


def test_eig_normal_pauli_z():
    spectrum = eig_normal(pauli_z())
    assert [round(e.real) for e in spectrum.eigenvalues] == [-1, 1]
    assert spectrum.multiplicities == (1, 1)


def test_eig_normal_four_by_four_square_in_hadamard_frame():
    from spinlab.spectral import half_swap

    a, b = parse_angle("0"), parse_angle("1/5")
    x = dagger(hadamard4(a).matrix) @ hadamard4(b).matrix
    w = half_swap()
    y = w @ x @ x @ w
    phase = (b - a).unit() ** 2
    assert max_abs(y - np.diag([1, 1, 1, phase])) < 1e-12
    spectrum = eig_normal(x @ x)
    assert sorted(spectrum.multiplicities) == [1, 3]


def test_eig_normal_level_one_square_multiplicities():
    from spinlab.towers import tower4

    t1, t2 = tower4(parse_angle("0"), 2), tower4(parse_angle("1/5"), 2)
    x = dagger(t1[2]) @ t2[2]
    assert sorted(eig_normal(x @ x).multiplicities) == [1, 5, 10]


def test_eig_normal_rejects_non_normal():
    with pytest.raises(NotNormal):
        eig_normal(np.array([[0, 1], [0, 0]]))


def test_eig_normal_cluster_ambiguity():
    with pytest.raises(ClusterAmbiguity):
        eig_normal(np.diag([0.0, 1.5e-7]), cluster_tol=1e-7)


def test_eig_normal_projectors_partition_identity(rng):
    u = random_unitary(6, rng)
    d = np.diag([1, 1, 1j, 1j, -1, 2j])
    spectrum = eig_normal(u @ d @ dagger(u))
    assert sorted(spectrum.multiplicities) == [1, 1, 2, 2]
    assert spectrum.dimension == 6
    assert max_abs(sum(spectrum.projectors) - identity(6)) < 1e-8
    for p in spectrum.projectors:
        assert max_abs(p @ p - p) < 1e-8
        assert round(tr_norm(p).real * 6) == np.linalg.matrix_rank(p, tol=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**31 - 1))
def test_eig_normal_reconstructs_random_unitaries(n, seed):
    u = random_unitary(n, np.random.default_rng(seed))
    assert max_abs(eig_normal(u).reconstruct() - u) <= 1e-7


def test_nullspace_basis_trivial_cases():
    assert nullspace_basis(np.zeros((3, 3))).shape[1] == 3
    assert nullspace_basis(identity(3)).shape[1] == 0


def test_nullspace_of_commutator_with_pauli_z():
    z = pauli_z()
    op = np.kron(identity(2), z.T) - np.kron(z, identity(2))
    basis = nullspace_basis(op)
    assert basis.shape[1] == 2
    for col in basis.T:
        x = col.reshape(2, 2)
        assert max_abs(x - np.diag(np.diag(x))) < 1e-12


def test_orthonormalize_hs_examples():
    out = orthonormalize_hs([matrix_unit(0, 0, 2), matrix_unit(1, 1, 2)])
    assert len(out) == 2
    assert max_abs(out[0] - np.sqrt(2) * matrix_unit(0, 0, 2)) < 1e-14
    assert max_abs(out[1] - np.sqrt(2) * matrix_unit(1, 1, 2)) < 1e-14
    assert len(orthonormalize_hs([identity(2), identity(2)])) == 1
    assert len(orthonormalize_hs([identity(2), pauli_x(), pauli_x() + identity(2)])) == 2


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_orthonormalize_hs_gram_is_identity(n, count, seed):
    r = np.random.default_rng(seed)
    mats = [r.standard_normal((n, n)) + 1j * r.standard_normal((n, n)) for _ in range(count)]
    out = orthonormalize_hs(mats)
    gram = np.array([[hs_inner(a, b) for b in out] for a in out])
    assert len(out) == min(count, n * n)
    assert max_abs(gram - np.eye(len(out))) <= 1e-10


def test_block_diag_shape():
    assert block_diag(identity(2), identity(3)).shape == (5, 5)
