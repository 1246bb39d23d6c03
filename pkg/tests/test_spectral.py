"""Seed-product spectra, inclusion matrices, index and four-by-four summaries."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinlab.algebra import squared_norm
from spinlab.errors import DimensionOverflow, RangeExceeded
from spinlab.hadamard import classify_phase_ratio, fourier, hadamard4, parse_angle
from spinlab.linalg import dagger, max_abs
from spinlab.spectral import (
    dihedral_angles,
    entropy_lower_bound_formula,
    entropy_table,
    four_by_four_summary,
    half_projection,
    half_swap,
    label_order,
    masa_relative_commutant_dim,
    measured_spectrum,
    odd_level_inclusion,
    phase_block,
    predicted_inclusion_and_index,
    predicted_multiplicities,
    relative_commutant_dim,
    seed_product_square,
)
from spinlab.towers import tower4


def _towers(a, b, levels):
    return tower4(parse_angle(a), levels), tower4(parse_angle(b), levels)


def test_fixed_matrices():
    p, w = half_projection(), half_swap()
    t = np.exp(0.7j)
    assert max_abs(p @ p - p) < 1e-15
    assert max_abs(w @ w - np.eye(4)) < 1e-15
    assert max_abs(w @ p @ w - np.diag([1, 1, 0, 0])) < 1e-15
    assert max_abs(w @ phase_block(t) @ w - np.diag([0, 0, 1, t])) < 1e-15
    assert max_abs(np.linalg.matrix_power(phase_block(t), 3) - phase_block(t**3)) < 1e-14


def test_seed_product_decomposition():
    first, second = _towers("0", "1/5", 0)
    t = complex(np.exp(1j * math.pi / 5))
    assert max_abs(dagger(first[0]) @ second[0] - half_projection() - phase_block(t)) < 1e-15


@pytest.mark.parametrize("k", [1, 2, 3])
def test_recursion_matches_tower(k):
    first, second = _towers("1/7", "2/3", 2 * k)
    assert seed_product_square(k, first, second).residual < 1e-9


def test_seed_square_level_limit():
    first, second = _towers("0", "1/5", 0)
    with pytest.raises(DimensionOverflow):
        seed_product_square(4, first, second)


def test_label_order():
    assert sorted([4, -2, 0, 2, -4], key=label_order) == [0, 2, -2, 4, -4]


def test_generic_predictions():
    cls = classify_phase_ratio("0", "irr:1.0")
    tables = [predicted_multiplicities(k, cls).multiplicities for k in range(4)]
    assert tables == [(3, 1), (10, 5, 1), (35, 21, 7, 1), (126, 84, 36, 9, 1)]
    with pytest.raises(RangeExceeded):
        predicted_multiplicities(7, cls)


@settings(max_examples=7, deadline=None)
@given(st.integers(0, 6))
def test_generic_totals_and_top_label(k):
    table = predicted_multiplicities(k, classify_phase_ratio("0", "irr:1.0"))
    assert table.total == 4 ** (k + 1)
    assert table.multiplicities[-1] == 1
    assert table.as_dict()[0] == math.comb(2 * k + 3, k + 1)


def test_even_root_predictions_and_range():
    four = classify_phase_ratio("0", "1/2")
    assert predicted_multiplicities(1, four).multiplicities == (10, 6)
    with pytest.raises(RangeExceeded):
        predicted_multiplicities(2, four)
    six = classify_phase_ratio("0", "1/3")
    assert predicted_multiplicities(2, six).multiplicities == (35, 21, 8)
    assert predicted_multiplicities(3, six).multiplicities == (126, 85, 45)


@pytest.mark.parametrize("b,k", [("1/5", 0), ("1/5", 1), ("1/5", 2), ("1/2", 1), ("1/3", 2), ("irr:1.0", 1)])
def test_measured_equals_predicted(b, k):
    first, second = _towers("0", b, 2 * k)
    cls = classify_phase_ratio("0", b)
    assert measured_spectrum(k, first, second).entries == predicted_multiplicities(k, cls).entries


def test_index_predictions():
    four = predicted_inclusion_and_index(classify_phase_ratio("0", "1/2"))
    assert four.label == "Finite(8)"
    assert four.drop_level == 1
    assert predicted_inclusion_and_index(classify_phase_ratio("0", "1/3")).label == "Finite(12)"
    generic = predicted_inclusion_and_index(classify_phase_ratio("0", "irr:1.0"))
    assert generic.label == "Infinite"
    assert generic.pp_sequence(4) == [Fraction(1, 4 * (k + 2)) for k in range(4)]


def test_odd_level_inclusion_generic(grid_four_generic):
    incl0 = odd_level_inclusion(grid_four_generic, 0)
    assert incl0.shape == (2, 4)
    assert np.all(incl0.entries == 1)
    assert squared_norm(incl0) == pytest.approx(8.0)


def test_relative_commutants(grid_two_by_two, grid_four_order_four, grid_four_generic):
    assert relative_commutant_dim(grid_two_by_two) == 2
    assert relative_commutant_dim(grid_four_order_four) == 1
    with pytest.raises(DimensionOverflow):
        relative_commutant_dim(grid_four_generic)
    assert masa_relative_commutant_dim(fourier(4).matrix) == 1


def test_dihedral_angles():
    assert dihedral_angles(4) == (math.pi / 2,)
    assert dihedral_angles(6) == pytest.approx((math.pi / 3,))
    assert dihedral_angles(8) == pytest.approx((math.pi / 4,))
    assert dihedral_angles(12) == pytest.approx((math.pi / 6, math.pi / 3))


def test_entropy_table_values():
    m = 6
    table = entropy_table(m)
    assert table["whole"]["meet"] == pytest.approx(math.log(2 * m))
    assert table["first"]["meet"] == pytest.approx(math.log(m) - math.log(2))
    assert table["join"]["meet"] == pytest.approx(math.log(m))
    assert table["whole"]["join"] == pytest.approx(math.log(2))


def test_four_by_four_summary_even_and_generic():
    even = four_by_four_summary(parse_angle("0"), parse_angle("1/3"))
    assert even.cos_interior == pytest.approx(0.25)
    assert even.cos_exterior == pytest.approx(1 / 3)
    assert even.entropy == (math.log(2), math.log(2))
    assert even.pp_constant == Fraction(1, 2)
    generic = four_by_four_summary(parse_angle("0"), parse_angle("irr:1.0"))
    lower, upper = generic.entropy
    assert 0 < lower <= upper == pytest.approx(math.log(2))
    assert generic.dihedral_angles is None
    assert lower == pytest.approx(entropy_lower_bound_formula(parse_angle("0"), parse_angle("irr:1.0")))


def test_summary_rejects_bad_parameters():
    from spinlab.errors import DegeneratePair, OutOfParameterRange

    with pytest.raises(OutOfParameterRange):
        four_by_four_summary(parse_angle("0"), parse_angle("3/2"))
    with pytest.raises(DegeneratePair):
        four_by_four_summary(parse_angle("0"), parse_angle("0"))
    assert hadamard4(parse_angle("0")).order == 4
