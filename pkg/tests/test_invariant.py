"""Polarized coefficients, determinant-power polarization and the invariant."""

from __future__ import annotations

from fractions import Fraction
from random import Random

import pytest

from helpers import random_hompoly, random_sl_matrix
from detorbit.errors import BudgetExceeded
from detorbit.invariant import (
    HomPoly,
    det_power_invariant,
    elementary_matrix_expansion,
    exact_det,
    polarized_coefficient,
    polarized_det_power,
    power_sum_invariant_check,
)


def _mat(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


E11 = _mat([[1, 0], [0, 0]])
E12 = _mat([[0, 1], [0, 0]])
E21 = _mat([[0, 0], [1, 0]])
E22 = _mat([[0, 0], [0, 1]])
I2 = _mat([[1, 0], [0, 1]])


def test_hompoly_validation_and_json():
    f = HomPoly.from_terms(2, 3, [((2, 1), Fraction(1, 2)), ((0, 3), -1)])
    obj = f.to_json_dict()
    assert HomPoly.from_json_dict(obj) == f
    with pytest.raises(ValueError):
        HomPoly(2, 3, {(1, 1): Fraction(1)})  # degree mismatch
    assert HomPoly.from_terms(2, 2, [((1, 1), 1), ((1, 1), -1)]).is_zero()


def test_polarized_coefficient_examples():
    f = HomPoly.from_terms(2, 2, [((1, 1), 1)])
    assert polarized_coefficient(f, (1, 2)) == Fraction(1, 2)
    g = HomPoly.from_terms(1, 2, [((2,), 1)])
    assert polarized_coefficient(g, (1, 1)) == 1
    zero = HomPoly(2, 2, {})
    assert polarized_coefficient(zero, (1, 2)) == 0
    with pytest.raises(ValueError, match="symbol out of range"):
        polarized_coefficient(f, (1, 3))


def test_elementary_matrix_expansion_examples():
    f = HomPoly.from_terms(2, 2, [((1, 1), 1)])
    terms = elementary_matrix_expansion(f)
    assert sorted((t.coefficient, t.matrices) for t in terms) == sorted(
        [(Fraction(1, 2), (E12,)), (Fraction(1, 2), (E21,))]
    )
    g = HomPoly.from_terms(1, 2, [((2,), 1)])
    (term,) = elementary_matrix_expansion(g)
    assert term.coefficient == 1
    assert term.matrices == (_mat([[1]]),)
    with pytest.raises(ValueError, match="even degree"):
        elementary_matrix_expansion(HomPoly.from_terms(1, 3, [((3,), 1)]))


def test_expansion_term_count_bound():
    rng = Random(5)
    f = random_hompoly(2, 4, rng)
    assert len(elementary_matrix_expansion(f)) <= 2**4


def test_exact_det():
    assert exact_det(_mat([[1, 2], [3, 4]])) == -2
    assert exact_det(_mat([[0, 1], [1, 0]])) == -1
    assert exact_det(_mat([[Fraction(1, 2), 0], [0, Fraction(1, 3)]])) == Fraction(1, 6)
    assert exact_det(_mat([[1, 2, 3], [4, 5, 6], [7, 8, 9]])) == 0
    rng = Random(11)
    for n in (1, 2, 3, 4, 5):
        for trial in range(20):
            rows = [
                [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
                for _ in range(n)
            ]
            if trial % 3 == 0:
                # Force pivot swaps and rank deficiencies.
                rows[0][0] = Fraction(0)
                if trial % 6 == 0 and n >= 2:
                    rows[1] = list(rows[0])
            assert exact_det(rows) == _det_cofactor(rows)


def _det_cofactor(rows):
    n = len(rows)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = Fraction(rows[0][j]) * _det_cofactor(minor)
        total += term if j % 2 == 0 else -term
    return total


def test_polarized_det_power_examples():
    assert polarized_det_power(2, 1, [I2, I2]) == 1
    assert polarized_det_power(2, 1, [E11, E22]) == Fraction(1, 2)
    X = _mat([[0, Fraction(1, 2)], [Fraction(1, 2), 0]])
    assert polarized_det_power(2, 1, [X, X]) == Fraction(-1, 4)
    with pytest.raises(ValueError, match="expected 2 matrices"):
        polarized_det_power(2, 1, [I2])


def test_polarized_det_power_recovers_det_power_at_equal_args():
    rng = Random(3)
    for size, power in [(2, 1), (2, 2), (3, 1)]:
        mat = _mat(
            [[rng.randint(-3, 3) for _ in range(size)] for _ in range(size)]
        )
        value = polarized_det_power(size, power, [mat] * (size * power))
        assert value == exact_det(mat) ** power


def test_polarized_det_power_symmetry_and_multilinearity():
    rng = Random(7)
    mats = [
        _mat([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)])
        for _ in range(4)
    ]
    base = polarized_det_power(2, 2, mats)
    for _ in range(5):
        perm = list(range(4))
        rng.shuffle(perm)
        assert polarized_det_power(2, 2, [mats[j] for j in perm]) == base
    # Additivity and scaling in slot 0.
    other = _mat([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)])
    summed = tuple(
        tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(mats[0], other)
    )
    lhs = polarized_det_power(2, 2, [summed] + mats[1:])
    rhs = base + polarized_det_power(2, 2, [other] + mats[1:])
    assert lhs == rhs
    scaled = tuple(tuple(3 * a for a in row) for row in mats[0])
    assert polarized_det_power(2, 2, [scaled] + mats[1:]) == 3 * base


def test_invariant_values_small():
    f = HomPoly.from_terms(2, 2, [((1, 1), 1)])
    assert det_power_invariant(2, 2, f) == Fraction(-1, 4)
    assert det_power_invariant(2, 2, HomPoly.from_terms(2, 2, [((2, 0), 1)])) == 0
    assert det_power_invariant(2, 1, HomPoly.from_terms(1, 2, [((2,), 1)])) == 1
    with pytest.raises(ValueError):
        det_power_invariant(3, 1, HomPoly.from_terms(1, 3, [((3,), 1)]))
    with pytest.raises(ValueError):
        det_power_invariant(2, 3, f)  # i exceeds the variable count


def test_invariant_restricts_extra_variables():
    # Evaluation at i below the variable count sets the tail variables to 0.
    f = HomPoly.from_terms(3, 2, [((1, 1, 0), 1), ((0, 0, 2), 5)])
    assert det_power_invariant(2, 2, f) == Fraction(-1, 4)
    assert det_power_invariant(2, 1, f) == 0
    g = HomPoly.from_terms(2, 2, [((2, 0), 1), ((0, 2), 3)])
    assert det_power_invariant(2, 1, g) == 1


@pytest.mark.parametrize(
    "m,i,expected",
    [
        (2, 1, Fraction(1)),
        (2, 2, Fraction(1)),
        (4, 2, Fraction(1, 3)),
    ],
)
def test_power_sum_closed_form_values(m, i, expected):
    computed, closed = power_sum_invariant_check(m, i)
    assert computed == closed == expected


def test_budget_guard():
    f = HomPoly.power_sum(6, 6)
    with pytest.raises(BudgetExceeded):
        det_power_invariant(6, 6, f, budget=10)


def test_binary_quartic_classical_invariant_oracle():
    """Degree-2 invariant of binary quartics: the invariant ring route.

    For f = sum a_{jk} x^j y^k of degree 4 the unique degree-2 invariant is
    a40*a04 - a31*a13/4 + a22^2/12 (up to scale); the polarized route must be
    a constant multiple, pinned here as 1/3 by the power-sum value.
    """
    rng = Random(2024)

    def classical(f: HomPoly) -> Fraction:
        a = {exp: f.coefficient(exp) for exp in [(4, 0), (3, 1), (2, 2), (1, 3), (0, 4)]}
        return (
            a[(4, 0)] * a[(0, 4)]
            - a[(3, 1)] * a[(1, 3)] / 4
            + a[(2, 2)] ** 2 / 12
        )

    for _ in range(12):
        f = random_hompoly(2, 4, rng)
        assert det_power_invariant(4, 2, f) == classical(f) / 3


def test_sl_invariance_and_homogeneity_samples():
    rng = Random(99)
    for m, i in [(2, 2), (4, 2)]:
        for _ in range(5):
            f = random_hompoly(i, m, rng)
            g = random_sl_matrix(i, rng)
            assert det_power_invariant(m, i, f.compose_linear(g)) == det_power_invariant(m, i, f)
            c = Fraction(rng.randint(1, 5), rng.randint(1, 3))
            assert det_power_invariant(m, i, f.scale(c)) == c**i * det_power_invariant(m, i, f)


def test_compose_linear_identity_and_errors():
    f = HomPoly.from_terms(2, 2, [((1, 1), 1), ((2, 0), 2)])
    eye = [[1, 0], [0, 1]]
    assert f.compose_linear(eye) == f
    with pytest.raises(ValueError):
        f.compose_linear([[1, 0]])
