from fractions import Fraction

import pytest

from dsdomain.config import Settings
from dsdomain.errors import InterlacingPreconditionError, OracleBudgetError
from dsdomain.harness.interlacing import deviation, interlacing_check, interlacing_oracle


def test_deviation():
    assert deviation([Fraction(2), Fraction(1), Fraction(0)]) == 2


def test_strict_case():
    result = interlacing_check([2, 1, 0], ["3/2", "1/2"], 1)
    assert result.holds
    assert result.lhs == 2
    assert result.rhs == Fraction(1, 2)


def test_equality_case():
    result = interlacing_check([1, 0, -1], [1, -1], 1)
    assert result.holds
    assert result.lhs == result.rhs == 2


def test_float_inputs():
    result = interlacing_check([2.0, 1.0, 0.0], [1.5, 0.5], 1)
    assert result.holds
    assert result.lhs == pytest.approx(2.0)
    assert result.rhs == pytest.approx(0.5)


@pytest.mark.parametrize("a, b, k", [
    ([2, 1, 0], [1, 0], 0),
    ([2, 1, 0], [1], 1),
    ([2, 1, 0], [0, 1], 1),
    ([0, 1, 2], [1, 0], 1),
    ([2, 1, 0], [3, 0], 1),
])
def test_preconditions(a, b, k):
    with pytest.raises(InterlacingPreconditionError):
        interlacing_check(a, b, k)


def test_oracle_bound():
    best = interlacing_oracle([3, 2, 1, 0], 1)
    assert best == Fraction(14, 3)
    assert best <= deviation([Fraction(x) for x in (3, 2, 1, 0)])


def test_oracle_gap_two():
    a = [3, 2, 1, 0]
    best = interlacing_oracle(a, 2)
    assert best <= deviation([Fraction(x) for x in a])


def test_oracle_budget():
    with pytest.raises(OracleBudgetError):
        interlacing_oracle([4, 3, 2, 1, 0], 3)
    with pytest.raises(OracleBudgetError):
        interlacing_oracle([3, 2, 1, 0], 1, Settings(oracle_max_n=3))
