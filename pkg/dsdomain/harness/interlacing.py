import logging
from fractions import Fraction
from itertools import product
from typing import Any, List, Sequence

from pydantic import BaseModel, ConfigDict

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.core.matcore import Scalar, parse_scalar
from dsdomain.errors import InterlacingPreconditionError, OracleBudgetError

logger = logging.getLogger(__name__)


class InterlacingResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    holds: bool
    lhs: Scalar
    rhs: Scalar


def deviation(values: Sequence[Scalar]) -> Scalar:
    """Sum of squared deviations from the mean"""
    mean = sum(values, Fraction(0)) / len(values)
    return sum(((v - mean) ** 2 for v in values), Fraction(0))


def _scalars(values: Sequence[Any]) -> List[Scalar]:
    return [parse_scalar(v) for v in values]


def interlacing_check(a: Sequence[Any], b: Sequence[Any], k: int, tolerance: float = 1e-12) -> InterlacingResult:
    """sum (a_i - mean a)^2 >= sum (b_i - mean b)^2 for b interlacing a with gap k"""
    a, b = _scalars(a), _scalars(b)
    if k < 1 or len(b) != len(a) - k or not b:
        raise InterlacingPreconditionError(f"need 1 <= k < len(a) and len(b) = len(a) - k, got k={k}")
    if any(x < y for x, y in zip(a, a[1:])) or any(x < y for x, y in zip(b, b[1:])):
        raise InterlacingPreconditionError("sequences must be descending")
    for i, bi in enumerate(b):
        if not a[i + k] <= bi <= a[i]:
            raise InterlacingPreconditionError(f"b[{i}] = {bi} outside [a[{i + k}], a[{i}]]")
    lhs, rhs = deviation(a), deviation(b)
    exact = isinstance(lhs, Fraction) and isinstance(rhs, Fraction)
    holds = lhs >= rhs if exact else lhs >= rhs - tolerance * max(1.0, abs(lhs))
    return InterlacingResult(holds=holds, lhs=lhs, rhs=rhs)


def deletions(a: Sequence[Scalar]) -> List[List[Scalar]]:
    return [list(a[:j]) + list(a[j + 1:]) for j in range(len(a))]


def interlacing_oracle(a: Sequence[Any], k: int, settings: Settings = DEFAULT_SETTINGS) -> Scalar:
    """Maximum deviation of b over the corners b_i in {a_i, a_{i+k}} (and the deletions when k = 1)"""
    a = _scalars(a)
    n = len(a)
    if not 1 <= k <= 2 or k >= n:
        raise OracleBudgetError(f"oracle covers k in {{1, 2}} with k < n, got k={k}, n={n}")
    if n > settings.oracle_max_n:
        raise OracleBudgetError(f"n={n} exceeds the oracle budget of {settings.oracle_max_n}")
    candidates = [
        [a[i + k] if bit else a[i] for i, bit in enumerate(bits)]
        for bits in product((0, 1), repeat=n - k)
    ]
    if k == 1:
        candidates += deletions(a)
    return max(deviation(b) for b in candidates)
