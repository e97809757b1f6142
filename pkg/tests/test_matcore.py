import math
from fractions import Fraction

import numpy as np
import pytest

from dsdomain.core.matcore import (
    Isometry,
    IsometryWord,
    SpacePoint,
    SymMatrix,
    act,
    bareiss_det,
    exact_inverse,
    exact_root,
    geodesic_distance,
    parse_scalar,
    primitive_integer,
    psd_rank,
    radical_inverse,
    solve_exact,
    spectrum,
)
from dsdomain.errors import DeterminantError, MatrixLiteralError, NotPositiveDefiniteError, SingularMatrixError

F = Fraction


def test_parse_scalar():
    assert parse_scalar("3/4") == F(3, 4)
    assert parse_scalar(2) == F(2)
    assert isinstance(parse_scalar(0.5), float)
    with pytest.raises(MatrixLiteralError):
        parse_scalar(True)
    with pytest.raises(MatrixLiteralError):
        parse_scalar("one half")


def test_symmetric_matrix_rejects_asymmetry():
    with pytest.raises(MatrixLiteralError):
        SymMatrix([[1, 2], [3, 1]])


def test_space_point_checks():
    SpacePoint([["2", 0], [0, "1/2"]])
    with pytest.raises(DeterminantError):
        SpacePoint([[2, 0], [0, 1]])
    with pytest.raises(NotPositiveDefiniteError):
        SpacePoint([[1, 2], [2, 1]])


def test_normalize_exact_when_root_is_rational():
    X = SpacePoint.normalize(SymMatrix([[2, 0], [0, 2]]))
    assert X.exact
    assert X.matrix == SymMatrix([[1, 0], [0, 1]])


def test_isometry_determinant():
    with pytest.raises(DeterminantError):
        Isometry([[2, 0], [0, 1]])


def test_action_is_congruence():
    g = Isometry([[1, 1], [0, 1]])
    X = SpacePoint([[1, 0], [0, 1]])
    assert act(g, X).matrix == SymMatrix([[1, 1], [1, 2]])


def test_word_product_left_to_right():
    a = Isometry([[1, 1], [0, 1]])
    b = Isometry([[1, 0], [1, 1]])
    w = IsometryWord(letters=[a, b], names=["a", "b"])
    assert w.product() == a @ b
    assert (w.product() @ w.inverse().product()).is_identity()
    assert w.inverse().names == ["b^-1", "a^-1"]
    assert len(w.power(3)) == 6


def test_geodesic_distance():
    X = SpacePoint([[1, 0], [0, 1]])
    Y = SpacePoint([["2", 0], [0, "1/2"]])
    assert geodesic_distance(X, Y) == pytest.approx(math.sqrt(2) * math.log(2))
    assert geodesic_distance(Y, X) == pytest.approx(geodesic_distance(X, Y))
    assert geodesic_distance(X, X) == pytest.approx(0.0, abs=1e-12)


def test_spectrum_descending():
    assert spectrum([[3, 0, 0], [0, 1, 0], [0, 0, 2]]) == pytest.approx([3, 2, 1])


def test_exact_kernels():
    a = np.array([[F(2), F(1)], [F(1), F(1)]], dtype=object)
    assert bareiss_det(a) == 1
    assert exact_inverse(a).tolist() == [[1, -1], [-1, 2]]
    assert solve_exact(a, np.array([F(3), F(2)], dtype=object)).tolist() == [1, 1]
    with pytest.raises(SingularMatrixError):
        exact_inverse(np.array([[F(1), F(1)], [F(1), F(1)]], dtype=object))


def test_psd_rank():
    assert psd_rank(np.array([[F(1), F(1)], [F(1), F(1)]], dtype=object)) == 1
    assert psd_rank(np.array([[F(0), F(1)], [F(1), F(0)]], dtype=object)) is None
    assert psd_rank(np.array([[F(2), F(0)], [F(0), F(3)]], dtype=object)) == 2


def test_exact_root():
    assert exact_root(F(8, 27), 3) == F(2, 3)
    assert exact_root(F(2), 2) is None


def test_exact_root_of_huge_values():
    big = 3 ** 2000
    assert exact_root(F(big, 7 ** 500), 4) == F(3 ** 500, 7 ** 125)
    assert exact_root(F(big + 1), 2) is None
    assert exact_root(F(1, 10 ** 400), 2) == F(1, 10 ** 200)


def test_radical_inverse_and_primitive_integer():
    assert radical_inverse(1, 2) == F(1, 2)
    assert radical_inverse(3, 2) == F(3, 4)
    assert radical_inverse(1, 3) == F(1, 3)
    assert primitive_integer(np.array([F(1, 2), F(1, 3)], dtype=object)).tolist() == [3, 2]
