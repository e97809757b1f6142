import math
from fractions import Fraction

import numpy as np
import pytest

from dsdomain.core.busemann import (
    BusemannKind,
    BusemannSpec,
    HoroballSpec,
    LimitTag,
    asymptotic_limit,
    busemann0,
    busemann_value,
    classical_busemann_vertex,
    contact_along_path,
    decomposition_residual,
    equivariance_holds,
    horoball_contains,
    limit_column,
    lipschitz_margin,
    selberg,
)
from dsdomain.core.matcore import Isometry, SpacePoint
from dsdomain.core.sampling import random_space_point
from dsdomain.core.satake import BoundaryComponent, SatakePoint
from dsdomain.errors import BusemannPreconditionError
from dsdomain.harness.slices import slice_point

F = Fraction
I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
E1 = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
PLANE = BoundaryComponent.coordinate(3, [0, 1])


def diag(*values):
    n = len(values)
    return [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]


def type0():
    return BusemannSpec(kind=BusemannKind.TYPE0, alpha=E1, reference=SpacePoint(I3))


def type1():
    return BusemannSpec(kind=BusemannKind.TYPEK, alpha=E1, component=PLANE, reference=SpacePoint(I3))


def test_selberg_invariant():
    X = SpacePoint(I3)
    Y = SpacePoint(diag(2, 1, F(1, 2)))
    assert selberg(X, X) == 3
    assert selberg(X, Y) == F(7, 2)


def test_type0_exact_value():
    assert busemann0(type0(), SpacePoint(diag(2, 1, F(1, 2)))) == F(1, 2)


def test_values_on_the_diagonal_slice():
    for s, t in [(0.5, -0.25), (-1.0, 2.0)]:
        Y = slice_point(s, t)
        assert float(busemann_value(type0(), Y)) == pytest.approx(math.exp(-s))
        assert busemann_value(type1(), Y) == pytest.approx(math.exp((t - s) / 2))


def test_spec_preconditions():
    with pytest.raises(BusemannPreconditionError):
        BusemannSpec(kind=BusemannKind.TYPE0, alpha=E1, component=PLANE, reference=SpacePoint(I3))
    with pytest.raises(BusemannPreconditionError):
        BusemannSpec(kind=BusemannKind.TYPEK, alpha=diag(0, 0, 1), component=PLANE, reference=SpacePoint(I3))
    with pytest.raises(BusemannPreconditionError):
        BusemannSpec(kind=BusemannKind.TYPE0, alpha=I3, reference=SpacePoint(I3))
    with pytest.raises(BusemannPreconditionError):
        BusemannSpec(kind=BusemannKind.TYPEK, alpha=diag(1, 1, 0), component=PLANE, reference=SpacePoint(I3))
    assert type1().k == 1 and type1().m == 2


def test_horoball_membership():
    Y = SpacePoint(diag(2, 1, F(1, 2)))
    assert horoball_contains(HoroballSpec(busemann=type0(), level=1), Y)
    assert not horoball_contains(HoroballSpec(busemann=type0(), level="1/4"), Y)
    assert horoball_contains(HoroballSpec(busemann=type0(), level="1/2"), Y)
    assert not horoball_contains(HoroballSpec(busemann=type0(), level="1/2", closed=False), Y)


def test_classical_vertex_function():
    Y = SpacePoint(diag(2, 1, F(1, 2)))
    line = BoundaryComponent.coordinate(3, [0])
    value = classical_busemann_vertex(line, SpacePoint(I3), Y)
    assert value == pytest.approx(math.sqrt(1.5) * math.log(0.5))


def test_decomposition_into_classical_functions():
    Y = SpacePoint(diag(2, 1, F(1, 2)))
    assert decomposition_residual(type1(), Y) == pytest.approx(0.0, abs=1e-12)
    assert decomposition_residual(type0(), Y) == pytest.approx(0.0, abs=1e-12)


def test_type0_decomposition_on_random_points():
    rng = np.random.default_rng(11)
    line = BoundaryComponent.coordinate(3, [0])
    for _ in range(10):
        Y = random_space_point(rng, 3)
        expected = math.sqrt(2 / 3) * classical_busemann_vertex(line, SpacePoint(I3), Y)
        assert math.log(float(busemann_value(type0(), Y))) == pytest.approx(expected, abs=1e-10)
        assert decomposition_residual(type0(), Y) == pytest.approx(0.0, abs=1e-10)


def test_lipschitz_bound():
    rng = np.random.default_rng(3)
    for spec in (type0(), type1()):
        for _ in range(10):
            y1 = random_space_point(rng, 3, exact=False)
            y2 = random_space_point(rng, 3, exact=False)
            assert lipschitz_margin(spec, y1, y2) >= -1e-9


def test_equivariance():
    rotation = Isometry([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
    Y = SpacePoint(diag(2, 1, F(1, 2)))
    assert equivariance_holds(type0(), rotation, Y) is True
    stretch = Isometry(diag(2, F(1, 2), 1))
    assert equivariance_holds(type0(), stretch, Y) is None


def test_limit_columns():
    spec = type1()
    assert limit_column(spec, SatakePoint.of(diag(1, 0, 1))) == 1
    assert limit_column(spec, SatakePoint.of(diag(1, 1, 0))) == 2
    assert limit_column(spec, SatakePoint.of(diag(0, 0, 1))) == 3
    assert limit_column(spec, SatakePoint.of(diag(0, 1, 0))) == 4


def test_asymptotic_limits():
    spec = type1()
    Y = SpacePoint(I3)
    zero = asymptotic_limit(spec, SatakePoint.of(diag(1, 0, 1)), Y)
    assert zero.tag == LimitTag.ZERO and zero.consistent
    finite = asymptotic_limit(spec, SatakePoint.of(diag(1, 1, 0)), Y)
    assert finite.tag == LimitTag.FINITE and finite.value == pytest.approx(1.0)
    assert finite.consistent
    crossing = asymptotic_limit(spec, SatakePoint.of(diag(0, 0, 1)), Y)
    assert crossing.column == 3 and crossing.value == pytest.approx(1.0)
    infinite = asymptotic_limit(spec, SatakePoint.of(diag(0, 1, 0)), Y)
    assert infinite.tag == LimitTag.INFINITY and infinite.consistent
    with pytest.raises(BusemannPreconditionError):
        asymptotic_limit(type0(), SatakePoint.of(diag(1, 1, 0)), Y)


def test_contact_along_path():
    Y = SpacePoint(I3)
    inside = contact_along_path(HoroballSpec(busemann=type1(), level=2), SatakePoint.of(diag(1, 1, 0)), Y)
    assert all(flag for _, _, flag in inside)
    outside = contact_along_path(HoroballSpec(busemann=type1(), level=10), SatakePoint.of(diag(0, 1, 0)), Y)
    assert not any(flag for _, _, flag in outside)
    assert outside[-1][1] > outside[0][1]
