import csv
import io
import math

import numpy as np
import pytest

from dsdomain.core.busemann import BusemannKind, BusemannSpec
from dsdomain.core.matcore import SpacePoint, identity
from dsdomain.core.satake import SatakePoint
from dsdomain.errors import GridConfigError
from dsdomain.harness.slices import SliceGrid, emit_slice, slice_point

E1 = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]


def type0(n=3, alpha=E1):
    return BusemannSpec(kind=BusemannKind.TYPE0, alpha=SatakePoint.of(alpha), reference=SpacePoint(identity(n)))


@pytest.mark.parametrize("kwargs", [
    {"s_range": (1.0, 0.0)},
    {"t_range": (0.0, float("inf"))},
    {"resolution": (1, 5)},
])
def test_bad_grid(kwargs):
    with pytest.raises(GridConfigError):
        SliceGrid(**kwargs)


def test_bad_levels_and_dimension():
    grid = SliceGrid(resolution=(2, 2))
    with pytest.raises(GridConfigError):
        emit_slice(type0(), [0.0], grid, io.StringIO())
    with pytest.raises(GridConfigError):
        emit_slice(type0(2, [[1, 0], [0, 0]]), [1.0], grid, io.StringIO())


def test_slice_point_has_unit_determinant():
    X = slice_point(0.3, -1.2)
    assert np.linalg.det(X.to_float()) == pytest.approx(1.0)


def test_emit_type0_slice():
    out = io.StringIO()
    grid = SliceGrid(s_range=(-1.0, 1.0), t_range=(-1.0, 1.0), resolution=(3, 3))
    rows = emit_slice(type0(), [1.0], grid, out)
    assert rows == 9
    table = list(csv.reader(io.StringIO(out.getvalue())))
    assert table[0] == ["s", "t", "value", "in_1"]
    assert len(table) == 10
    for s, t, value, inside in table[1:]:
        assert float(value) == pytest.approx(math.exp(-float(s)), rel=1e-9)
        assert int(inside) == int(float(value) <= 1.0)
