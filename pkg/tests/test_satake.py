from fractions import Fraction

import numpy as np
import pytest

from dsdomain.core.matcore import Isometry
from dsdomain.core.satake import (
    BoundaryComponent,
    Placement,
    SatakePoint,
    classify,
    component_leq,
    component_of,
    image_component,
    intersection_dim,
    project,
)
from dsdomain.errors import BoundaryPointError, MatrixLiteralError, ProjectionDomainError, ZeroMatrixError


def diag(*values):
    n = len(values)
    return [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]


def test_classify():
    assert classify(diag(1, 1, 1)).tag == Placement.INTERIOR
    boundary = classify(diag(1, 0, 0))
    assert boundary.tag == Placement.BOUNDARY and boundary.k == 1
    assert str(boundary) == "BoundaryType(1)"
    assert classify(diag(1, -1, 0)).tag == Placement.OUTSIDE
    with pytest.raises(ZeroMatrixError):
        classify(diag(0, 0, 0))


def test_satake_point_trace_one():
    alpha = SatakePoint.of(diag(1, 1, 0))
    assert alpha.array[0, 0] == Fraction(1, 2)
    assert alpha.rank == 2 and alpha.is_boundary()
    with pytest.raises(MatrixLiteralError):
        SatakePoint(diag(1, 1, 0))


def test_component_of():
    assert component_of(SatakePoint.of(diag(1, 1, 0))).dim == 2
    with pytest.raises(BoundaryPointError):
        component_of(SatakePoint.of(diag(1, 1, 1)))


def test_component_order_and_intersection():
    line = BoundaryComponent.coordinate(3, [0])
    plane = BoundaryComponent.coordinate(3, [0, 1])
    other = BoundaryComponent.coordinate(3, [1, 2])
    assert component_leq(line, plane)
    assert not component_leq(plane, line)
    assert intersection_dim(plane, other) == 1
    assert intersection_dim(line, other) == 0


def test_project_to_component():
    plane = BoundaryComponent.coordinate(3, [0, 1])
    point = project(plane, diag(2, 3, Fraction(1, 6)))
    block = point.to_float()
    assert np.linalg.det(block) == pytest.approx(1.0)
    assert block[1, 1] / block[0, 0] == pytest.approx(1.5)
    with pytest.raises(ProjectionDomainError):
        project(plane, diag(0, 0, 1))


def test_project_keeps_exact_entries():
    plane = BoundaryComponent.coordinate(3, [0, 1])
    point = project(plane, diag(2, 8, Fraction(1, 16)))
    assert point.exact
    assert point.array[0, 0] == Fraction(1, 2) and point.array[1, 1] == 2
    assert point.array[0, 1] == 0
    with pytest.raises(ProjectionDomainError):
        project(plane, diag(1, 0, 1))
    slanted = BoundaryComponent(span=[[1, 1, 0], [0, 0, 1]])
    assert not project(slanted, diag(2, 8, Fraction(1, 16))).exact


def test_image_component():
    g = Isometry([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    line = BoundaryComponent.coordinate(3, [0])
    image = image_component(g, line)
    assert image == BoundaryComponent(span=[[1, 1, 0]])
    assert component_of(SatakePoint.of(np.outer(image.basis[:, 0], image.basis[:, 0]))) == image
