from fractions import Fraction

import numpy as np
import pytest

from dsdomain.core.matcore import Isometry, SpacePoint, SymMatrix
from dsdomain.errors import DegeneratePolytopeError, MatrixLiteralError, StabilizedCenterError
from dsdomain.polyhedra.cone import extreme_rays, pairing_row, sym_coords
from dsdomain.polyhedra.polytope import (
    HalfSpaceSpec,
    HyperplaneNormal,
    ProjPolytope,
    bisector_normal,
    face_image,
    face_poset,
    finite_volume,
    satake_components,
    satake_faces,
)


I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


@pytest.fixture(scope="module")
def simplex(corpus):
    return ProjPolytope.from_vertices(corpus.vertices)


def test_pairing_row_is_the_trace_pairing():
    a = np.array([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(3)]], dtype=object)
    y = np.array([[Fraction(5), Fraction(7)], [Fraction(7), Fraction(11)]], dtype=object)
    assert pairing_row(a).dot(sym_coords(y)) == (a.dot(y)).trace()


def test_extreme_rays_of_the_orthant():
    rows = np.array([[Fraction(int(i == j)) for j in range(3)] for i in range(3)], dtype=object)
    rays, lineality = extreme_rays(rows)
    assert sorted(tuple(r) for r in rays) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert lineality.shape[1] == 0


def test_bisector_normal_orientation():
    X = SpacePoint(I3)
    g = Isometry([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    normal = bisector_normal(X, g)
    assert normal.matrix == SymMatrix([[1, -1, 0], [-1, 0, 0], [0, 0, 0]])
    assert normal.value_at(X) > 0
    assert HalfSpaceSpec(normal=normal).contains(X)


def test_bisector_of_a_stabilizer():
    rotation = Isometry([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
    with pytest.raises(StabilizedCenterError):
        bisector_normal(SpacePoint(I3), rotation)


def test_hyperplane_normal_must_be_indefinite():
    with pytest.raises(MatrixLiteralError):
        HyperplaneNormal([[1, 0], [0, 1]])
    normal = HyperplaneNormal([[2, 0], [0, -4]])
    assert normal.canonical().matrix == SymMatrix([[1, 0], [0, -2]])
    assert normal.key() == normal.negated().key()


def test_halfspaces_must_be_rational():
    with pytest.raises(DegeneratePolytopeError):
        ProjPolytope.from_halfspaces(2, [HalfSpaceSpec(normal=[[0.5, 1.0], [1.0, -0.5]])])
    with pytest.raises(DegeneratePolytopeError):
        ProjPolytope.from_halfspaces(3, [HalfSpaceSpec(normal=[[1, 0], [0, -1]])])


def test_simplex_face_lattice(simplex):
    assert simplex.counts() == {0: 6, 1: 15, 2: 20, 3: 15, 4: 6, 5: 1}
    assert simplex.bounded()
    assert len(simplex.irredundant()) == 6
    poset = face_poset(simplex)
    assert list(poset)[0] == 5
    assert poset[5] == [[0, 1, 2, 3, 4, 5]]


def test_vertex_round_trip(simplex, corpus):
    for v in corpus.vertices:
        assert simplex.vertex_index(v) is not None


def test_finite_volume(simplex):
    assert finite_volume(simplex)


def test_indefinite_vertex_has_infinite_volume(corpus):
    vertices = [SymMatrix([[1, 0, 0], [0, 1, 0], [0, 0, -1]])] + corpus.vertices[1:]
    P = ProjPolytope.from_vertices(vertices)
    assert len(P.vertices) == 6
    assert not finite_volume(P)


def test_satake_faces(simplex):
    census = {}
    for sf in satake_faces(simplex):
        key = (sf.type, simplex.faces[sf.face].dim)
        census[key] = census.get(key, 0) + 1
    assert census == {(1, 0): 6, (2, 1): 15, (2, 2): 4}
    assert len(satake_components(simplex)) == 13


def test_face_image_under_identity(simplex):
    face = simplex.faces[simplex.facets()[0]]
    assert face_image(Isometry.identity(3), simplex, face) == face.vertices
