"""Projective polytopes in the trace-one chart of P(Sym_n).

A polytope is homogenized to the cone {N_i . y >= 0, tr(y) >= 0} in Sym_n.
Extreme rays with positive trace are the vertices (rescaled to trace one);
rays with zero trace are recession directions of the chart.
"""
import logging
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dsdomain.core.matcore import (
    FROZEN,
    Isometry,
    SpacePoint,
    SymMatrix,
    act,
    column_basis,
    congruence,
    exact_rank,
    matrix_key,
    primitive_integer,
    proportional,
    psd_rank,
)
from dsdomain.core.satake import BoundaryComponent, psd_profile
from dsdomain.errors import DegeneratePolytopeError, MatrixLiteralError, StabilizedCenterError
from dsdomain.polyhedra.cone import extreme_rays, from_coords, pairing_row

logger = logging.getLogger(__name__)


def _trace_pairing(a: np.ndarray, y: np.ndarray) -> Any:
    return sum(a[i, j] * y[j, i] for i in range(a.shape[0]) for j in range(a.shape[0]))


class HyperplaneNormal(BaseModel):
    """Indefinite symmetric matrix A; the hyperplane is tr(A.Y) = 0"""
    model_config = FROZEN

    matrix: SymMatrix

    def __init__(self, matrix: Any = None, **data: Any) -> None:
        if matrix is not None:
            data["matrix"] = matrix
        super().__init__(**data)

    @field_validator("matrix", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> SymMatrix:
        if isinstance(value, SymMatrix):
            return value
        if isinstance(value, dict):
            return SymMatrix.model_validate(value)
        return SymMatrix(value)

    @model_validator(mode="after")
    def _indefinite(self) -> "HyperplaneNormal":
        arr = self.matrix.entries
        if psd_profile(arr) is not None or psd_profile(-arr) is not None:
            raise MatrixLiteralError("hyperplane normal must be indefinite")
        return self

    def canonical(self) -> "HyperplaneNormal":
        """Positive rescaling: primitive integer (exact) or unit Frobenius norm"""
        if self.matrix.exact:
            return HyperplaneNormal(SymMatrix(primitive_integer(self.matrix.entries)))
        arr = self.matrix.to_float()
        return HyperplaneNormal(SymMatrix((arr / np.linalg.norm(arr)).astype(object)))

    def key(self) -> Tuple[str, ...]:
        """Identity of the unoriented hyperplane: canonical with first nonzero entry positive"""
        arr = self.canonical().matrix.entries
        first = next(v for v in arr.flat if v != 0)
        return matrix_key(arr if first > 0 else -arr)

    def value_at(self, Y: Any) -> Any:
        y = Y.array if isinstance(Y, SpacePoint) else (Y.entries if isinstance(Y, SymMatrix) else np.asarray(Y, dtype=object))
        return _trace_pairing(self.matrix.entries, y)

    def negated(self) -> "HyperplaneNormal":
        return HyperplaneNormal(SymMatrix(-self.matrix.entries))


class HalfSpaceSpec(BaseModel):
    """{Y : tr(normal . Y) >= 0}"""
    model_config = FROZEN

    normal: SymMatrix
    label: Optional[str] = None
    sense: Literal["ge"] = "ge"

    @field_validator("normal", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> SymMatrix:
        if isinstance(value, HyperplaneNormal):
            return value.matrix
        if isinstance(value, SymMatrix):
            return value
        if isinstance(value, dict):
            return SymMatrix.model_validate(value)
        return SymMatrix(value)

    def value_at(self, Y: Any) -> Any:
        y = Y.array if isinstance(Y, SpacePoint) else (Y.entries if isinstance(Y, SymMatrix) else np.asarray(Y, dtype=object))
        return _trace_pairing(self.normal.entries, y)

    def contains(self, Y: Any) -> bool:
        return self.value_at(Y) >= 0


class Face(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[int, ...]
    rays: Tuple[int, ...] = ()
    halfspaces: Tuple[int, ...] = ()
    dim: int

    def contains(self, other: "Face") -> bool:
        return set(other.vertices) <= set(self.vertices) and set(other.rays) <= set(self.rays)


class SatakeFace(BaseModel):
    model_config = FROZEN

    face: int
    component: BoundaryComponent
    type: int


class ProjPolytope(BaseModel):
    model_config = FROZEN

    n: int
    halfspaces: List[HalfSpaceSpec] = Field(default_factory=list)
    vertices: List[SymMatrix] = Field(default_factory=list)
    rays: List[SymMatrix] = Field(default_factory=list)
    lines: List[SymMatrix] = Field(default_factory=list)
    dim: int
    faces: List[Face] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)

    @classmethod
    def from_halfspaces(cls, n: int, halfspaces: Sequence[HalfSpaceSpec]) -> "ProjPolytope":
        """Double description of the homogenized cone, then the face lattice"""
        for h in halfspaces:
            if h.normal.n != n:
                raise DegeneratePolytopeError("half-space normal of the wrong dimension")
            if not h.normal.exact:
                raise DegeneratePolytopeError("half-spaces must be rational")
        trace_row = pairing_row(np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object))
        rows = np.array([trace_row] + [pairing_row(h.normal.entries) for h in halfspaces], dtype=object)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        generators, lineality = extreme_rays(rows)

        vertices, recession = [], []
        for g in generators:
            tr = trace_row.dot(g)
            if tr > 0:
                vertices.append(g / tr)
            else:
                recession.append(g)
        if not vertices:
            raise DegeneratePolytopeError("the half-spaces leave nothing inside the trace-one chart")
        lines = [lineality[:, j] for j in range(lineality.shape[1])]

        warnings = []
        if recession or lines:
            warnings.append(
                f"unbounded in the chart: {len(recession)} recession ray(s), {len(lines)} lineality direction(s)"
            )
            logger.warning("Polytope is unbounded in the trace-one chart")

        dim = _affine_rank(vertices, recession + lines)
        tight = [
            frozenset(i for i, v in enumerate(vertices) if row.dot(v) == 0)
            | frozenset(len(vertices) + i for i, g in enumerate(recession) if row.dot(g) == 0)
            for row in rows[1:]
        ]
        faces = _face_lattice(vertices, recession, lines, tight)
        logger.info("Built polytope: %d vertices, %d faces, dimension %d", len(vertices), len(faces), dim)
        return cls(
            n=n,
            halfspaces=list(halfspaces),
            vertices=[SymMatrix(from_coords(v, n)) for v in vertices],
            rays=[SymMatrix(from_coords(g, n)) for g in recession],
            lines=[SymMatrix(from_coords(l, n)) for l in lines],
            dim=dim,
            faces=faces,
            warnings=warnings,
        )

    @classmethod
    def from_vertices(cls, vertices: Sequence[Any]) -> "ProjPolytope":
        """Facets of the hull of vertices spanning the chart, via the dual cone"""
        mats = [v if isinstance(v, SymMatrix) else SymMatrix(v) for v in vertices]
        if not mats:
            raise DegeneratePolytopeError("no vertices given")
        n = mats[0].n
        rows = np.array([pairing_row(m.entries) for m in mats], dtype=object)
        normals, lineality = extreme_rays(rows)
        if lineality.shape[1]:
            raise DegeneratePolytopeError("vertices do not span the trace-one chart")
        halfspaces = [HalfSpaceSpec(normal=SymMatrix(from_coords(c, n))) for c in normals]
        return cls.from_halfspaces(n, halfspaces)

    # ---------- lattice helpers ----------

    def faces_of_dim(self, d: int) -> List[int]:
        return [i for i, f in enumerate(self.faces) if f.dim == d]

    def facets(self) -> List[int]:
        return self.faces_of_dim(self.dim - 1)

    def ridges(self) -> List[int]:
        return self.faces_of_dim(self.dim - 2)

    def counts(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for f in self.faces:
            out[f.dim] = out.get(f.dim, 0) + 1
        return dict(sorted(out.items()))

    def face_by_vertices(self, vertices: Iterable[int]) -> Optional[int]:
        target = tuple(sorted(vertices))
        return next((i for i, f in enumerate(self.faces) if f.vertices == target and not f.rays), None)

    def facet_halfspace(self, face_id: int) -> Optional[int]:
        """Representative half-space of a facet: first by input order"""
        hs = self.faces[face_id].halfspaces
        return min(hs) if hs else None

    def irredundant(self) -> List[int]:
        return sorted(h for h in (self.facet_halfspace(f) for f in self.facets()) if h is not None)

    def vertex_index(self, matrix: Any) -> Optional[int]:
        """Index of the vertex projectively equal to matrix"""
        arr = matrix.entries if isinstance(matrix, SymMatrix) else np.asarray(matrix, dtype=object)
        return next((i for i, v in enumerate(self.vertices) if proportional(v.entries, arr)), None)

    def bounded(self) -> bool:
        return not self.rays and not self.lines


def _affine_rank(points: List[np.ndarray], directions: List[np.ndarray]) -> int:
    if not points:
        return -1
    cols = [p - points[0] for p in points[1:]] + list(directions)
    if not cols:
        return 0
    return exact_rank(np.array(cols, dtype=object))


def _face_lattice(
    vertices: List[np.ndarray],
    recession: List[np.ndarray],
    lines: List[np.ndarray],
    tight: List[FrozenSet[int]],
) -> List[Face]:
    nv = len(vertices)
    everything = frozenset(range(nv + len(recession)))
    found = {everything}
    frontier = [t for t in tight if any(g < nv for g in t)]
    found.update(frontier)
    while frontier:
        new = []
        for a in frontier:
            for b in list(found):
                c = a & b
                if c not in found and any(g < nv for g in c):
                    found.add(c)
                    new.append(c)
        frontier = new

    faces = []
    for gens in found:
        verts = sorted(g for g in gens if g < nv)
        rays = sorted(g - nv for g in gens if g >= nv)
        dim = _affine_rank([vertices[i] for i in verts], [recession[i] for i in rays] + lines)
        halfspaces = tuple(i for i, t in enumerate(tight) if gens <= t and t != everything)
        faces.append(Face(vertices=tuple(verts), rays=tuple(rays), halfspaces=halfspaces, dim=dim))
    faces.sort(key=lambda f: (-f.dim, f.vertices, f.rays))
    return faces


# ---------- OPERATIONS ----------

def bisector_normal(X: SpacePoint, g: Isometry) -> HyperplaneNormal:
    """(g.X)^-1 - X^-1, canonicalized; the center satisfies tr(A.X) > 0"""
    moved = act(g, X)
    diff = moved.inverse().entries - X.inverse().entries
    if all(v == 0 for v in diff.flat):
        raise StabilizedCenterError("the isometry fixes the center")
    return HyperplaneNormal(SymMatrix(diff)).canonical()


def face_poset(P: ProjPolytope) -> Dict[int, List[List[int]]]:
    """Faces as sorted vertex-index lists grouped by dimension"""
    out: Dict[int, List[List[int]]] = {}
    for f in P.faces:
        out.setdefault(f.dim, []).append(list(f.vertices))
    return dict(sorted(out.items(), reverse=True))


def satake_faces(P: ProjPolytope) -> List[SatakeFace]:
    """Faces lying in the Satake boundary, with their minimal enclosing component"""
    out = []
    ranks = [psd_rank(v.entries) if v.exact else None for v in P.vertices]
    singular = [r is not None and r < P.n for r in ranks]
    for idx, face in enumerate(P.faces):
        if face.rays or not face.vertices or not all(singular[i] for i in face.vertices):
            continue
        total = sum(P.vertices[i].entries for i in face.vertices)
        rank = psd_rank(total)
        if rank is None or rank >= P.n:
            continue
        component = BoundaryComponent(basis=column_basis(total))
        out.append(SatakeFace(face=idx, component=component, type=rank))
    out.sort(key=lambda s: (s.type, P.faces[s.face].vertices))
    return out


def satake_components(P: ProjPolytope) -> List[SatakeFace]:
    """One Satake face per boundary component: the largest face in it"""
    groups: List[SatakeFace] = []
    for s in satake_faces(P):
        for i, g in enumerate(groups):
            if g.component == s.component:
                if P.faces[s.face].dim > P.faces[g.face].dim:
                    groups[i] = s
                break
        else:
            groups.append(s)
    return groups


def finite_volume(P: ProjPolytope) -> bool:
    """Every vertex positive semidefinite and the hull bounded in the chart"""
    if not P.bounded():
        logger.warning("finite_volume: recession directions present, hull leaves the chart")
        return False
    return all(psd_profile(v.entries) is not None for v in P.vertices)


def face_image(g: Isometry, P: ProjPolytope, face: Face) -> Optional[Tuple[int, ...]]:
    """Vertex indices of g.face when every image vertex is a vertex of P"""
    image = []
    for i in face.vertices:
        j = P.vertex_index(congruence(g, P.vertices[i].entries))
        if j is None:
            return None
        image.append(j)
    return tuple(sorted(image))
