from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field

from dsdomain.core.busemann import BusemannKind, BusemannSpec, HoroballSpec
from dsdomain.core.matcore import Isometry, IsometryWord, SpacePoint
from dsdomain.core.satake import BoundaryComponent, SatakePoint
from dsdomain.errors import GeneratorSetError
from dsdomain.harness.slices import SliceGrid
from dsdomain.poincare.domain import GeneratorSet
from dsdomain.polyhedra.polytope import HalfSpaceSpec, ProjPolytope

Literal2D = List[List[Any]]


def word_from(table: Mapping[str, Isometry], names: Sequence[str]) -> IsometryWord:
    """Word over named letters; "x^-1" falls back to the inverse of x"""
    letters = []
    for s in names:
        if s in table:
            letters.append(table[s])
        elif s.endswith("^-1") and s[:-3] in table:
            letters.append(table[s[:-3]].inverse())
        else:
            raise GeneratorSetError(f"unknown letter {s!r}")
    return IsometryWord(letters=letters, names=list(names))


def _component(span: Optional[Literal2D]) -> Optional[BoundaryComponent]:
    return BoundaryComponent(span=span) if span is not None else None


class GeneratorRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    center: Literal2D
    generators: Dict[str, Literal2D] = {}
    closed: bool = False

    def to_generator_set(self) -> GeneratorSet:
        if self.closed:
            return GeneratorSet.closed(self.generators, self.center)
        return GeneratorSet(elements=list(self.generators.values()), names=list(self.generators),
                            center=self.center)


class BusemannRequest(BaseModel):
    """{kind, alpha, component?, reference, point}; "points" evaluates several at once"""
    model_config = ConfigDict(extra="forbid")

    kind: BusemannKind = BusemannKind.TYPE0
    alpha: Literal2D
    component: Optional[Literal2D] = None
    reference: Literal2D
    point: Optional[Literal2D] = None
    points: List[Literal2D] = []
    level: Optional[Any] = None

    def to_spec(self) -> BusemannSpec:
        return BusemannSpec(kind=self.kind, alpha=SatakePoint.of(self.alpha),
                            component=_component(self.component), reference=SpacePoint(self.reference))

    def to_horoball(self) -> Optional[HoroballSpec]:
        if self.level is None:
            return None
        return HoroballSpec(busemann=self.to_spec(), level=self.level)

    def evaluation_points(self) -> List[Literal2D]:
        return ([self.point] if self.point is not None else []) + list(self.points)


class AsymptoticRequest(BaseModel):
    """{spec, beta, Y}: limit of spec along beta + eps Y"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    spec: BusemannRequest
    beta: Literal2D
    direction: Literal2D = Field(alias="Y")
    schedule: Optional[List[float]] = None


class FixedPointRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    domain: GeneratorRequest
    face: List[Literal2D]
    word: List[str]


class InvarianceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    letters: Dict[str, Literal2D]
    word: List[str]
    alpha: Literal2D
    component: Optional[Literal2D] = None
    trials: int = Field(default=50, ge=1)
    seed: int = 0

    def to_word(self) -> IsometryWord:
        return word_from({k: Isometry(v) for k, v in self.letters.items()}, self.word)

    def to_component(self) -> Optional[BoundaryComponent]:
        return _component(self.component)


class ExpressRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    generators: Dict[str, Literal2D]
    pairings: Dict[str, Literal2D]


class SliceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    busemann: BusemannRequest
    levels: List[float] = [1.0]
    s_range: Tuple[float, float] = (-3.0, 3.0)
    t_range: Tuple[float, float] = (-3.0, 3.0)
    resolution: Tuple[int, int] = (101, 101)

    def to_grid(self) -> SliceGrid:
        return SliceGrid(s_range=self.s_range, t_range=self.t_range, resolution=self.resolution)


class PolytopeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    halfspaces: Optional[List[Literal2D]] = None
    vertices: Optional[List[Literal2D]] = None

    def to_polytope(self) -> ProjPolytope:
        if self.halfspaces is not None:
            return ProjPolytope.from_halfspaces(self.n, [HalfSpaceSpec(normal=h) for h in self.halfspaces])
        if self.vertices is not None:
            return ProjPolytope.from_vertices(self.vertices)
        raise GeneratorSetError("give either halfspaces or vertices")


class CycleEntry(BaseModel):
    ridges: List[List[int]]
    word: List[str]
    order: Optional[int] = None


class CycleReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    cycles: List[CycleEntry] = Field(default_factory=list)

    @computed_field
    @property
    def ok(self) -> bool:
        return all(c.order is not None for c in self.cycles)
