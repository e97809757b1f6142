"""Dirichlet-Selberg domains, their facet pairings and ridge cycles."""
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.core.matcore import (
    FROZEN,
    Isometry,
    IsometryWord,
    SpacePoint,
    SymMatrix,
    act,
    congruence,
    matrix_key,
)
from dsdomain.errors import (
    CycleClosureError,
    FiniteOrderError,
    GeneratorSetError,
    StabilizedCenterError,
)
from dsdomain.poincare.angles import angle_sum
from dsdomain.polyhedra.polytope import (
    HalfSpaceSpec,
    ProjPolytope,
    bisector_normal,
    face_image,
)

logger = logging.getLogger(__name__)


class GeneratorSet(BaseModel):
    """Finite inverse-closed set of isometries with a center they all move"""
    model_config = FROZEN

    elements: List[Isometry]
    names: List[str] = Field(default_factory=list)
    center: SpacePoint

    @field_validator("elements", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> List[Isometry]:
        return [g if isinstance(g, Isometry) else Isometry(g) for g in value]

    @field_validator("center", mode="before")
    @classmethod
    def _center(cls, value: Any) -> SpacePoint:
        return value if isinstance(value, SpacePoint) else SpacePoint(value)

    @model_validator(mode="before")
    @classmethod
    def _default_names(cls, data: Any) -> Any:
        if isinstance(data, dict) and not data.get("names"):
            data = {**data, "names": [f"g{i}" for i in range(len(data.get("elements", [])))]}
        return data

    @model_validator(mode="after")
    def _check(self) -> "GeneratorSet":
        if len(self.names) != len(self.elements):
            raise GeneratorSetError("names and elements differ in length")
        keys = {g.key() for g in self.elements}
        for name, g in zip(self.names, self.elements):
            if g.n != self.center.n:
                raise GeneratorSetError(f"{name} has dimension {g.n}, center has {self.center.n}")
            if g.inverse().key() not in keys:
                raise GeneratorSetError(f"inverse of {name} is missing")
            if act(g, self.center).matrix == self.center.matrix:
                raise StabilizedCenterError(f"{name} stabilizes the center")
        return self

    @classmethod
    def closed(cls, named: Dict[str, Any], center: Any) -> "GeneratorSet":
        """Each named element followed by its inverse, named x^-1"""
        elements, names = [], []
        for name, g in named.items():
            g = g if isinstance(g, Isometry) else Isometry(g)
            elements += [g, g.inverse()]
            names += [name, f"{name}^-1"]
        return cls(elements=elements, names=names, center=center)

    @property
    def n(self) -> int:
        return self.center.n

    def index_of(self, g: Isometry) -> Optional[int]:
        return next((i for i, h in enumerate(self.elements) if h == g), None)


class DomainWithPairing(BaseModel):
    model_config = FROZEN

    polytope: ProjPolytope
    generators: GeneratorSet
    facet_map: Dict[int, int]
    pairing: Dict[int, int]

    def generator(self, facet: int) -> Isometry:
        return self.generators.elements[self.facet_map[facet]]

    def name(self, facet: int) -> str:
        return self.generators.names[self.facet_map[facet]]

    def normal(self, facet: int) -> SymMatrix:
        return self.polytope.halfspaces[self.polytope.facet_halfspace(facet)].normal

    def facets_of(self, face: int) -> List[int]:
        """Facets containing the given face"""
        target = self.polytope.faces[face]
        return [f for f in self.polytope.facets() if self.polytope.faces[f].contains(target)]

    @property
    def bounded(self) -> bool:
        return self.polytope.bounded()


def build_domain(gen: GeneratorSet) -> DomainWithPairing:
    """DS(X, G0): intersect the Selberg half-spaces of every generator"""
    halfspaces = [
        HalfSpaceSpec(normal=bisector_normal(gen.center, g), label=name)
        for name, g in zip(gen.names, gen.elements)
    ]
    polytope = ProjPolytope.from_halfspaces(gen.n, halfspaces)
    if not polytope.bounded():
        logger.warning("Domain is unbounded in the chart; vertex list covers the pointed part only")

    facet_map = {}
    for f in polytope.facets():
        h = polytope.facet_halfspace(f)
        if h is not None:
            facet_map[f] = h
    by_generator = {gen.elements[i].key(): f for f, i in facet_map.items()}
    pairing = {}
    for f, i in facet_map.items():
        partner = by_generator.get(gen.elements[i].inverse().key())
        if partner is not None:
            pairing[f] = partner
    logger.info("Built domain: %d facets, %d paired", len(facet_map), len(pairing))
    return DomainWithPairing(polytope=polytope, generators=gen, facet_map=facet_map, pairing=pairing)


# ---------- EXACTNESS ----------

class PairingCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    facet: int
    partner: Optional[int]
    generator: str
    image: Optional[Tuple[int, ...]] = None
    reason: Optional[str] = None


class ExactnessReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    pairs: List[PairingCheck] = Field(default_factory=list)
    failures: List[PairingCheck] = Field(default_factory=list)

    @computed_field
    @property
    def ok(self) -> bool:
        return not self.failures


def check_exact(d: DomainWithPairing) -> ExactnessReport:
    """F' = g_F^-1 . F as vertex sets, and g_F' = g_F^-1, for every facet"""
    P = d.polytope
    pairs, failures = [], []
    for f in sorted(d.facet_map):
        g = d.generator(f)
        partner = d.pairing.get(f)
        entry = dict(facet=f, partner=partner, generator=d.name(f))
        if partner is None:
            failures.append(PairingCheck(**entry, reason="no facet carries the inverse generator"))
            continue
        if P.faces[f].rays or P.lines:
            failures.append(PairingCheck(**entry, reason="facet is unbounded in the chart"))
            continue
        image = face_image(g.inverse(), P, P.faces[f])
        entry["image"] = image
        if image is None:
            failures.append(PairingCheck(**entry, reason="image vertices are not vertices of the domain"))
        elif image != P.faces[partner].vertices:
            failures.append(PairingCheck(**entry, reason=f"image {image} is not the partner facet"))
        elif not (d.generator(partner) @ g).is_identity():
            failures.append(PairingCheck(**entry, reason="partner generator is not the inverse"))
        else:
            pairs.append(PairingCheck(**entry))
    logger.info("Exactness: %d verified, %d failed", len(pairs), len(failures))
    return ExactnessReport(pairs=pairs, failures=failures)


# ---------- RIDGE CYCLES ----------

class RidgeCycle(BaseModel):
    """Ridges r_0 .. r_{m-1}; letter i carries r_i onto r_{i+1}"""
    model_config = FROZEN

    ridges: List[int]
    leaving: List[int]
    word: IsometryWord
    order: Optional[int] = None

    def __len__(self) -> int:
        return len(self.ridges)

    def label(self, P: ProjPolytope) -> str:
        parts = []
        for ridge, name in zip(self.ridges, self.word.names):
            parts.append(f"{list(P.faces[ridge].vertices)} -{name}->")
        return " ".join(parts) + f" {list(P.faces[self.ridges[0]].vertices)}"


def _step(d: DomainWithPairing, ridge: int, leaving: int) -> Tuple[Isometry, str, int, int]:
    """Carry ridge across its leaving facet; returns the letter, the image ridge and its next leaving facet"""
    P = d.polytope
    partner = d.pairing.get(leaving)
    if partner is None:
        raise CycleClosureError(f"facet {leaving} has no partner")
    h = d.generator(partner)
    image = face_image(h, P, P.faces[ridge])
    target = P.face_by_vertices(image) if image is not None else None
    if target is None:
        raise CycleClosureError(f"image of ridge {ridge} under {d.name(partner)} is not a ridge")
    others = [f for f in d.facets_of(target) if f != partner]
    if len(others) != 1:
        raise CycleClosureError(f"ridge {target} does not lie on exactly two facets")
    return h, d.name(partner), target, others[0]


def ridge_cycles(d: DomainWithPairing, infer_orders: bool = True, settings: Settings = DEFAULT_SETTINGS) -> List[RidgeCycle]:
    """Partition the ridges into cycles by following the facet pairing"""
    P = d.polytope
    ridges = P.ridges()
    seen = set()
    cycles = []
    for start in ridges:
        if start in seen:
            continue
        facets = d.facets_of(start)
        if len(facets) != 2:
            raise CycleClosureError(f"ridge {start} lies on {len(facets)} facets")
        leaving = max(facets)
        ridge = start
        path, exits, letters, names = [], [], [], []
        for _ in range(len(ridges) + 1):
            path.append(ridge)
            exits.append(leaving)
            h, name, ridge, leaving = _step(d, ridge, leaving)
            letters.append(h)
            names.append(name)
            if (ridge, leaving) == (start, exits[0]):
                break
        else:
            raise CycleClosureError(f"cycle of ridge {start} did not close within {len(ridges)} steps")
        seen.update(path)
        cycle = RidgeCycle(ridges=path, leaving=exits, word=IsometryWord(letters=letters, names=names))
        logger.debug("Ridge cycle %s", cycle.label(P))
        cycles.append(cycle)

    if infer_orders:
        cycles = [c.model_copy(update={"order": angle_sum(c, d, settings=settings).order}) for c in cycles]
    logger.info("Found %d ridge cycles", len(cycles))
    return cycles


def canonical_cycle(cycle: RidgeCycle, d: DomainWithPairing) -> Tuple[Tuple[Tuple[str, ...], ...], ...]:
    """Ridges as vertex-matrix keys, least over rotations and reversals"""
    P = d.polytope
    seq = [
        tuple(sorted(matrix_key(P.vertices[v].entries) for v in P.faces[r].vertices))
        for r in cycle.ridges
    ]
    variants = []
    for s in (seq, seq[::-1]):
        variants += [tuple(s[i:] + s[:i]) for i in range(len(s))]
    return min(variants)


def word_order_on_ridge(cycle: RidgeCycle, d: DomainWithPairing, budget: Optional[int] = None,
                        settings: Settings = DEFAULT_SETTINGS) -> int:
    """Least m with w^m fixing the ridge span pointwise (projectively)"""
    budget = budget or settings.power_budget
    P = d.polytope
    vertices = [P.vertices[v].entries for v in P.faces[cycle.ridges[0]].vertices]
    w = cycle.word.product()
    power = w
    for m in range(1, budget + 1):
        images = [congruence(power, v) for v in vertices]
        ratios = {_ratio(v, img) for v, img in zip(vertices, images)}
        if len(ratios) == 1 and None not in ratios:
            return m
        power = power @ w
    raise FiniteOrderError(f"cycle word has no finite order on its ridge within {budget} powers")


def _ratio(a: np.ndarray, b: np.ndarray) -> Optional[Any]:
    nonzero = [idx for idx, v in np.ndenumerate(a) if v != 0]
    if not nonzero:
        return None
    c = b[nonzero[0]] / a[nonzero[0]]
    return c if np.all(b == a * c) else None
