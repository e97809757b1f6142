"""Satake-face cycles and the Busemann-Selberg functions they preserve."""
import logging
from collections import deque
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.core.busemann import BusemannKind, BusemannSpec, busemann0, busemann_k_power
from dsdomain.core.matcore import (
    FROZEN,
    Isometry,
    IsometryWord,
    SpacePoint,
    act,
    congruence,
    exact_root,
    identity,
    proportional,
    solve_exact,
)
from dsdomain.core.sampling import random_space_point
from dsdomain.core.satake import BoundaryComponent, SatakePoint, act_on_boundary
from dsdomain.errors import BusemannPreconditionError, CycleClosureError, FiniteOrderError, GeneratorSetError
from dsdomain.poincare.domain import DomainWithPairing
from dsdomain.polyhedra.polytope import SatakeFace, face_image, satake_faces

logger = logging.getLogger(__name__)


class SatakeCycle(BaseModel):
    """Word in pairing letters carrying a Satake face back onto itself"""
    model_config = FROZEN

    face: SatakeFace
    path: List[Tuple[int, ...]]
    word: IsometryWord


def satake_cycles(d: DomainWithPairing, max_length: int = 3) -> List[SatakeCycle]:
    """Shortest first-return words for every Satake face, breadth first.

    Words that backtrack (a letter followed by its inverse) and words whose
    product is the identity are skipped.
    """
    P = d.polytope
    cycles = []
    for sf in satake_faces(P):
        start = P.faces[sf.face].vertices
        queue = deque([(start, [], [])])
        found = set()
        while queue:
            current, letters, names = queue.popleft()
            if len(letters) == max_length:
                continue
            face_id = P.face_by_vertices(current)
            for f in d.facets_of(face_id):
                partner = d.pairing.get(f)
                if partner is None:
                    continue
                h = d.generator(partner)
                if letters and h.inverse().key() == letters[-1].key():
                    continue
                image = face_image(h, P, P.faces[face_id])
                if image is None:
                    continue
                word_letters, word_names = letters + [h], names + [d.name(partner)]
                if image == start:
                    word = IsometryWord(letters=word_letters, names=word_names)
                    product = word.product()
                    if product.is_identity() or product.key() in found:
                        continue
                    found.add(product.key())
                    path = [start] + _path(P, start, word_letters)
                    cycles.append(SatakeCycle(face=sf, path=path, word=word))
                else:
                    queue.append((image, word_letters, word_names))
    logger.info("Found %d Satake-face cycles", len(cycles))
    return cycles


def _path(P: Any, start: Tuple[int, ...], letters: Sequence[Isometry]) -> List[Tuple[int, ...]]:
    out, current = [], start
    for h in letters:
        current = face_image(h, P, P.faces[P.face_by_vertices(current)])
        out.append(current)
    return out


def _selberg_minimizer(V: BoundaryComponent, X: SpacePoint) -> SatakePoint:
    """alpha = B (B^T X^-1 B)^-1 B^T, the minimum of tr(X^-1 .) on the component"""
    B = V.basis
    x_inv = X.inverse().entries
    block = B.T.dot(x_inv).dot(B)
    if V.exact and X.exact:
        return SatakePoint.of(B.dot(solve_exact(block, B.T)))
    return SatakePoint.of(B.dot(np.linalg.solve(block.astype(float), B.T.astype(float))))


def _moves_face(w: IsometryWord, face: SatakeFace, d: DomainWithPairing) -> bool:
    P = d.polytope
    return face_image(w.product(), P, P.faces[face.face]) == P.faces[face.face].vertices


def cycle_fixed_point(face: SatakeFace, w: IsometryWord, d: DomainWithPairing,
                      settings: Settings = DEFAULT_SETTINGS) -> SatakePoint:
    """A point of the face's component fixed by w, exactly for rational data"""
    if not _moves_face(w, face, d):
        raise CycleClosureError("word does not map the Satake face to itself")
    X = d.generators.center
    candidate = _selberg_minimizer(face.component, X)
    g = w.product()
    if act_on_boundary(g, candidate) == candidate:
        return candidate

    x_inv = X.inverse().entries
    orbit = [candidate.array]
    power = g
    for _ in range(settings.power_budget):
        image = congruence(power, candidate.array)
        if proportional(candidate.array, image):
            break
        orbit.append(image)
        power = power @ g
    else:
        first = congruence(g, candidate.array)
        scaling = float(_trace(x_inv.dot(first)) / _trace(x_inv.dot(candidate.array)))
        raise FiniteOrderError(
            f"restricted action has no finite order within {settings.power_budget} powers", scaling
        )
    # barycenter of the orbit, each point scaled to the same Selberg level
    total = sum(p / _trace(x_inv.dot(p)) for p in orbit)
    fixed = SatakePoint.of(total)
    logger.debug("Fixed point from an orbit of length %d", len(orbit))
    return fixed


def _trace(arr: np.ndarray) -> Any:
    return sum(arr[i, i] for i in range(arr.shape[0]))


# ---------- INVARIANCE ----------

class InvarianceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    trials: int
    exact: bool
    scaling: Optional[float] = None
    matches: int = 0
    failures: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def ok(self) -> bool:
        return not self.failures and self.matches == self.trials


def _spec(alpha: SatakePoint, component: Optional[BoundaryComponent], reference: SpacePoint) -> BusemannSpec:
    kind = BusemannKind.TYPE0 if component is None else BusemannKind.TYPEK
    return BusemannSpec(kind=kind, alpha=alpha, component=component, reference=reference)


def _value(spec: BusemannSpec, Y: SpacePoint) -> Any:
    """Type-0 value, or the m-th power of the type-k value; rational for rational data"""
    return busemann0(spec, Y) if spec.kind == BusemannKind.TYPE0 else busemann_k_power(spec, Y)


def _power_ratio(g: Isometry, alpha: SatakePoint, component: Optional[BoundaryComponent]) -> Any:
    if not proportional(alpha.array, congruence(g, alpha.array)):
        raise BusemannPreconditionError("word does not fix alpha projectively")
    reference = SpacePoint(identity(alpha.n))
    spec = _spec(alpha, component, reference)
    return _value(spec, act(g, reference)) / _value(spec, reference)


def scaling_constant(w: IsometryWord, alpha: SatakePoint,
                     component: Optional[BoundaryComponent] = None) -> Any:
    """C with b(w.Y) = C b(Y) for every Y, when w fixes alpha projectively"""
    ratio = _power_ratio(w.product(), alpha, component)
    if component is None:
        return ratio
    m = component.dim
    if isinstance(ratio, Fraction):
        root = exact_root(ratio, m)
        if root is not None:
            return root
    return float(ratio) ** (1.0 / m)


def invariance_check(w: IsometryWord, alpha: SatakePoint, component: Optional[BoundaryComponent] = None,
                     trials: int = 50, seed: int = 0, settings: Settings = DEFAULT_SETTINGS) -> InvarianceReport:
    """b_{alpha,Z}(w.Y) = C b_{alpha,Z}(Y) on seeded random Y and Z; C = 1 when w fixes alpha"""
    g = w.product()
    ratio = _power_ratio(g, alpha, component)
    exact = g.exact and alpha.exact and (component is None or component.exact)
    rng = np.random.default_rng(seed)
    failures, matches = [], 0
    for t in range(trials):
        Z = random_space_point(rng, alpha.n, exact=exact)
        Y = random_space_point(rng, alpha.n, exact=exact)
        spec = _spec(alpha, component, Z)
        before, after = _value(spec, Y), _value(spec, act(g, Y))
        if all(isinstance(v, Fraction) for v in (before, after, ratio)):
            ok = after == before * ratio
        else:
            ok = abs(float(after) - float(before) * float(ratio)) <= settings.tolerances.metric * abs(float(after))
        if ok:
            matches += 1
        else:
            failures.append(f"trial {t}: b(w.Y)={float(after):.12g}, C*b(Y)={float(before) * float(ratio):.12g}")
    scaling = float(scaling_constant(w, alpha, component))
    if failures:
        logger.warning("Invariance failed on %d of %d trials", len(failures), trials)
    return InvarianceReport(trials=trials, exact=exact, scaling=scaling, matches=matches, failures=failures)


# ---------- EXPRESSIBILITY ----------

class ExpressibilityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    depth: int
    witnesses: Dict[str, Optional[List[str]]]

    @computed_field
    @property
    def ok(self) -> bool:
        return all(w is not None for w in self.witnesses.values())


def expressibility(gens: Sequence[Isometry], pairings: Sequence[Isometry], depth: int,
                   gen_names: Optional[Sequence[str]] = None,
                   pairing_names: Optional[Sequence[str]] = None) -> ExpressibilityReport:
    """Breadth-first search for each generator as a word in the facet pairings"""
    if depth < 1:
        raise GeneratorSetError("search depth must be at least 1")
    gen_names = list(gen_names or [f"g{i}" for i in range(len(gens))])
    pairing_names = list(pairing_names or [f"p{i}" for i in range(len(pairings))])
    wanted = {g.key(): name for g, name in zip(gens, gen_names)}
    witnesses: Dict[str, Optional[List[str]]] = {name: None for name in gen_names}

    n = pairings[0].n if pairings else gens[0].n
    layer = [(Isometry.identity(n), [])]
    seen = {layer[0][0].key()}
    for _ in range(depth):
        next_layer = []
        for product, word in layer:
            for p, name in zip(pairings, pairing_names):
                q = product @ p
                key = q.key()
                if key in seen:
                    continue
                seen.add(key)
                word_q = word + [name]
                if key in wanted and witnesses[wanted[key]] is None:
                    witnesses[wanted[key]] = word_q
                next_layer.append((q, word_q))
        layer = next_layer
        if all(w is not None for w in witnesses.values()):
            break
    missing = [name for name, w in witnesses.items() if w is None]
    if missing:
        logger.info("Not expressible within depth %d: %s", depth, ", ".join(missing))
    return ExpressibilityReport(depth=depth, witnesses=witnesses)
