"""Riemannian dihedral angles between hyperplanes of P(Sym_n).

Normals are taken oriented toward the domain, so every reported angle is the
interior one: pi minus the arccos of the Gram cosine in the inner product
<A1, A2> = tr(X A1 X A2).
"""
import logging
import math
from fractions import Fraction
from typing import TYPE_CHECKING, Any, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.core.matcore import (
    SpacePoint,
    SymMatrix,
    as_matrix,
    congruence,
    proportional,
    radical_inverse,
)
from dsdomain.core.satake import BoundaryComponent, SatakePoint
from dsdomain.errors import (
    BoundaryPointError,
    CycleClosureError,
    DegenerateWedgeError,
    ExactnessViolationError,
    IncidenceError,
    TransversalityError,
)
from dsdomain.polyhedra.polytope import HalfSpaceSpec, HyperplaneNormal, ProjPolytope

if TYPE_CHECKING:
    from dsdomain.poincare.domain import DomainWithPairing, RidgeCycle

logger = logging.getLogger(__name__)


def _normal_array(normal: Any) -> np.ndarray:
    if isinstance(normal, HyperplaneNormal):
        return normal.matrix.to_float()
    if isinstance(normal, HalfSpaceSpec):
        return normal.normal.to_float()
    if isinstance(normal, SymMatrix):
        return normal.to_float()
    return np.asarray(as_matrix(normal), dtype=float)


def _wedge_angle(x: np.ndarray, shared: Sequence[np.ndarray], b1: np.ndarray, b2: np.ndarray,
                 settings: Settings) -> float:
    tol = settings.tolerances.incidence
    for normal in list(shared) + [b1, b2]:
        scale = max(1.0, float(np.linalg.norm(normal) * np.linalg.norm(x)))
        if abs(float(np.trace(normal @ x))) > tol * scale:
            raise IncidenceError("point does not lie on every hyperplane of the wedge")

    def inner(p: np.ndarray, q: np.ndarray) -> float:
        return float(np.trace(x @ p @ x @ q))

    basis: List[np.ndarray] = []
    for a in shared:
        for e in basis:
            a = a - inner(a, e) * e
        norm = inner(a, a)
        if norm <= 1e-24:
            raise DegenerateWedgeError("shared normals are linearly dependent")
        basis.append(a / math.sqrt(norm))

    projected = []
    for b in (b1, b2):
        for e in basis:
            b = b - inner(b, e) * e
        norm = inner(b, b)
        if norm <= 1e-24:
            raise DegenerateWedgeError("normal lies in the span of the shared normals")
        projected.append(b / math.sqrt(norm))

    cos = inner(projected[0], projected[1])
    if abs(cos) >= 1 - 1e-12:
        raise DegenerateWedgeError(f"the two hyperplanes coincide along the wedge (cos={cos:.15f})")
    return math.pi - math.acos(cos)


def dihedral_angle(X: SpacePoint, shared: Sequence[Any], B: Any, B2: Any,
                   settings: Settings = DEFAULT_SETTINGS) -> float:
    """Interior angle at X between the planes spanned with B and with B2, in (0, pi)"""
    return _wedge_angle(X.to_float(), [_normal_array(a) for a in shared],
                        _normal_array(B), _normal_array(B2), settings)


def angle_limit(alpha: SatakePoint, pi: BoundaryComponent, shared: Sequence[Any], B: Any, B2: Any,
                settings: Settings = DEFAULT_SETTINGS) -> float:
    """Limit of the dihedral angle at alpha + eps Y, read off in the component X_m of pi"""
    frame = pi.frame
    alpha0 = frame.T @ alpha.matrix.to_float() @ frame
    alpha0 = (alpha0 + alpha0.T) / 2
    try:
        np.linalg.cholesky(alpha0)
    except np.linalg.LinAlgError as e:
        raise BoundaryPointError("alpha is not an interior point of the component") from e

    def project(normal: Any) -> np.ndarray:
        block = frame.T @ _normal_array(normal) @ frame
        return (block + block.T) / 2

    try:
        return _wedge_angle(alpha0, [project(a) for a in shared], project(B), project(B2), settings)
    except IncidenceError:
        raise
    except DegenerateWedgeError as e:
        raise TransversalityError(f"component is not transverse to the planes: {e}") from e


# ---------- ANGLE SUMS ----------

class AngleSumReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    sums: List[float] = Field(default_factory=list)
    turns: List[int] = Field(default_factory=list)
    order: Optional[int] = None
    message: Optional[str] = None
    invariant_angle_question: bool = False

    @computed_field
    @property
    def ok(self) -> bool:
        return self.order is not None


def infer_order(sums: Sequence[float], settings: Settings = DEFAULT_SETTINGS) -> Optional[int]:
    """The k in 1..max_order with every sum within tolerance of 2 pi / k"""
    if not sums:
        return None
    tol = settings.tolerances.angle
    matches = [
        k for k in range(1, settings.max_order + 1)
        if all(abs(s - 2 * math.pi / k) <= tol for s in sums)
    ]
    return matches[0] if len(matches) == 1 else None


def _primes(count: int) -> List[int]:
    out: List[int] = []
    candidate = 2
    while len(out) < count:
        if all(candidate % p for p in out):
            out.append(candidate)
        candidate += 1
    return out


def ridge_samples(P: ProjPolytope, ridge: int, count: int) -> List[np.ndarray]:
    """Rational interior points of a face: vertex combinations with Halton weights"""
    vertices = [P.vertices[v].entries for v in P.faces[ridge].vertices]
    bases = _primes(len(vertices))
    samples = []
    for i in range(1, count + 1):
        weights = [1 + radical_inverse(i, b) for b in bases]
        total = sum(weights, Fraction(0))
        samples.append(sum(w * v for w, v in zip(weights, vertices)) / total)
    return samples


def _on_ridge(d: "DomainWithPairing", ridge: int, x: np.ndarray) -> List[int]:
    facets = d.facets_of(ridge)
    for f in facets:
        if HalfSpaceSpec(normal=d.normal(f)).value_at(x) != 0:
            raise ExactnessViolationError(f"transported point left ridge {ridge}")
    return facets


def _orbit_sum(cycle: "RidgeCycle", d: "DomainWithPairing", x0: np.ndarray, settings: Settings) -> tuple:
    x = x0
    total = 0.0
    for turn in range(1, settings.max_order + 1):
        for ridge, letter in zip(cycle.ridges, cycle.word.letters):
            facets = _on_ridge(d, ridge, x)
            point = SpacePoint.normalize(SymMatrix(x))
            total += dihedral_angle(point, [], d.normal(facets[0]), d.normal(facets[1]), settings)
            x = congruence(letter, x)
        if proportional(x0, x):
            return total, turn
    raise CycleClosureError(f"sample point did not return within {settings.max_order} turns")


def angle_sum(cycle: "RidgeCycle", d: "DomainWithPairing", sample_count: Optional[int] = None,
              settings: Settings = DEFAULT_SETTINGS) -> AngleSumReport:
    """Dihedral angle sums over the point orbits of sampled ridge points"""
    count = sample_count or settings.samples_per_ridge
    sums, turns = [], []
    for x0 in ridge_samples(d.polytope, cycle.ridges[0], count):
        total, turn = _orbit_sum(cycle, d, x0, settings)
        sums.append(total)
        turns.append(turn)
    order = infer_order(sums, settings)
    if order is not None:
        logger.debug("Cycle of %d ridges: angle sum 2pi/%d", len(cycle), order)
        return AngleSumReport(sums=sums, turns=turns, order=order)

    message = (
        f"angle sums in [{min(sums):.9f}, {max(sums):.9f}] match no 2pi/k for k <= {settings.max_order}; "
        "the Riemannian form of the ridge condition fails here, an invariant angle function may still hold"
    )
    logger.warning("Angle sum deviation: %s", message)
    return AngleSumReport(sums=sums, turns=turns, message=message, invariant_angle_question=True)
