"""Selberg invariant and Busemann-Selberg functions.

Type 0 is tr(Y^-1 a) / tr(X^-1 a). Type k composes with the projection onto a
component Pi of dimension m = n - k:

    tr(Y^-1 a) * det(P^T Y^-1 P)^(-1/m)   divided by the same at X.

The expression is homogeneous of degree 0 in Y^-1, which lets the asymptotic
classifier feed it limits of (beta + eps Y)^-1 without renormalizing.
"""
import logging
import math
from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.core.matcore import (
    FROZEN,
    Isometry,
    Scalar,
    SpacePoint,
    SymMatrix,
    bareiss_det,
    congruence,
    exact_inverse,
    geodesic_distance,
    is_exact,
    parse_scalar,
    to_float,
)
from dsdomain.core.satake import (
    BoundaryComponent,
    SatakePoint,
    component_leq,
    component_of,
    intersection_dim,
    restrict,
)
from dsdomain.errors import BoundaryPointError, BusemannPreconditionError, DimensionMismatchError

logger = logging.getLogger(__name__)


class BusemannKind(str, Enum):
    TYPE0 = "type0"
    TYPEK = "typek"


class BusemannSpec(BaseModel):
    model_config = FROZEN

    kind: BusemannKind
    alpha: SatakePoint
    component: Optional[BoundaryComponent] = None
    reference: SpacePoint

    @field_validator("alpha", mode="before")
    @classmethod
    def _alpha(cls, value: Any) -> SatakePoint:
        if isinstance(value, SatakePoint):
            return value
        if isinstance(value, dict):
            return SatakePoint.model_validate(value)
        return SatakePoint.of(value)

    @model_validator(mode="after")
    def _check(self) -> "BusemannSpec":
        n = self.reference.n
        if self.alpha.n != n:
            raise DimensionMismatchError("alpha and reference differ in dimension")
        if not self.alpha.is_boundary():
            raise BusemannPreconditionError("alpha must be a boundary point")
        if self.kind == BusemannKind.TYPE0:
            if self.component is not None:
                raise BusemannPreconditionError("type-0 functions take no component")
            return self
        pi = self.component
        if pi is None:
            raise BusemannPreconditionError("type-k functions need a component")
        if pi.n != n or not 1 <= pi.dim <= n - 1:
            raise BusemannPreconditionError(f"component dimension must lie in 1..{n - 1}")
        if self.alpha.rank >= pi.dim:
            raise BusemannPreconditionError("rank(alpha) must be below dim(component)")
        if not component_leq(component_of(self.alpha), pi):
            raise BusemannPreconditionError("col(alpha) is not contained in the component")
        return self

    @property
    def n(self) -> int:
        return self.reference.n

    @property
    def k(self) -> int:
        return 0 if self.component is None else self.n - self.component.dim

    @property
    def m(self) -> int:
        """Dimension of the symmetric space the function effectively lives on"""
        return self.n - self.k


class HoroballSpec(BaseModel):
    model_config = FROZEN

    busemann: BusemannSpec
    level: Scalar
    closed: bool = True

    @field_validator("level", mode="before")
    @classmethod
    def _level(cls, value: Any) -> Scalar:
        level = parse_scalar(value)
        if level <= 0:
            raise ValueError("horoball level must be positive")
        return level

    @field_serializer("level")
    def _dump_level(self, level: Scalar) -> Union[str, float]:
        return str(level) if isinstance(level, Fraction) else level


def _trace(arr: np.ndarray) -> Any:
    return sum(arr[i, i] for i in range(arr.shape[0]))


def selberg(X: SpacePoint, Y: SpacePoint) -> Scalar:
    """tr(X^-1 Y); not symmetric in X and Y"""
    if X.n != Y.n:
        raise DimensionMismatchError(f"points of dimension {X.n} and {Y.n}")
    return _trace(X.inverse().entries.dot(Y.array))


def _inverse(point: SpacePoint) -> np.ndarray:
    if point.exact:
        return exact_inverse(point.array)
    return np.linalg.inv(point.to_float())


def _homogeneous(spec: BusemannSpec, z: np.ndarray) -> float:
    """tr(Z a) det(F^T Z F)^(-1/m) for Z standing in for Y^-1 (float)"""
    z = np.asarray(z, dtype=float)
    alpha = spec.alpha.matrix.to_float()
    tr = float(np.trace(z @ alpha))
    if spec.component is None:
        return tr
    frame = spec.component.frame
    det = float(np.linalg.det(frame.T @ z @ frame))
    return tr * det ** (-1.0 / spec.m)


def _ratio(spec: BusemannSpec, z: np.ndarray) -> float:
    return _homogeneous(spec, z) / _homogeneous(spec, _inverse(spec.reference).astype(float))


def busemann0(spec: BusemannSpec, Y: SpacePoint) -> Scalar:
    """tr(Y^-1 a) / tr(X^-1 a); exact for rational data"""
    if spec.kind != BusemannKind.TYPE0:
        raise BusemannPreconditionError("busemann0 needs a type-0 spec")
    if Y.n != spec.n:
        raise DimensionMismatchError("point and spec differ in dimension")
    if Y.exact and spec.alpha.exact and spec.reference.exact:
        num = _trace(exact_inverse(Y.array).dot(spec.alpha.array))
        den = _trace(exact_inverse(spec.reference.array).dot(spec.alpha.array))
        return num / den
    return _ratio(spec, _inverse(Y))


def busemann_k_power(spec: BusemannSpec, Y: SpacePoint) -> Scalar:
    """The m-th power of the type-k value, rational when all data is rational"""
    if spec.kind != BusemannKind.TYPEK:
        raise BusemannPreconditionError("busemann_k_power needs a type-k spec")
    pi = spec.component
    exact = Y.exact and spec.alpha.exact and spec.reference.exact and pi.exact

    def term(inv: np.ndarray) -> Scalar:
        tr = _trace(inv.dot(spec.alpha.array))
        block = restrict(pi, inv)
        det = bareiss_det(block) if exact else float(np.linalg.det(to_float(block)))
        return tr ** spec.m / det

    if exact:
        return term(exact_inverse(Y.array)) / term(exact_inverse(spec.reference.array))
    return float(term(_inverse(Y).astype(object))) / float(term(_inverse(spec.reference).astype(object)))


def busemann_k(spec: BusemannSpec, Y: SpacePoint) -> float:
    if spec.kind != BusemannKind.TYPEK:
        raise BusemannPreconditionError("busemann_k needs a type-k spec")
    if Y.n != spec.n:
        raise DimensionMismatchError("point and spec differ in dimension")
    return _ratio(spec, _inverse(Y))


def busemann_value(spec: BusemannSpec, Y: SpacePoint) -> Scalar:
    if spec.kind == BusemannKind.TYPE0:
        return busemann0(spec, Y)
    return busemann_k(spec, Y)


def classical_busemann_vertex(V: BoundaryComponent, X: SpacePoint, Y: SpacePoint) -> float:
    """Classical Busemann function at the vertex of type dim(V), by leading minors"""
    n, j = V.n, V.dim
    if not 1 <= j <= n - 1:
        raise BusemannPreconditionError("vertex subspace must be proper and nonzero")
    minor_y = restrict(V, _inverse(Y).astype(object) if not (Y.exact and V.exact) else exact_inverse(Y.array))
    minor_x = restrict(V, _inverse(X).astype(object) if not (X.exact and V.exact) else exact_inverse(X.array))
    ratio = _det(minor_y) / _det(minor_x)
    return math.sqrt(n / (j * (n - j))) * math.log(float(ratio))


def _det(block: np.ndarray) -> Scalar:
    return bareiss_det(block) if is_exact(block) else float(np.linalg.det(to_float(block)))


def decomposition_residual(spec: BusemannSpec, Y: SpacePoint) -> float:
    """log b - (sqrt((n-1)/n) b_v - sqrt(k/(n(n-k))) b_V) for a rank-one alpha"""
    n, k = spec.n, spec.k
    line = component_of(spec.alpha)
    value = float(busemann_value(spec, Y))
    rhs = math.sqrt((n - 1) / n) * classical_busemann_vertex(line, spec.reference, Y)
    if spec.component is not None:
        rhs -= math.sqrt(k / (n * (n - k))) * classical_busemann_vertex(spec.component, spec.reference, Y)
    return math.log(value) - rhs


def horoball_contains(h: HoroballSpec, Y: SpacePoint) -> bool:
    spec = h.busemann
    if spec.kind == BusemannKind.TYPEK and isinstance(h.level, Fraction):
        value = busemann_k_power(spec, Y)
        if isinstance(value, Fraction):
            bound = h.level ** spec.m
            return value <= bound if h.closed else value < bound
    value = busemann_value(spec, Y)
    return value <= h.level if h.closed else value < h.level


def lipschitz_margin(spec: BusemannSpec, Y1: SpacePoint, Y2: SpacePoint) -> float:
    """sqrt((m-1)/m) d(Y1,Y2) - |log b(Y1) - log b(Y2)|, m = n - k"""
    m = spec.m
    bound = math.sqrt((m - 1) / m) * geodesic_distance(Y1, Y2)
    diff = abs(math.log(float(busemann_value(spec, Y1))) - math.log(float(busemann_value(spec, Y2))))
    return bound - diff


def equivariance_holds(spec: BusemannSpec, g: Isometry, Y: SpacePoint) -> Optional[bool]:
    """b_{a,X}(Y) = b_{g.a,X}(g.Y), decided when tr(X^-1 a) = tr(X^-1 g.a); None otherwise"""
    if spec.kind != BusemannKind.TYPE0:
        raise BusemannPreconditionError("equivariance is stated for type-0 functions")
    x_inv = _inverse(spec.reference)
    moved = congruence(g, spec.alpha.array)
    before = _trace(x_inv.dot(spec.alpha.array))
    after = _trace(x_inv.dot(moved))
    if before != after:
        return None
    image = BusemannSpec(kind=BusemannKind.TYPE0, alpha=SatakePoint.of(moved), reference=spec.reference)
    gy = congruence(g, Y.array)
    lhs = busemann0(spec, Y)
    rhs = busemann0(image, SpacePoint(SymMatrix(gy)))
    return lhs == rhs if isinstance(lhs, Fraction) and isinstance(rhs, Fraction) else abs(lhs - rhs) <= 1e-10 * abs(lhs)


# ---------- ASYMPTOTICS ----------

class LimitTag(str, Enum):
    ZERO = "zero"
    INFINITY = "infinity"
    FINITE = "finite"


class AsymptoticLimit(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: LimitTag
    value: Optional[float] = None
    column: int
    samples: List[Tuple[float, float]] = Field(default_factory=list)
    consistent: bool = True
    diagnostic: Optional[str] = None


def limit_column(spec: BusemannSpec, beta: SatakePoint) -> int:
    """Column of the asymptotic table selected by exact column-space relations"""
    if not beta.is_boundary():
        raise BoundaryPointError("beta must be a boundary point")
    col_alpha = component_of(spec.alpha)
    col_beta = component_of(beta)
    if component_leq(col_alpha, col_beta):
        return 2 if component_leq(spec.component, col_beta) else 1
    return 3 if intersection_dim(col_beta, spec.component) == 0 else 4


def _limit_inverse(beta: SatakePoint, Y: SpacePoint, column: int) -> np.ndarray:
    b = beta.matrix.to_float()
    if column == 2:
        return np.linalg.pinv(b)
    w, v = np.linalg.eigh(b)
    kernel = v[:, w <= 1e-10 * max(1.0, float(np.abs(w).max()))]
    y = Y.to_float()
    return kernel @ np.linalg.inv(kernel.T @ y @ kernel) @ kernel.T


def path_value(spec: BusemannSpec, beta: SatakePoint, Y: SpacePoint, eps: float) -> float:
    """Value at beta + eps Y rescaled to determinant one"""
    m = beta.matrix.to_float() + eps * Y.to_float()
    sign, logdet = np.linalg.slogdet(m)
    m = m * math.exp(-logdet / spec.n)
    return _ratio(spec, np.linalg.inv(m))


def asymptotic_limit(
    spec: BusemannSpec,
    beta: SatakePoint,
    Y: SpacePoint,
    schedule: Optional[Sequence[float]] = None,
    settings: Settings = DEFAULT_SETTINGS,
) -> AsymptoticLimit:
    """Limit of the type-k function along beta + eps Y as eps -> 0+"""
    if spec.kind != BusemannKind.TYPEK:
        raise BusemannPreconditionError("asymptotic table is stated for type-k functions")
    schedule = list(schedule or settings.epsilon_schedule)
    column = limit_column(spec, beta)
    tag = {1: LimitTag.ZERO, 2: LimitTag.FINITE, 3: LimitTag.FINITE, 4: LimitTag.INFINITY}[column]
    value = _ratio(spec, _limit_inverse(beta, Y, column)) if tag == LimitTag.FINITE else None

    samples = [(eps, path_value(spec, beta, Y, eps)) for eps in schedule]
    first, last = samples[0][1], samples[-1][1]
    if tag == LimitTag.FINITE:
        consistent = abs(last - value) <= 1e-3 * max(abs(value), 1e-300)
    elif tag == LimitTag.ZERO:
        consistent = last < first
    else:
        consistent = last > first
    diagnostic = None
    if not consistent:
        diagnostic = f"numeric trend {first:.6g} -> {last:.6g} disagrees with column {column} ({tag.value})"
        logger.warning("Asymptotic cross-check failed: %s", diagnostic)
    return AsymptoticLimit(tag=tag, value=value, column=column, samples=samples,
                           consistent=consistent, diagnostic=diagnostic)


def contact_along_path(
    h: HoroballSpec,
    beta: SatakePoint,
    Y: SpacePoint,
    schedule: Optional[Sequence[float]] = None,
    settings: Settings = DEFAULT_SETTINGS,
) -> List[Tuple[float, float, bool]]:
    """(eps, value, inside) along beta + eps Y for each eps of the schedule"""
    if not beta.is_boundary():
        raise BoundaryPointError("beta must be a boundary point")
    level = float(h.level)
    out = []
    for eps in schedule or settings.epsilon_schedule:
        value = path_value(h.busemann, beta, Y, eps)
        out.append((eps, value, value <= level if h.closed else value < level))
    return out
