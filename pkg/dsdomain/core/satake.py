"""Standard Satake compactification: boundary points and components."""
import logging
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_serializer, model_validator

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.core.matcore import (
    FROZEN,
    Isometry,
    SpacePoint,
    SymMatrix,
    as_matrix,
    column_basis,
    congruence,
    eigh_checked,
    exact_rank,
    freeze,
    is_exact,
    is_pd_exact,
    psd_rank,
    to_float,
    to_literal,
)
from dsdomain.errors import (
    BoundaryPointError,
    DimensionMismatchError,
    MatrixLiteralError,
    ProjectionDomainError,
    ZeroMatrixError,
)

logger = logging.getLogger(__name__)


class Placement(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


class CompactificationClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: Placement
    k: Optional[int] = None
    n: int

    @model_validator(mode="after")
    def _check(self) -> "CompactificationClass":
        if self.tag == Placement.BOUNDARY:
            if self.k is None or not 1 <= self.k <= self.n - 1:
                raise ValueError(f"boundary type must lie in 1..{self.n - 1}")
        elif self.k is not None:
            raise ValueError("only boundary classes carry a type")
        return self

    def __str__(self) -> str:
        return f"BoundaryType({self.k})" if self.tag == Placement.BOUNDARY else self.tag.value.capitalize()


def _matrix_of(value: Any) -> np.ndarray:
    if isinstance(value, (SymMatrix, SatakePoint, SpacePoint)):
        return value.matrix.entries if not isinstance(value, SymMatrix) else value.entries
    return as_matrix(value)


def psd_profile(arr: np.ndarray, settings: Settings = DEFAULT_SETTINGS) -> Optional[int]:
    """Rank of a PSD matrix (exact when possible), None when not PSD"""
    if is_exact(arr):
        return psd_rank(arr)
    w, _ = eigh_checked(to_float(arr), settings)
    tol = settings.tolerances.spectral * max(1.0, float(np.abs(w).max()))
    if w.min() < -tol:
        return None
    return int((w > tol).sum())


def classify(matrix: Any, settings: Settings = DEFAULT_SETTINGS) -> CompactificationClass:
    """Interior, boundary of type rank, or outside the compactification"""
    arr = _matrix_of(matrix)
    n = arr.shape[0]
    if all(v == 0 for v in arr.flat):
        raise ZeroMatrixError("the zero matrix has no projective class")
    rank = psd_profile(arr, settings)
    if rank is None:
        return CompactificationClass(tag=Placement.OUTSIDE, n=n)
    if rank == n:
        return CompactificationClass(tag=Placement.INTERIOR, n=n)
    return CompactificationClass(tag=Placement.BOUNDARY, k=rank, n=n)


class SatakePoint(BaseModel):
    """Trace-one representative of a nonzero positive-semidefinite class"""
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
    def _check(self) -> "SatakePoint":
        arr = self.matrix.entries
        if all(v == 0 for v in arr.flat):
            raise ZeroMatrixError("Satake point must be nonzero")
        if psd_profile(arr) is None:
            raise BoundaryPointError("Satake point must be positive semidefinite")
        trace = self.matrix.trace()
        if self.matrix.exact and trace != 1:
            raise MatrixLiteralError(f"Satake point must have trace 1, got {trace}")
        if not self.matrix.exact and abs(trace - 1.0) > 1e-12:
            raise MatrixLiteralError(f"Satake point must have trace 1, got {trace!r}")
        return self

    @classmethod
    def of(cls, matrix: Any) -> "SatakePoint":
        """Normalize any nonzero PSD matrix to its trace-one representative"""
        arr = _matrix_of(matrix)
        trace = sum(arr[i, i] for i in range(arr.shape[0]))
        if trace == 0:
            raise ZeroMatrixError("nonzero PSD matrices have positive trace")
        return cls(SymMatrix(arr / trace))

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def array(self) -> np.ndarray:
        return self.matrix.entries

    @property
    def exact(self) -> bool:
        return self.matrix.exact

    @property
    def rank(self) -> int:
        return psd_profile(self.array)

    def is_boundary(self) -> bool:
        return self.rank < self.n

    def classify(self) -> CompactificationClass:
        return classify(self.matrix)


class BoundaryComponent(BaseModel):
    """Subspace V of R^n with a rational spanning basis and an orthonormal frame"""
    model_config = FROZEN

    basis: np.ndarray
    frame: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _prepare(cls, data: Any) -> Dict[str, Any]:
        if isinstance(data, BoundaryComponent):
            return {"basis": data.basis, "frame": data.frame}
        if not isinstance(data, dict):
            raise MatrixLiteralError("boundary component needs a span")
        if "span" in data:
            vectors = as_matrix(data["span"])
            basis = vectors.T
        elif "basis" in data:
            basis = as_matrix(data["basis"])
        else:
            raise MatrixLiteralError("boundary component needs a span")
        if basis.shape[1] == 0:
            raise DimensionMismatchError("boundary component must be nonzero")
        if is_exact(basis):
            basis = column_basis(basis)
        elif np.linalg.matrix_rank(to_float(basis)) != basis.shape[1]:
            raise DimensionMismatchError("spanning vectors are linearly dependent")
        q, _ = np.linalg.qr(to_float(basis))
        frame = data.get("frame")
        frame = q if frame is None else to_float(as_matrix(frame))
        return {"basis": freeze(basis), "frame": freeze(np.asarray(frame, dtype=float))}

    @model_validator(mode="after")
    def _check(self) -> "BoundaryComponent":
        k = self.basis.shape[1]
        if self.frame.shape != self.basis.shape:
            raise DimensionMismatchError("frame and spanning set differ in shape")
        tol = DEFAULT_SETTINGS.tolerances.frame
        if np.abs(self.frame.T @ self.frame - np.eye(k)).max() > 1e3 * tol:
            raise MatrixLiteralError("frame columns are not orthonormal")
        b = to_float(self.basis)
        if np.linalg.norm(b - self.frame @ (self.frame.T @ b)) > 1e-9 * max(1.0, np.linalg.norm(b)):
            raise MatrixLiteralError("frame does not span the component")
        return self

    @model_serializer
    def _dump(self) -> Dict[str, Any]:
        return {"span": to_literal(self.basis.T)}

    @classmethod
    def from_vectors(cls, vectors: Iterable[Any]) -> "BoundaryComponent":
        return cls(span=[list(v) for v in vectors])

    @classmethod
    def coordinate(cls, n: int, indices: Sequence[int]) -> "BoundaryComponent":
        """span(e_i for i in indices), zero-based"""
        return cls(span=[[Fraction(int(i == j)) for j in range(n)] for i in indices])

    def with_frame(self, frame: np.ndarray) -> "BoundaryComponent":
        return BoundaryComponent(basis=self.basis, frame=frame)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def exact(self) -> bool:
        return is_exact(self.basis)

    def same_as(self, other: "BoundaryComponent") -> bool:
        return component_leq(self, other) and component_leq(other, self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BoundaryComponent) and self.same_as(other)

    def __hash__(self) -> int:
        return hash((self.n, self.dim))


def component_of(alpha: SatakePoint, settings: Settings = DEFAULT_SETTINGS) -> BoundaryComponent:
    """Column space of a boundary point"""
    cls = classify(alpha.matrix, settings)
    if cls.tag != Placement.BOUNDARY:
        raise BoundaryPointError(f"expected a boundary point, got {cls}")
    if alpha.exact:
        return BoundaryComponent(basis=column_basis(alpha.array))
    w, v = eigh_checked(alpha.matrix.to_float(), settings)
    keep = v[:, w > settings.tolerances.spectral * max(1.0, float(np.abs(w).max()))]
    return BoundaryComponent(basis=keep.astype(object))


def component_leq(W: BoundaryComponent, V: BoundaryComponent) -> bool:
    """span(W) is contained in span(V)"""
    if W.n != V.n:
        raise DimensionMismatchError("components live in different dimensions")
    if W.exact and V.exact:
        return exact_rank(np.hstack([V.basis, W.basis])) == V.dim
    residual = W.frame - V.frame @ (V.frame.T @ W.frame)
    return float(np.linalg.norm(residual)) <= 1e-9


def intersection_dim(V: BoundaryComponent, W: BoundaryComponent) -> int:
    if V.exact and W.exact:
        joint = exact_rank(np.hstack([V.basis, W.basis]))
    else:
        joint = int(np.linalg.matrix_rank(np.hstack([V.frame, W.frame]), tol=1e-9))
    return V.dim + W.dim - joint


def restrict(V: BoundaryComponent, matrix: Any) -> np.ndarray:
    """B^T M B on the rational spanning set (exact for rational data)"""
    arr = _matrix_of(matrix)
    if arr.shape[0] != V.n:
        raise DimensionMismatchError("component and matrix differ in dimension")
    return V.basis.T.dot(arr).dot(V.basis)


def _exact_frame(V: BoundaryComponent) -> Optional[np.ndarray]:
    """The rational basis with the frame's column signs, when it equals the frame"""
    if not V.exact:
        return None
    k = V.dim
    gram = V.basis.T.dot(V.basis)
    if any(gram[i, j] != (1 if i == j else 0) for i in range(k) for j in range(k)):
        return None
    signs = np.sign(np.sum(to_float(V.basis) * V.frame, axis=0))
    exact = V.basis * np.array([Fraction(int(s) or 1) for s in signs], dtype=object)
    if not np.allclose(to_float(exact), V.frame, atol=1e-12):
        return None
    return exact


def project(V: BoundaryComponent, matrix: Any) -> SpacePoint:
    """pi_V: frame^T M frame rescaled to determinant one, a point of X_k

    Stays exact when M is exact and the frame is an orthonormal rational basis.
    """
    arr = _matrix_of(matrix)
    if arr.shape[0] != V.n:
        raise DimensionMismatchError("component and matrix differ in dimension")
    frame = _exact_frame(V) if is_exact(arr) else None
    if frame is not None:
        block = frame.T.dot(arr).dot(frame)
        if not is_pd_exact(block):
            raise ProjectionDomainError("projected block is not positive definite")
        return SpacePoint.normalize(SymMatrix(block))
    block = V.frame.T @ to_float(arr) @ V.frame
    block = (block + block.T) / 2
    try:
        np.linalg.cholesky(block)
    except np.linalg.LinAlgError as e:
        raise ProjectionDomainError("projected block is not positive definite") from e
    return SpacePoint.normalize(SymMatrix(block.astype(object)))


def act_on_boundary(g: Isometry, alpha: SatakePoint) -> SatakePoint:
    return SatakePoint.of(congruence(g, alpha.array))


def image_component(g: Isometry, V: BoundaryComponent) -> BoundaryComponent:
    """g^T V, the column space of g^T alpha g when alpha spans V"""
    if g.n != V.n:
        raise DimensionMismatchError("isometry and component differ in dimension")
    return BoundaryComponent(basis=g.matrix.T.dot(V.basis))
