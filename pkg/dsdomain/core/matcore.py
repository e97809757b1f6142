"""Scalars, symmetric matrices and the SL(n) action on the space of
positive-definite, determinant-one symmetric matrices.

Exact data is carried as numpy object arrays of ``fractions.Fraction``; float
data as float entries in the same object layout (or plain float64 arrays in
the spectral helpers). Mixing the two promotes to float, which is what
Fraction/float arithmetic does natively.
"""
import logging
import math
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer, field_validator, model_validator

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.errors import (
    DeterminantError,
    DimensionMismatchError,
    MatrixLiteralError,
    NotPositiveDefiniteError,
    SingularMatrixError,
    SpectralError,
)

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]

FROZEN = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# ---------- SCALARS AND LITERALS ----------

def parse_scalar(value: Any) -> Scalar:
    """Turn a literal entry into a Fraction (exact) or a float"""
    if isinstance(value, bool):
        raise MatrixLiteralError(f"boolean is not a matrix entry: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise MatrixLiteralError(f"non-finite entry {value!r}")
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise MatrixLiteralError(f"cannot parse {value!r} as a rational") from e
    raise MatrixLiteralError(f"unsupported entry type {type(value).__name__}")


def as_matrix(literal: Any) -> np.ndarray:
    """Parse a 2-d literal (nested lists or an array) into an object array of scalars"""
    if isinstance(literal, SymMatrix):
        return literal.entries.copy()
    arr = np.array(literal, dtype=object)
    if arr.ndim != 2:
        raise MatrixLiteralError(f"expected a 2-d matrix literal, got {arr.ndim} dimension(s)")
    out = np.empty(arr.shape, dtype=object)
    for idx, value in np.ndenumerate(arr):
        out[idx] = parse_scalar(value)
    return out


def as_vector(literal: Any) -> np.ndarray:
    arr = np.array(literal, dtype=object)
    if arr.ndim != 1:
        raise MatrixLiteralError("expected a vector literal")
    return np.array([parse_scalar(v) for v in arr], dtype=object)


def to_literal(arr: np.ndarray) -> List[Any]:
    """Inverse of as_matrix / as_vector: exact entries become "p/q" strings"""
    if arr.ndim == 1:
        return [str(v) if isinstance(v, Fraction) else float(v) for v in arr]
    return [to_literal(row) for row in arr]


def is_exact(arr: np.ndarray) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in np.asarray(arr, dtype=object).flat)


def to_float(arr: np.ndarray) -> np.ndarray:
    return np.asarray(arr, dtype=object).astype(float)


def freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def identity(n: int) -> np.ndarray:
    return np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)


def symmetrize(arr: np.ndarray) -> np.ndarray:
    """Mirror the upper triangle onto the lower one (float results of congruences)"""
    out = np.array(arr, dtype=object)
    n = out.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            out[j, i] = out[i, j]
    return out


def matrix_key(arr: np.ndarray) -> Tuple[str, ...]:
    """Hashable identity of an exact matrix"""
    return tuple(str(v) for v in np.asarray(arr, dtype=object).flat)


def proportional(a: np.ndarray, b: np.ndarray) -> bool:
    """Exact test b = c*a for some c > 0"""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.shape != b.shape:
        return False
    nonzero = [idx for idx, v in np.ndenumerate(a) if v != 0]
    if not nonzero:
        return not any(v != 0 for v in b.flat)
    ratio = Fraction(b[nonzero[0]]) / Fraction(a[nonzero[0]])
    if ratio <= 0:
        return False
    return bool(np.all(b == a * ratio))


def radical_inverse(index: int, base: int) -> Fraction:
    """Van der Corput point of index in the given base, as an exact rational"""
    result = Fraction(0)
    scale = Fraction(1, base)
    while index > 0:
        index, digit = divmod(index, base)
        result += digit * scale
        scale /= base
    return result


def primitive_integer(arr: np.ndarray) -> np.ndarray:
    """Positive rescaling of a rational array to coprime integer entries"""
    values = [Fraction(v) for v in np.asarray(arr, dtype=object).flat]
    lcm = reduce(lambda x, y: x * y // math.gcd(x, y), (v.denominator for v in values), 1)
    ints = [int(v * lcm) for v in values]
    g = reduce(math.gcd, (abs(i) for i in ints), 0)
    if g == 0:
        return np.array(arr, dtype=object)
    out = np.array([Fraction(i // g) for i in ints], dtype=object)
    return out.reshape(np.shape(arr))


# ---------- EXACT KERNELS ----------

def _fractions(matrix: np.ndarray) -> np.ndarray:
    arr = np.array(matrix, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, float):
            raise TypeError("exact kernel called with float data")
        out[idx] = Fraction(v)
    return out


def row_reduce(matrix: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form over the rationals; returns (rref, pivot columns)"""
    m = _fractions(matrix)
    if m.ndim != 2:
        raise DimensionMismatchError("row_reduce needs a 2-d array")
    n_rows, n_cols = m.shape
    pivots: List[int] = []
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            break
        i_row = next((i for i in range(piv_r, n_rows) if m[i, piv_c] != 0), None)
        if i_row is None:
            continue
        if i_row != piv_r:
            m[[piv_r, i_row]] = m[[i_row, piv_r]]
        m[piv_r] = m[piv_r] / m[piv_r, piv_c]
        for r in range(n_rows):
            if r != piv_r and m[r, piv_c] != 0:
                m[r] = m[r] - m[r, piv_c] * m[piv_r]
        pivots.append(piv_c)
        piv_r += 1
    return m, pivots


def exact_rank(matrix: np.ndarray) -> int:
    arr = np.asarray(matrix, dtype=object)
    if arr.size == 0:
        return 0
    return len(row_reduce(arr)[1])


def column_basis(matrix: np.ndarray) -> np.ndarray:
    """Independent columns of matrix spanning its column space"""
    arr = _fractions(matrix)
    _, pivots = row_reduce(arr)
    return arr[:, pivots]


def row_basis(matrix: np.ndarray) -> np.ndarray:
    rref, pivots = row_reduce(matrix)
    return rref[: len(pivots)]


def nullspace(matrix: np.ndarray) -> np.ndarray:
    """Basis of {x : Mx = 0} as the columns of the returned array"""
    arr = _fractions(matrix)
    n_cols = arr.shape[1]
    rref, pivots = row_reduce(arr)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        x = np.array([Fraction(0)] * n_cols, dtype=object)
        x[f] = Fraction(1)
        for r, p in enumerate(pivots):
            x[p] = -rref[r, f]
        basis.append(x)
    if not basis:
        return np.empty((n_cols, 0), dtype=object)
    return np.array(basis, dtype=object).T


def bareiss_det(matrix: np.ndarray) -> Fraction:
    """Fraction-free (Bareiss) elimination determinant"""
    a = _fractions(matrix)
    n = a.shape[0]
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k, k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i, k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[[k, swap]] = a[[swap, k]]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i, j] = (a[i, j] * a[k, k] - a[i, k] * a[k, j]) / prev
        prev = a[k, k]
    return sign * a[n - 1, n - 1]


def solve_exact(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """X with A X = B for square invertible A; B may be a vector or a matrix"""
    a = _fractions(matrix)
    n = a.shape[0]
    b = _fractions(rhs)
    column = b.ndim == 1
    b = b.reshape(n, -1)
    rref, pivots = row_reduce(np.hstack([a, b]))
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is not invertible")
    out = rref[:, n:]
    return out[:, 0] if column else out


def exact_inverse(matrix: np.ndarray) -> np.ndarray:
    return solve_exact(matrix, identity(len(matrix)))


def psd_rank(matrix: np.ndarray) -> Optional[int]:
    """Rank of an exact symmetric matrix if it is positive semidefinite, else None"""
    a = _fractions(matrix)
    n = a.shape[0]
    rank = 0
    for i in range(n):
        d = a[i, i]
        if d < 0:
            return None
        if d == 0:
            if any(a[i, j] != 0 for j in range(i + 1, n)):
                return None
            continue
        rank += 1
        for j in range(i + 1, n):
            f = a[j, i] / d
            if f != 0:
                for c in range(i, n):
                    a[j, c] -= f * a[i, c]
    return rank


def is_pd_exact(matrix: np.ndarray) -> bool:
    """All leading principal minors positive"""
    a = np.asarray(matrix, dtype=object)
    return all(bareiss_det(a[:k, :k]) > 0 for k in range(1, a.shape[0] + 1))


def exact_root(value: Fraction, n: int) -> Optional[Fraction]:
    """Positive rational n-th root of value when one exists"""
    if value <= 0:
        return None

    def iroot(m: int) -> Optional[int]:
        # integer Newton from above; x ends at floor(m^(1/n))
        if m < 2:
            return m
        x = 1 << -(-m.bit_length() // n)
        while True:
            y = ((n - 1) * x + m // x ** (n - 1)) // n
            if y >= x:
                break
            x = y
        return x if x ** n == m else None

    p, q = iroot(value.numerator), iroot(value.denominator)
    if p is None or q is None:
        return None
    return Fraction(p, q)


# ---------- FLOAT KERNELS ----------

def spectrum(matrix: Any, settings: Settings = DEFAULT_SETTINGS) -> List[float]:
    """Eigenvalues of a symmetric matrix in descending order, residual-checked"""
    arr = to_float(_entries(matrix))
    try:
        w, v = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as e:
        raise SpectralError(f"eigenvalue solve did not converge: {e}") from e
    scale = np.linalg.norm(arr)
    if scale > 0:
        residual = float(np.linalg.norm(arr @ v - v * w, axis=0).max())
        if residual > settings.tolerances.spectral * scale:
            raise SpectralError("eigenpair residual above tolerance", residual)
    return sorted((float(x) for x in w), reverse=True)


def eigh_checked(arr: np.ndarray, settings: Settings = DEFAULT_SETTINGS) -> Tuple[np.ndarray, np.ndarray]:
    try:
        w, v = np.linalg.eigh(np.asarray(arr, dtype=float))
    except np.linalg.LinAlgError as e:
        raise SpectralError(f"eigenvalue solve did not converge: {e}") from e
    return w, v


def _entries(matrix: Any) -> np.ndarray:
    if isinstance(matrix, SpacePoint):
        return matrix.array
    if isinstance(matrix, SymMatrix):
        return matrix.entries
    if isinstance(matrix, Isometry):
        return matrix.matrix
    return np.asarray(matrix, dtype=object)


# ---------- VALUE TYPES ----------

class SymMatrix(BaseModel):
    model_config = FROZEN

    entries: np.ndarray

    def __init__(self, entries: Any = None, **data: Any) -> None:
        if entries is not None:
            data["entries"] = entries
        super().__init__(**data)

    @field_validator("entries", mode="before")
    @classmethod
    def _parse(cls, value: Any) -> np.ndarray:
        arr = as_matrix(value)
        n, m = arr.shape
        if n != m:
            raise DimensionMismatchError(f"symmetric matrix must be square, got {n}x{m}")
        for i in range(n):
            for j in range(i + 1, n):
                upper, lower = arr[i, j], arr[j, i]
                if upper == lower:
                    continue
                if isinstance(upper, float) or isinstance(lower, float):
                    if abs(upper - lower) <= 1e-9 * max(1.0, abs(upper)):
                        arr[j, i] = upper
                        continue
                raise MatrixLiteralError(f"matrix is not symmetric at ({i},{j})")
        return freeze(arr)

    @field_serializer("entries")
    def _dump(self, arr: np.ndarray) -> List[Any]:
        return to_literal(arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.entries)

    def to_float(self) -> np.ndarray:
        return to_float(self.entries)

    def trace(self) -> Scalar:
        return sum(self.entries[i, i] for i in range(self.n))

    def det(self) -> Scalar:
        if self.exact:
            return bareiss_det(self.entries)
        return float(np.linalg.det(self.to_float()))

    def inverse(self) -> "SymMatrix":
        if self.exact:
            return SymMatrix(exact_inverse(self.entries))
        try:
            inv = np.linalg.inv(self.to_float())
        except np.linalg.LinAlgError as e:
            raise SingularMatrixError(str(e)) from e
        return SymMatrix(symmetrize(inv))

    def scaled(self, factor: Scalar) -> "SymMatrix":
        return SymMatrix(self.entries * factor)

    def same_as(self, other: "SymMatrix") -> bool:
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    def key(self) -> Tuple[str, ...]:
        return matrix_key(self.entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SymMatrix) and self.same_as(other)

    def __hash__(self) -> int:
        return hash(self.key())


class SpacePoint(BaseModel):
    model_config = FROZEN

    matrix: SymMatrix

    def __init__(self, matrix: Any = None, **data: Any) -> None:
        if matrix is not None:
            data["matrix"] = matrix
        super().__init__(**data)

    @field_validator("matrix", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> SymMatrix:
        if isinstance(value, SpacePoint):
            return value.matrix
        if isinstance(value, SymMatrix):
            return value
        if isinstance(value, dict):
            return SymMatrix.model_validate(value)
        return SymMatrix(value)

    @model_validator(mode="after")
    def _check(self) -> "SpacePoint":
        m = self.matrix
        if m.exact:
            if not is_pd_exact(m.entries):
                raise NotPositiveDefiniteError("point is not positive definite")
            if m.det() != 1:
                raise DeterminantError(f"point has determinant {m.det()}, expected 1")
        else:
            try:
                np.linalg.cholesky(m.to_float())
            except np.linalg.LinAlgError as e:
                raise NotPositiveDefiniteError("point is not positive definite") from e
            det = m.det()
            if abs(det - 1.0) > DEFAULT_SETTINGS.tolerances.det * max(1.0, m.n):
                raise DeterminantError(f"point has determinant {det!r}, expected 1")
        return self

    @classmethod
    def normalize(cls, matrix: Any) -> "SpacePoint":
        """Rescale a positive-definite matrix to determinant one"""
        m = matrix if isinstance(matrix, SymMatrix) else SymMatrix(matrix)
        if m.exact:
            if not is_pd_exact(m.entries):
                raise NotPositiveDefiniteError("cannot normalize a matrix that is not positive definite")
            root = exact_root(m.det(), m.n)
            if root is not None:
                return cls(SymMatrix(m.entries / root))
        arr = m.to_float()
        sign, logdet = np.linalg.slogdet(arr)
        if sign <= 0:
            raise NotPositiveDefiniteError("cannot normalize a matrix that is not positive definite")
        return cls(SymMatrix(symmetrize(arr * math.exp(-logdet / m.n))))

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def array(self) -> np.ndarray:
        return self.matrix.entries

    @property
    def exact(self) -> bool:
        return self.matrix.exact

    def to_float(self) -> np.ndarray:
        return self.matrix.to_float()

    def inverse(self) -> SymMatrix:
        return self.matrix.inverse()


class Isometry(BaseModel):
    model_config = FROZEN

    matrix: np.ndarray

    def __init__(self, matrix: Any = None, **data: Any) -> None:
        if matrix is not None:
            data["matrix"] = matrix
        super().__init__(**data)

    @field_validator("matrix", mode="before")
    @classmethod
    def _parse(cls, value: Any) -> np.ndarray:
        if isinstance(value, Isometry):
            return value.matrix
        arr = as_matrix(value)
        if arr.shape[0] != arr.shape[1]:
            raise DimensionMismatchError("isometry must be square")
        if is_exact(arr):
            det = bareiss_det(arr)
            if det != 1:
                raise DeterminantError(f"isometry has determinant {det}, expected 1")
        else:
            det = float(np.linalg.det(to_float(arr)))
            if abs(det - 1.0) > DEFAULT_SETTINGS.tolerances.det * 1e3:
                raise DeterminantError(f"isometry has determinant {det!r}, expected 1")
        return freeze(arr)

    @field_serializer("matrix")
    def _dump(self, arr: np.ndarray) -> List[Any]:
        return to_literal(arr)

    @classmethod
    def identity(cls, n: int) -> "Isometry":
        return cls(identity(n))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.matrix)

    def inverse(self) -> "Isometry":
        if self.exact:
            return Isometry(exact_inverse(self.matrix))
        return Isometry(np.linalg.inv(to_float(self.matrix)).astype(object))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        if self.n != other.n:
            raise DimensionMismatchError(f"cannot compose {self.n}x{self.n} with {other.n}x{other.n}")
        return Isometry(self.matrix.dot(other.matrix))

    def is_identity(self) -> bool:
        return bool(np.all(self.matrix == identity(self.n)))

    def same_as(self, other: "Isometry") -> bool:
        return self.n == other.n and bool(np.all(self.matrix == other.matrix))

    def key(self) -> Tuple[str, ...]:
        return matrix_key(self.matrix)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Isometry) and self.same_as(other)

    def __hash__(self) -> int:
        return hash(self.key())


class IsometryWord(BaseModel):
    """Word g1 g2 ... gm; acting on points it applies g1 first"""
    model_config = FROZEN

    letters: List[Isometry]
    names: List[str] = []
    n: Optional[int] = None

    @model_validator(mode="after")
    def _check(self) -> "IsometryWord":
        if self.names and len(self.names) != len(self.letters):
            raise MatrixLiteralError("names and letters differ in length")
        dims = {g.n for g in self.letters}
        if self.n is not None:
            dims.add(self.n)
        if len(dims) > 1:
            raise DimensionMismatchError(f"letters of mixed dimensions {sorted(dims)}")
        if not dims:
            raise DimensionMismatchError("empty word needs an explicit dimension")
        return self

    @property
    def dim(self) -> int:
        return self.n if self.n is not None else self.letters[0].n

    def product(self) -> Isometry:
        """Left-to-right evaluation of the letters"""
        return reduce(lambda acc, g: acc @ g, self.letters, Isometry.identity(self.dim))

    def inverse(self) -> "IsometryWord":
        names = [_invert_name(s) for s in reversed(self.names)]
        return IsometryWord(letters=[g.inverse() for g in reversed(self.letters)], names=names, n=self.dim)

    def power(self, m: int) -> "IsometryWord":
        return IsometryWord(letters=self.letters * m, names=self.names * m, n=self.dim)

    def label(self) -> str:
        return " ".join(self.names) if self.names else f"<{len(self.letters)} letters>"

    def __len__(self) -> int:
        return len(self.letters)


def _invert_name(name: str) -> str:
    return name[: -len("^-1")] if name.endswith("^-1") else f"{name}^-1"


# ---------- ACTION AND METRIC ----------

def congruence(g: Union[Isometry, np.ndarray], matrix: Any) -> np.ndarray:
    """Raw g^T M g for any square M"""
    gm = g.matrix if isinstance(g, Isometry) else np.asarray(g, dtype=object)
    m = _entries(matrix)
    if gm.shape[0] != m.shape[0]:
        raise DimensionMismatchError(f"cannot act by {gm.shape[0]}x{gm.shape[0]} on {m.shape[0]}x{m.shape[0]}")
    return gm.T.dot(m).dot(gm)


def act(g: Isometry, X: SpacePoint) -> SpacePoint:
    """g.X = g^T X g"""
    result = congruence(g, X)
    if is_exact(result):
        return SpacePoint(SymMatrix(result))
    return SpacePoint.normalize(SymMatrix(symmetrize(result)))


def geodesic_distance(X: SpacePoint, Y: SpacePoint, settings: Settings = DEFAULT_SETTINGS) -> float:
    """Riemannian distance: sqrt of the summed squared logs of the spectrum of X^-1 Y"""
    if X.n != Y.n:
        raise DimensionMismatchError(f"points of dimension {X.n} and {Y.n}")
    x, y = X.to_float(), Y.to_float()
    try:
        chol = np.linalg.cholesky(x)
        w = np.linalg.solve(chol, y)
        w = np.linalg.solve(chol, w.T).T
    except np.linalg.LinAlgError as e:
        raise SpectralError(f"cholesky solve failed: {e}") from e
    lam, vec = eigh_checked((w + w.T) / 2, settings)
    residual = float(np.linalg.norm(w @ vec - vec * lam, axis=0).max())
    if residual > settings.tolerances.spectral * max(1.0, float(np.linalg.norm(w))):
        raise SpectralError("distance spectrum residual above tolerance", residual)
    if lam.min() <= 0:
        raise SpectralError("non-positive eigenvalue in X^-1 Y", float(lam.min()))
    return float(math.sqrt(sum(math.log(v) ** 2 for v in lam)))

