import logging
from fractions import Fraction
from typing import FrozenSet, List, Sequence, Tuple

import numpy as np

from dsdomain.core.matcore import (
    exact_inverse,
    exact_rank,
    nullspace,
    primitive_integer,
    row_basis,
)

logger = logging.getLogger(__name__)


# ---------- COORDINATES ON Sym_n ----------

def sym_pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym_coords(matrix: np.ndarray) -> np.ndarray:
    """Upper-triangular entries of a symmetric matrix"""
    n = matrix.shape[0]
    return np.array([matrix[i, j] for i, j in sym_pairs(n)], dtype=object)


def pairing_row(matrix: np.ndarray) -> np.ndarray:
    """Row r(A) with r(A) . sym_coords(Y) = tr(A Y)"""
    n = matrix.shape[0]
    return np.array([matrix[i, j] if i == j else 2 * matrix[i, j] for i, j in sym_pairs(n)], dtype=object)


def from_coords(coords: Sequence, n: int) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    for value, (i, j) in zip(coords, sym_pairs(n)):
        out[i, j] = value
        out[j, i] = value
    return out


def coord_dim(n: int) -> int:
    return n * (n + 1) // 2


# ---------- DOUBLE DESCRIPTION ----------

def _zero_set(rows: np.ndarray, ray: np.ndarray, indices: Sequence[int]) -> FrozenSet[int]:
    return frozenset(i for i in indices if rows[i].dot(ray) == 0)


def _adjacent(p: int, q: int, zero_sets: List[FrozenSet[int]], rank: int) -> bool:
    common = zero_sets[p] & zero_sets[q]
    if len(common) < rank - 2:
        return False
    return not any(common <= zero_sets[t] for t in range(len(zero_sets)) if t != p and t != q)


def extreme_rays(rows: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    """Generators of the cone {x : rows . x >= 0} over the rationals.

    Returns the extreme rays of the pointed part (primitive integer vectors in
    the row space of rows) and a basis of the lineality space as columns.
    """
    rows = np.asarray(rows, dtype=object)
    d = rows.shape[1]
    lineality = nullspace(rows) if rows.shape[0] else np.array(np.eye(d, dtype=int), dtype=object)
    if rows.shape[0] == 0 or exact_rank(rows) == 0:
        return [], lineality

    span = row_basis(rows)
    r = span.shape[0]
    reduced = rows.dot(span.T)

    chosen: List[int] = []
    for i in range(reduced.shape[0]):
        if exact_rank(reduced[chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == r:
            break
    inv = exact_inverse(reduced[chosen])
    rays = [inv[:, j] for j in range(r)]
    processed = list(chosen)
    zero_sets = [_zero_set(reduced, ray, processed) for ray in rays]

    for i in range(reduced.shape[0]):
        if i in chosen:
            continue
        a = reduced[i]
        values = [a.dot(ray) for ray in rays]
        pos = [t for t, v in enumerate(values) if v > 0]
        neg = [t for t, v in enumerate(values) if v < 0]
        zero = [t for t, v in enumerate(values) if v == 0]
        if not neg:
            processed.append(i)
            zero_sets = [zs | {i} if t in zero else zs for t, zs in enumerate(zero_sets)]
            continue

        next_rays: List[np.ndarray] = []
        next_sets: List[FrozenSet[int]] = []
        for t in pos:
            next_rays.append(rays[t])
            next_sets.append(zero_sets[t])
        for t in zero:
            next_rays.append(rays[t])
            next_sets.append(zero_sets[t] | {i})
        for p in pos:
            for q in neg:
                if not _adjacent(p, q, zero_sets, r):
                    continue
                combined = values[p] * rays[q] - values[q] * rays[p]
                combined = primitive_integer(combined)
                next_rays.append(combined)
                next_sets.append((zero_sets[p] & zero_sets[q]) | {i})
        rays, zero_sets = next_rays, next_sets
        processed.append(i)
        logger.debug("Constraint %d processed, %d rays", i, len(rays))
        if not rays:
            break

    out = [primitive_integer(span.T.dot(ray)) for ray in rays]
    return out, lineality
