"""Seeded random elements of SL(n) and points of X_n."""
from fractions import Fraction

import numpy as np

from dsdomain.core.matcore import Isometry, SpacePoint, SymMatrix, identity, symmetrize


def random_sl(rng: np.random.Generator, n: int, exact: bool = True, steps: int = 6, bound: int = 2) -> Isometry:
    """Product of integer elementary matrices (exact) or a det-normalized Gaussian matrix"""
    if exact:
        g = identity(n)
        for _ in range(steps):
            i, j = rng.choice(n, size=2, replace=False)
            e = identity(n)
            e[i, j] = Fraction(int(rng.integers(-bound, bound + 1)))
            g = g.dot(e)
        return Isometry(g)
    while True:
        g = rng.normal(size=(n, n))
        det = np.linalg.det(g)
        if abs(det) > 1e-3:
            break
    if det < 0:
        g[0] = -g[0]
        det = -det
    return Isometry((g * abs(det) ** (-1.0 / n)).astype(object))


def random_space_point(rng: np.random.Generator, n: int, exact: bool = True, spread: float = 1.0) -> SpacePoint:
    """g^T g for a random g in SL(n) (exact), or exp of a random traceless symmetric matrix"""
    if exact:
        g = random_sl(rng, n, exact=True).matrix
        return SpacePoint(SymMatrix(g.T.dot(g)))
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    lam = rng.normal(scale=spread, size=n)
    lam -= lam.mean()
    return SpacePoint.normalize(SymMatrix(symmetrize(q @ np.diag(np.exp(lam)) @ q.T)))
