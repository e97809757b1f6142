"""Seeded property sweeps over random inputs.

Each suite draws its inputs from numpy's default_rng(seed) and reports the
number of violations and the worst margin seen.
"""
import logging
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.core.busemann import (
    BusemannKind,
    BusemannSpec,
    LimitTag,
    asymptotic_limit,
    decomposition_residual,
    lipschitz_margin,
)
from dsdomain.core.matcore import congruence, geodesic_distance
from dsdomain.core.sampling import random_sl, random_space_point
from dsdomain.core.satake import BoundaryComponent, SatakePoint, image_component, project
from dsdomain.errors import DomainError
from dsdomain.harness.interlacing import deletions, deviation, interlacing_check, interlacing_oracle

logger = logging.getLogger(__name__)


class SweepReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    suite: str
    trials: int
    seed: int
    violations: int = 0
    worst: Optional[float] = None
    failures: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def ok(self) -> bool:
        return self.violations == 0


def _rank_one(rng: np.random.Generator, n: int) -> Tuple[SatakePoint, np.ndarray]:
    while True:
        v = np.array([Fraction(int(x)) for x in rng.integers(-3, 4, size=n)], dtype=object)
        if any(x != 0 for x in v):
            return SatakePoint.of(np.outer(v, v)), v


def _component_through(rng: np.random.Generator, v: np.ndarray, dim: int) -> BoundaryComponent:
    n = len(v)
    while True:
        extra = [[Fraction(int(x)) for x in rng.integers(-3, 4, size=n)] for _ in range(dim - 1)]
        try:
            return BoundaryComponent(span=[list(v)] + extra)
        except DomainError:
            continue


def _random_spec(rng: np.random.Generator, n: int, k: int, exact: bool = False) -> BusemannSpec:
    alpha, v = _rank_one(rng, n)
    reference = random_space_point(rng, n, exact=exact)
    if k == 0:
        return BusemannSpec(kind=BusemannKind.TYPE0, alpha=alpha, reference=reference)
    return BusemannSpec(kind=BusemannKind.TYPEK, alpha=alpha, reference=reference,
                        component=_component_through(rng, v, n - k))


def lipschitz(trials: int, seed: int, settings: Settings = DEFAULT_SETTINGS, n: int = 3) -> SweepReport:
    """|log b(Y1) - log b(Y2)| <= sqrt((m-1)/m) d(Y1, Y2) for k in {0, 1}"""
    rng = np.random.default_rng(seed)
    violations, worst, failures = 0, None, []
    for t in range(trials):
        spec = _random_spec(rng, n, k=t % 2)
        y1 = random_space_point(rng, n, exact=False)
        y2 = random_space_point(rng, n, exact=False)
        margin = lipschitz_margin(spec, y1, y2)
        worst = margin if worst is None else min(worst, margin)
        if margin < -settings.tolerances.metric:
            violations += 1
            failures.append(f"trial {t}: margin {margin:.3e}")
    return SweepReport(suite="lipschitz", trials=trials, seed=seed, violations=violations,
                       worst=worst, failures=failures[:10])


def contraction(trials: int, seed: int, settings: Settings = DEFAULT_SETTINGS, n: int = 3) -> SweepReport:
    """Projection onto a component does not increase distance"""
    rng = np.random.default_rng(seed)
    violations, worst, failures = 0, None, []
    for t in range(trials):
        dim = int(rng.integers(2, n))
        _, v = _rank_one(rng, n)
        V = _component_through(rng, v, dim)
        y1 = random_space_point(rng, n, exact=False)
        y2 = random_space_point(rng, n, exact=False)
        margin = geodesic_distance(y1, y2, settings) - geodesic_distance(project(V, y1), project(V, y2), settings)
        worst = margin if worst is None else min(worst, margin)
        if margin < -settings.tolerances.metric:
            violations += 1
            failures.append(f"trial {t}: margin {margin:.3e}")
    return SweepReport(suite="contraction", trials=trials, seed=seed, violations=violations,
                       worst=worst, failures=failures[:10])


def _interlaced(rng: np.random.Generator, n: int, k: int) -> Tuple[List[float], List[float]]:
    a = sorted(rng.normal(size=n).tolist(), reverse=True)
    b = sorted((float(rng.uniform(a[i + k], a[i])) for i in range(n - k)), reverse=True)
    return a, b


def interlacing(trials: int, seed: int, settings: Settings = DEFAULT_SETTINGS) -> SweepReport:
    """Random interlaced pairs (n <= 8, k <= 2); for n <= 6, k = 1 the corner oracle equals the deletion maximum"""
    rng = np.random.default_rng(seed)
    violations, worst, failures = 0, None, []
    for t in range(trials):
        n = int(rng.integers(3, 9))
        k = int(rng.integers(1, 3))
        a, b = _interlaced(rng, n, k)
        result = interlacing_check(a, b, k)
        margin = float(result.lhs - result.rhs)
        worst = margin if worst is None else min(worst, margin)
        if not result.holds:
            violations += 1
            failures.append(f"trial {t}: lhs {result.lhs:.6g} < rhs {result.rhs:.6g}")
        if n <= 6 and k == 1:
            oracle = interlacing_oracle(a, 1, settings)
            best_deletion = max(deviation(d) for d in deletions(a))
            if abs(oracle - best_deletion) > 1e-9 * max(1.0, abs(oracle)) or oracle > deviation(a) + 1e-9:
                violations += 1
                failures.append(f"trial {t}: oracle {oracle:.6g} vs deletions {best_deletion:.6g}")
    return SweepReport(suite="interlacing", trials=trials, seed=seed, violations=violations,
                       worst=worst, failures=failures[:10])


# column -> (alpha, beta) in coordinates where the component is span(e1, e2)
_TABLE_COLUMNS: Dict[int, Tuple[List[int], List[int]]] = {
    1: ([0], [0, 2]),
    2: ([0], [0, 1]),
    3: ([0], [2]),
    4: ([0], [1]),
}


def asymptotic(trials: int, seed: int, settings: Settings = DEFAULT_SETTINGS) -> SweepReport:
    """Each table column, moved by a random g: symbolic class and numeric trend must agree"""
    rng = np.random.default_rng(seed)
    violations, worst, failures = 0, None, []
    base = BoundaryComponent.coordinate(3, [0, 1])
    for t in range(trials):
        column = 1 + t % 4
        alpha_idx, beta_idx = _TABLE_COLUMNS[column]
        g = random_sl(rng, 3, exact=True, steps=4, bound=1)
        alpha = SatakePoint.of(congruence(g, _coordinate_projector(alpha_idx)))
        beta = SatakePoint.of(congruence(g, _coordinate_projector(beta_idx)))
        spec = BusemannSpec(kind=BusemannKind.TYPEK, alpha=alpha, component=image_component(g, base),
                            reference=random_space_point(rng, 3, exact=True))
        Y = random_space_point(rng, 3, exact=True)
        limit = asymptotic_limit(spec, beta, Y, settings=settings)
        expected = {1: LimitTag.ZERO, 2: LimitTag.FINITE, 3: LimitTag.FINITE, 4: LimitTag.INFINITY}[column]
        if limit.column != column or limit.tag != expected or not limit.consistent:
            violations += 1
            failures.append(f"trial {t}: column {column} classified as {limit.column} ({limit.diagnostic})")
    return SweepReport(suite="asymptotic", trials=trials, seed=seed, violations=violations,
                       worst=worst, failures=failures[:10])


def _coordinate_projector(indices: List[int]) -> np.ndarray:
    out = np.array([[Fraction(0)] * 3 for _ in range(3)], dtype=object)
    for i in indices:
        out[i, i] = Fraction(1)
    return out


def decomposition(trials: int, seed: int, settings: Settings = DEFAULT_SETTINGS) -> SweepReport:
    """log b against the classical Busemann decomposition at n = 3; even trials type-0, odd trials k = 1"""
    rng = np.random.default_rng(seed)
    violations, worst, failures = 0, None, []
    for t in range(trials):
        spec = _random_spec(rng, 3, k=t % 2, exact=True)
        Y = random_space_point(rng, 3, exact=True)
        residual = abs(decomposition_residual(spec, Y))
        worst = residual if worst is None else max(worst, residual)
        if residual > 1e-10:
            violations += 1
            failures.append(f"trial {t}: residual {residual:.3e}")
    return SweepReport(suite="decomposition", trials=trials, seed=seed, violations=violations,
                       worst=worst, failures=failures[:10])


SUITES: Dict[str, Callable[..., SweepReport]] = {
    "lipschitz": lipschitz,
    "contraction": contraction,
    "interlacing": interlacing,
    "asymptotic": asymptotic,
    "decomposition": decomposition,
}


def run_suite(suite: str, trials: int, seed: int, settings: Settings = DEFAULT_SETTINGS) -> SweepReport:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    report = SUITES[suite](trials, seed, settings)
    logger.info("Sweep %s: %d/%d violations", suite, report.violations, trials)
    return report
