import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field

from dsdomain.config import DEFAULT_SETTINGS, Settings
from dsdomain.core.matcore import bareiss_det
from dsdomain.errors import DomainError
from dsdomain.harness.corpus import (
    PINNED_CORPUS_JSON,
    PINNED_DIGEST,
    Corpus61,
    corpus_digest,
    load_corpus,
    relator_check,
    unipotent_check,
)
from dsdomain.poincare.angles import angle_sum
from dsdomain.poincare.cusps import (
    SatakeCycle,
    cycle_fixed_point,
    invariance_check,
    satake_cycles,
    scaling_constant,
)
from dsdomain.poincare.domain import DomainWithPairing, RidgeCycle, build_domain, check_exact, ridge_cycles
from dsdomain.polyhedra.polytope import finite_volume, satake_faces

logger = logging.getLogger(__name__)

EXPECTED_COUNTS = {0: 6, 1: 15, 2: 20, 3: 15, 4: 6, 5: 1}

# ridge "ij" is the face missing vertices i and j; letter l carries ridge l onto ridge l+1
EXPECTED_CYCLES: List[Tuple[List[str], List[str], int]] = [
    (["56", "12", "34"], ["a", "b", "c"], 1),
    (["14", "36", "25"], ["a^-1", "b^-1", "c^-1"], 2),
    (["26", "16", "13"], ["a", "a", "b^-1"], 2),
    (["24", "23", "35"], ["b", "b", "c^-1"], 2),
    (["46", "45", "15"], ["c", "c", "a^-1"], 2),
]

# (type, face dimension) -> count
EXPECTED_SATAKE = {(1, 0): 6, (2, 1): 15, (2, 2): 4}

# facet of each slot, "F" plus the missing vertex: a.F6 = F1, b.F2 = F3, c.F4 = F5
EXPECTED_FACETS = {"a": "F1", "a^-1": "F6", "b": "F3", "b^-1": "F2", "c": "F5", "c^-1": "F4"}

INVARIANCE_EDGE = (5, 6)


class _Skipped(DomainError):
    """A stage whose input stage failed"""


class CheckItem(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    ok: bool
    detail: Optional[str] = None
    data: Dict[str, Any] = Field(default_factory=dict)


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    items: List[CheckItem] = Field(default_factory=list)

    @computed_field
    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)

    def item(self, name: str) -> CheckItem:
        return next(i for i in self.items if i.name == name)


def _invert(name: str) -> str:
    return name[:-3] if name.endswith("^-1") else f"{name}^-1"


def cycle_forms(ridges: Sequence[str], letters: Sequence[str]) -> List[Tuple[Tuple[str, str], ...]]:
    """All rotations of a cycle and of its reversal as (ridge, outgoing letter) pairs"""
    m = len(ridges)
    forward = [(ridges[i], letters[i]) for i in range(m)]
    backward = [(ridges[-i % m], _invert(letters[(-i - 1) % m])) for i in range(m)]
    forms = []
    for seq in (forward, backward):
        forms += [tuple(seq[i:] + seq[:i]) for i in range(m)]
    return forms


class ExampleVerifier:
    """Runs the worked-example pipeline stage by stage; each stage becomes one report item"""

    def __init__(self, corpus: Optional[Corpus61] = None, settings: Settings = DEFAULT_SETTINGS,
                 samples: Optional[int] = None, trials: int = 50):
        self.corpus = corpus or load_corpus()
        self.settings = settings
        self.samples = samples or settings.samples_per_ridge
        self.trials = trials
        self.domain: Optional[DomainWithPairing] = None
        self.cycles: Optional[List[RidgeCycle]] = None
        self.labels: Dict[int, int] = {}
        self.items: List[CheckItem] = []

    def run(self) -> VerificationReport:
        stages = [
            ("provenance", self.check_provenance),
            ("determinants", self.check_determinants),
            ("unipotent", self.check_unipotent),
            ("relators", self.check_relators),
            ("build", self.check_build),
            ("incidence", self.check_incidence),
            ("face_counts", self.check_face_counts),
            ("exactness", self.check_exactness),
            ("ridge_cycles", self.check_ridge_cycles),
            ("angle_sums", self.check_angle_sums),
            ("finite_volume", self.check_finite_volume),
            ("satake_census", self.check_satake_census),
            ("cycle_invariance", self.check_cycle_invariance),
        ]
        for name, stage in stages:
            try:
                ok, detail, data = stage()
            except DomainError as e:
                logger.warning("Stage %s raised %s", name, e)
                ok, detail, data = False, f"{type(e).__name__}: {e}", {}
            self.items.append(CheckItem(name=name, ok=ok, detail=detail, data=data))
            logger.info("%s: %s", name, "pass" if ok else "FAIL")
        return VerificationReport(items=self.items)

    # ---------- stages ----------

    def check_provenance(self):
        digest = corpus_digest(PINNED_CORPUS_JSON)
        pristine = load_corpus().fingerprint() == self.corpus.fingerprint()
        ok = digest == PINNED_DIGEST and pristine
        detail = None if ok else "corpus differs from the pinned data"
        return ok, detail, {"digest": digest}

    def check_determinants(self):
        dets = {k: str(bareiss_det(g.matrix))
                for k, g in {**self.corpus.generators, **self.corpus.parabolic}.items()}
        return all(d == "1" for d in dets.values()), None, {"det": dets}

    def check_unipotent(self):
        results = {k: unipotent_check(g) for k, g in self.corpus.parabolic.items()}
        return all(results.values()), None, results

    def check_relators(self):
        results = {w.label(): relator_check(w) for w in self.corpus.presentation + self.corpus.parabolic_relators}
        failed = [k for k, v in results.items() if not v]
        return not failed, (f"not the identity: {failed}" if failed else None), {"relators": len(results)}

    def _need_domain(self) -> DomainWithPairing:
        if self.domain is None:
            raise _Skipped("domain build failed")
        return self.domain

    def check_build(self):
        self.domain = build_domain(self.corpus.generator_set())
        P = self.domain.polytope
        self.labels = {i: self.corpus.vertex_label(v) for i, v in enumerate(P.vertices)}
        found = sorted(self.labels.values())
        ok = P.bounded() and found == list(range(1, len(self.corpus.vertices) + 1))
        return ok, None if ok else f"vertex labels {found}", {"vertices": len(P.vertices)}

    def check_incidence(self):
        d = self._need_domain()
        P = d.polytope
        bad = []
        for f in P.facets():
            normal = d.normal(f)
            for i, v in enumerate(P.vertices):
                value = sum(normal.entries[r, c] * v.entries[c, r] for r in range(P.n) for c in range(P.n))
                on_facet = i in P.faces[f].vertices
                if (on_facet and value != 0) or (not on_facet and value <= 0):
                    bad.append((d.name(f), self.labels.get(i)))
        return not bad, (f"violations {bad}" if bad else None), {}

    def check_face_counts(self):
        counts = self._need_domain().polytope.counts()
        return counts == EXPECTED_COUNTS, None, {"counts": {str(k): v for k, v in counts.items()}}

    def check_exactness(self):
        report = check_exact(self._need_domain())
        pairs = [(p.generator, self._facet_label(p.facet), self._facet_label(p.partner)) for p in report.pairs]
        mislabeled = [name for name, facet, _ in pairs if EXPECTED_FACETS.get(name) != facet]
        reasons = [f.reason or "" for f in report.failures]
        if mislabeled:
            reasons.append(f"unexpected facets for {mislabeled}")
        ok = report.ok and len(report.pairs) == len(self.corpus.slots) and not mislabeled
        return ok, "; ".join(reasons) or None, {"pairs": pairs}

    def _facet_label(self, facet: Optional[int]) -> str:
        if facet is None:
            return "-"
        P = self._need_domain().polytope
        missing = set(range(1, len(self.corpus.vertices) + 1)) - {self.labels[v] for v in P.faces[facet].vertices}
        return "F" + "".join(str(i) for i in sorted(missing))

    def _ridge_label(self, ridge: int) -> str:
        return self._facet_label(ridge)[1:]

    def check_ridge_cycles(self):
        d = self._need_domain()
        self.cycles = ridge_cycles(d, infer_orders=False, settings=self.settings)
        found = [[(self._ridge_label(r), s) for r, s in zip(c.ridges, c.word.names)] for c in self.cycles]
        unmatched = [
            exp for exp in EXPECTED_CYCLES
            if not any(tuple(f) in cycle_forms(exp[0], exp[1]) for f in found)
        ]
        ok = len(self.cycles) == len(EXPECTED_CYCLES) and not unmatched
        detail = None if ok else f"{len(self.cycles)} cycles, unmatched {[u[0] for u in unmatched]}"
        return ok, detail, {"cycles": [" ".join(f"r{r} -{s}->" for r, s in f) for f in found]}

    def check_angle_sums(self):
        d = self._need_domain()
        if self.cycles is None:
            raise _Skipped("ridge cycles unavailable")
        results, flagged = {}, []
        ok = True
        for cycle in self.cycles:
            label = "r" + self._ridge_label(cycle.ridges[0])
            report = angle_sum(cycle, d, self.samples, self.settings)
            ridge_set = {self._ridge_label(x) for x in cycle.ridges}
            expected = next((k for ridges, _, k in EXPECTED_CYCLES if set(ridges) == ridge_set), None)
            results[label] = {"order": report.order, "min": min(report.sums), "max": max(report.sums)}
            if report.order != expected:
                ok = False
                if report.invariant_angle_question:
                    flagged.append(label)
        detail = None
        if flagged:
            detail = (f"Riemannian angle sums deviate on {flagged}; the invariant-angle form of the "
                      "ridge condition is not checked")
        return ok, detail, results

    def check_finite_volume(self):
        P = self._need_domain().polytope
        return finite_volume(P), None, {"vertices": len(P.vertices)}

    def check_satake_census(self):
        P = self._need_domain().polytope
        census: Dict[Tuple[int, int], int] = {}
        for sf in satake_faces(P):
            key = (sf.type, P.faces[sf.face].dim)
            census[key] = census.get(key, 0) + 1
        return census == EXPECTED_SATAKE, None, {"census": {f"type{t}/dim{k}": v for (t, k), v in census.items()}}

    def check_cycle_invariance(self):
        d = self._need_domain()
        cycle = example_satake_cycle(self.corpus, d)
        if cycle is None:
            return False, f"no Satake cycle returns edge {INVARIANCE_EDGE}", {}
        alpha = cycle_fixed_point(cycle.face, cycle.word, d, self.settings)
        report = invariance_check(cycle.word, alpha, trials=self.trials, settings=self.settings)
        forward = scaling_constant(cycle.word, alpha)
        backward = scaling_constant(cycle.word.inverse(), alpha)
        product_ok = math.isclose(float(forward * backward), 1.0, abs_tol=1e-12)
        data = {"word": cycle.word.label(), "fixed_point": alpha.model_dump()["matrix"]["entries"],
                "matches": report.matches, "scaling": report.scaling}
        return report.ok and report.exact and product_ok, None, data


def example_satake_cycle(corpus: Corpus61, d: DomainWithPairing) -> Optional[SatakeCycle]:
    """First Satake cycle returning the edge spanned by the invariance vertices"""
    P = d.polytope
    edge = tuple(sorted(i for i, v in enumerate(P.vertices) if corpus.vertex_label(v) in INVARIANCE_EDGE))
    return next((c for c in satake_cycles(d) if P.faces[c.face.face].vertices == edge), None)


def verify_example(corpus: Optional[Corpus61] = None, settings: Settings = DEFAULT_SETTINGS,
                   samples: Optional[int] = None, trials: int = 50) -> VerificationReport:
    return ExampleVerifier(corpus, settings, samples, trials).run()
