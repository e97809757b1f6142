import json
from fractions import Fraction

import pytest

from dsdomain.core.matcore import SymMatrix
from dsdomain.harness.corpus import PINNED_CORPUS_JSON, canonical_json, load_corpus
from dsdomain.harness.verify import ExampleVerifier, cycle_forms, verify_example

STAGES = [
    "provenance", "determinants", "unipotent", "relators", "build", "incidence", "face_counts",
    "exactness", "ridge_cycles", "angle_sums", "finite_volume", "satake_census", "cycle_invariance",
]


@pytest.fixture(scope="module")
def report(corpus):
    return verify_example(corpus, samples=2, trials=5)


def test_stages_in_order(report):
    assert [item.name for item in report.items] == STAGES


def test_example_stages_pass(report):
    failed = [item.name for item in report.items if not item.ok]
    assert failed == []
    assert report.ok
    assert report.item("angle_sums").detail is None
    assert report.item("face_counts").data["counts"]["0"] == 6


def test_tampered_corpus_fails_provenance():
    data = json.loads(PINNED_CORPUS_JSON)
    data["slots"] = list(reversed(data["slots"]))
    verifier = ExampleVerifier(load_corpus(canonical_json(data)))
    ok, detail, _ = verifier.check_provenance()
    assert not ok
    assert detail


def test_cycle_forms():
    forms = cycle_forms(["56", "12", "34"], ["a", "b", "c"])
    assert len(forms) == 6
    assert (("12", "b"), ("34", "c"), ("56", "a")) in forms
    assert (("56", "c^-1"), ("34", "b^-1"), ("12", "a^-1")) in forms


def test_swapped_generator_fails_exactness(corpus):
    generators = {**corpus.generators, "c": corpus.generators["c"].inverse()}
    verifier = ExampleVerifier(corpus.model_copy(update={"generators": generators}))
    assert verifier.check_build()[0]
    ok, detail, _ = verifier.check_exactness()
    assert not ok
    assert "c" in detail


def test_perturbed_vertex_fails_the_build_stage(corpus):
    moved = SymMatrix([[Fraction(1, 3)] * 3] * 3)
    verifier = ExampleVerifier(corpus.model_copy(update={"vertices": [moved] + corpus.vertices[1:]}))
    ok, detail, _ = verifier.check_build()
    assert not ok
    assert detail
