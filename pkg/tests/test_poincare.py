import math
from fractions import Fraction

import pytest

from dsdomain.core.matcore import Isometry, SpacePoint, SymMatrix
from dsdomain.core.satake import BoundaryComponent, SatakePoint
from dsdomain.errors import (
    BoundaryPointError,
    DegenerateWedgeError,
    GeneratorSetError,
    IncidenceError,
    StabilizedCenterError,
)
from dsdomain.poincare.angles import angle_limit, angle_sum, dihedral_angle, infer_order, ridge_samples
from dsdomain.poincare.domain import (
    GeneratorSet,
    build_domain,
    canonical_cycle,
    check_exact,
    ridge_cycles,
    word_order_on_ridge,
)
from dsdomain.polyhedra.polytope import HalfSpaceSpec

I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
A0 = [[0, -1], [-1, 1]]
B0 = [[1, -1], [-1, 0]]
ALPHA0 = [[1, "1/2"], ["1/2", 1]]


def test_generator_set_needs_inverses():
    g = Isometry([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(GeneratorSetError):
        GeneratorSet(elements=[g], center=I3)
    gen = GeneratorSet.closed({"t": g}, I3)
    assert gen.names == ["t", "t^-1"]
    assert gen.index_of(g.inverse()) == 1


def test_generator_set_rejects_stabilizers():
    with pytest.raises(StabilizedCenterError):
        GeneratorSet(elements=[Isometry.identity(3)], center=I3)


def test_generator_set_default_names():
    g = Isometry([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    gen = GeneratorSet(elements=[g, g.inverse()], center=I3)
    assert gen.names == ["g0", "g1"]


def test_build_worked_example(domain, corpus):
    P = domain.polytope
    assert P.counts() == {0: 6, 1: 15, 2: 20, 3: 15, 4: 6, 5: 1}
    assert domain.bounded
    assert sorted(domain.name(f) for f in domain.facet_map) == sorted(corpus.slots)
    for f, partner in domain.pairing.items():
        assert domain.pairing[partner] == f
        assert (domain.generator(f) @ domain.generator(partner)).is_identity()


def test_center_inside_every_halfspace(domain):
    X = domain.generators.center
    for hs in domain.polytope.halfspaces:
        assert hs.contains(X)


def test_pairing_is_exact(domain):
    report = check_exact(domain)
    assert report.ok
    assert len(report.pairs) == 6


def test_single_generator_pair_is_paired(corpus):
    gen = GeneratorSet.closed({"a": corpus.generators["a"]}, corpus.center)
    d = build_domain(gen)
    assert sorted(d.name(f) for f in d.pairing) == ["a", "a^-1"]


def test_ridge_cycles(domain):
    cycles = ridge_cycles(domain, infer_orders=False)
    assert len(cycles) == 5
    assert all(len(c) == 3 for c in cycles)
    covered = sorted(r for c in cycles for r in c.ridges)
    assert covered == sorted(domain.polytope.ridges())
    assert len({canonical_cycle(c, domain) for c in cycles}) == 5


def test_cycle_words_fix_their_ridges(domain):
    for cycle in ridge_cycles(domain, infer_orders=False):
        assert word_order_on_ridge(cycle, domain) == 1


def test_ridge_samples_lie_on_the_ridge(domain):
    ridge = domain.polytope.ridges()[0]
    for x in ridge_samples(domain.polytope, ridge, 4):
        for f in domain.facets_of(ridge):
            assert HalfSpaceSpec(normal=domain.normal(f)).value_at(x) == 0


def ridge_label(domain, corpus, ridge):
    present = {corpus.vertex_label(domain.polytope.vertices[v]) for v in domain.polytope.faces[ridge].vertices}
    return "".join(str(i) for i in range(1, 7) if i not in present)


# r56, r12, r34 close up after one turn; every other cycle needs two
ORDER_ONE = {"56", "12", "34"}


def test_angle_sums_report(domain, corpus):
    orders = {}
    for cycle in ridge_cycles(domain, infer_orders=False):
        report = angle_sum(cycle, domain, 2)
        assert len(report.sums) == 2
        assert report.ok
        assert not report.invariant_angle_question
        labels = {ridge_label(domain, corpus, r) for r in cycle.ridges}
        expected = 1 if labels & ORDER_ONE else 2
        assert report.order == expected, labels
        assert report.sums == pytest.approx([2 * math.pi / expected] * 2, abs=1e-6)
        orders.update({label: report.order for label in labels})
    assert orders["56"] == 1
    assert [orders[r] for r in ("14", "26", "24", "46")] == [2, 2, 2, 2]


def test_dihedral_angle_in_two_dimensions():
    X = SpacePoint.normalize(SymMatrix(ALPHA0))
    assert dihedral_angle(X, [], A0, B0) == pytest.approx(2 * math.pi / 3)


def test_dihedral_angle_errors():
    X = SpacePoint([[1, 0], [0, 1]])
    with pytest.raises(IncidenceError):
        dihedral_angle(X, [], A0, B0)
    Y = SpacePoint.normalize(SymMatrix(ALPHA0))
    with pytest.raises(DegenerateWedgeError):
        dihedral_angle(Y, [], A0, A0)


def test_angle_limit_on_a_component():
    A = [[0, -1, 1], [-1, 1, 0], [1, 0, 0]]
    B = [[1, -1, 0], [-1, 0, 1], [0, 1, 0]]
    alpha = SatakePoint.of([[1, "1/2", 0], ["1/2", 1, 0], [0, 0, 0]])
    plane = BoundaryComponent.coordinate(3, [0, 1])
    assert angle_limit(alpha, plane, [], A, B) == pytest.approx(2 * math.pi / 3)
    with pytest.raises(BoundaryPointError):
        angle_limit(SatakePoint.of([[1, 0, 0], [0, 0, 0], [0, 0, 0]]), plane, [], A, B)


def test_infer_order():
    assert infer_order([2 * math.pi / 3] * 3) == 3
    assert infer_order([2 * math.pi]) == 1
    assert infer_order([1.0]) is None
    assert infer_order([]) is None


def test_corrupted_pairing_is_not_exact(domain):
    pairing = dict(domain.pairing)
    f = min(pairing)
    pairing[f] = next(g for g in sorted(pairing) if g not in (f, domain.pairing[f]))
    report = check_exact(domain.model_copy(update={"pairing": pairing}))
    assert not report.ok
    assert any(p.facet == f for p in report.failures)


def test_dihedral_angle_approaches_its_boundary_limit():
    A = [[0, -1, 1], [-1, 1, 0], [1, 0, 0]]
    B = [[1, -1, 0], [-1, 0, 1], [0, 1, 0]]
    top = [[1, Fraction(1, 2), 0], [Fraction(1, 2), 1, 0], [0, 0, 0]]
    # tr(A Y) = tr(B Y) = 0, so alpha + eps Y stays on both planes
    Y = [[1, Fraction(1, 2), 0], [Fraction(1, 2), 1, 0], [0, 0, 1]]
    eps = Fraction(1, 10000)
    X = SpacePoint.normalize(SymMatrix([[a + eps * y for a, y in zip(r, s)] for r, s in zip(top, Y)]))
    limit = angle_limit(SatakePoint.of(top), BoundaryComponent.coordinate(3, [0, 1]), [], A, B)
    assert dihedral_angle(X, [], A, B) == pytest.approx(limit, abs=1e-3)
