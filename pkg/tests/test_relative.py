import itertools

import pytest

import relsite.relative as rel
from relsite.core import functor_violation
from relsite.corpus import Bounds, exhaustive_problems, fibration_morphisms, random_problems
from relsite.fixtures import C2, J_triv, collapse_problem, fixture_neg, fixture_pos, identity_problem
from relsite.relative import (
    DiscrepancyDetected,
    check_cofinality,
    check_diagonal_density,
    check_diagonal_density_direct,
    check_fiberwise,
    check_relative_filtered,
    diagonal_category,
    diagonal_objects,
    fiber_functor,
    global_functor,
    relative_verdict,
)
from relsite.sitecheck import check_site_morphism
from relsite.topology import topology_violation
from relsite.verdict import Verdict


def sample(stride=37, random_count=60):
    yield from itertools.islice(exhaustive_problems(Bounds()), 0, None, stride)
    yield from random_problems(Bounds(), seed=3, count=random_count)


class TestFunctors:
    def test_fiber_identity(self):
        prob = identity_problem()
        for c in prob.C.objects:
            F = fiber_functor(prob, c)
            assert all(F.object_map[x] == x for x in F.source.objects)
            assert F.source.objects == F.target.objects

    def test_fiber_fixture(self):
        prob = fixture_neg()
        assert fiber_functor(prob, "b").object_map == {("*", "id:b"): ("b", "id:b")}
        Fa = fiber_functor(prob, "a")
        assert Fa.source.objects == () and Fa.target.objects == (("a", "id:a"),)

    def test_global(self):
        prob = fixture_neg()
        assert global_functor(prob).object_map == {("*", "b", "id:b"): ("b", "b", "id:b")}
        G = global_functor(identity_problem())
        assert all(G.object_map[x] == x for x in G.source.objects)

    def test_fiber_matches_global(self):
        for prob in sample(stride=211, random_count=20):
            G = global_functor(prob)
            assert functor_violation(G) is None
            for c in prob.C.objects:
                F = fiber_functor(prob, c)
                for d, v in F.source.objects:
                    d2, v2 = F.object_map[(d, v)]
                    assert G.object_map[(d, c, v)] == (d2, c, v2)


class TestFixtures:
    def test_identity(self):
        v = relative_verdict(identity_problem())
        assert v.aggregate and not v.discrepancy
        assert all(r.ok for r in v.criteria.values())

    def test_neg(self):
        prob = fixture_neg()
        assert not check_cofinality(prob)
        f = check_relative_filtered(prob)
        assert not f.parts["a"] and f.parts["a"].witness == {"c": "a", "object": "a", "chi": "id:a"}
        w = check_fiberwise(prob)
        assert not w and w.witness["c"] == "a"
        assert not check_diagonal_density(prob)
        v = relative_verdict(prob, strict=True)
        assert not any(r.ok for r in v.criteria.values()) and not v.discrepancy

    def test_pos(self):
        prob = fixture_pos()
        v = relative_verdict(prob, strict=True)
        assert v.aggregate
        d = diagonal_category(prob)
        assert (("b", "b", "id:b"), ("*", "b", "id:b"), "id:b", "id:b") in d.diagonal

    def test_collapse_is_not_a_site_morphism(self):
        prob = collapse_problem()
        sm = check_site_morphism(prob.A, prob.left.topology, prob.right.topology)
        assert not sm and sm.witness["witness"]["part"] == "F2"
        v = relative_verdict(prob)
        assert not v.criteria["filtered"] and not v.discrepancy

    def test_strict_raises(self, monkeypatch):
        monkeypatch.setattr(rel, "check_fiberwise", lambda prob: Verdict(True))
        with pytest.raises(DiscrepancyDetected):
            relative_verdict(fixture_neg(), strict=True)


class TestDiagonal:
    def direct_count(self, prob):
        # (d', d, c, g: d' -> A d, u: p d -> c)
        C, D, D2 = prob.C, prob.D, prob.D2
        return sum(
            len(D2.hom(x, prob.A.object_map[d])) * len(C.hom(prob.p.object_map[d], c))
            for x in D2.objects
            for d in D.objects
            for c in C.objects
        )

    def test_identity_counts(self):
        prob = identity_problem(C2(), J_triv(C2()))
        data = diagonal_category(prob)
        assert len(data.diagonal) == self.direct_count(prob) == 4
        assert all(X[0][1] == X[1][1] for X in data.diagonal)

    def test_counts_and_density_on_sample(self):
        checked = 0
        for prob in sample():
            diag = [X for X in diagonal_objects(prob) if rel.is_diagonal(prob, X)]
            assert len(diag) == self.direct_count(prob)
            if len(diagonal_objects(prob)) > 12:
                continue
            data = diagonal_category(prob)
            assert check_diagonal_density_direct(prob, data).ok == check_diagonal_density(prob).ok
            checked += 1
        assert checked > 100

    def test_topology_validates_on_small_commas(self):
        checked = 0
        for prob in itertools.islice(exhaustive_problems(Bounds()), 0, None, 29):
            if len(diagonal_objects(prob)) > 8:
                continue
            data = diagonal_category(prob)
            if len(data.comma.carrier.arrows) > 40:
                continue
            assert topology_violation(data.topology) is None, prob.name
            checked += 1
        assert checked > 100


def test_equivalences_on_sample():
    n = sm = 0
    for prob in sample():
        v = relative_verdict(prob)
        assert not v.discrepancies, (prob.name, v.discrepancies)
        n += 1
        sm += v.site_morphism.ok
    assert n > 700 and sm > 100


@pytest.mark.slow
def test_fibration_morphisms_pass_everything():
    n = 0
    for prob, fm, sm in itertools.islice(fibration_morphisms(), 0, None, 7):
        if fm and sm:
            v = relative_verdict(prob)
            assert all(r.ok for r in v.criteria.values()), prob.name
            n += 1
    assert n > 100
