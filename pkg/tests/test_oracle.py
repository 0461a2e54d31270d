import itertools

from relsite.core import FinFunctor, compose_functors, constant_functor, discrete_category, enumerate_functors, identity_functor
from relsite.corpus import Bounds, exhaustive_problems, presheaves_on, small_categories
from relsite.fixtures import C2, J1, J_triv, ONE, fixture_neg, fixture_pos, identity_problem, point_at
from relsite.oracle import (
    FinPresheaf,
    PresheafMorphism,
    build_phi_tilde,
    codiagonal,
    colimit_of_representables,
    empty_presheaf,
    identity_morphism,
    is_bijection,
    is_local_isomorphism,
    is_locally_injective,
    is_locally_surjective,
    is_sheaf,
    isomorphic_by,
    left_kan_presheaf,
    matching_families,
    morphism_violation,
    plus_construction,
    plus_unit,
    presheaf_violation,
    representable,
    restrict_along,
    sheafification_unit,
    sheafify,
    sheafify_morphism,
)
from relsite.relative import check_cofinality
from relsite.topology import Topology, enumerate_topologies


def as_presheaf(D):
    C = D.base
    return FinPresheaf(C, {c: D.fiber[c].objects for c in C.objects}, {f: D.transition[f].object_map for f in C.arrows})


def small_presheaves(max_size=2):
    for C in small_categories(2, 3):
        for D in presheaves_on(C, max_size):
            yield as_presheaf(D)


def everything_covers(C):
    return Topology(C, rule=lambda x, S: True, name="all")


class TestBasics:
    def test_representables(self):
        C = C2()
        Yb, Ya = representable(C, "b"), representable(C, "a")
        assert Yb.sections == {"a": ("f",), "b": ("id:b",)}
        assert Ya.sections == {"a": ("id:a",), "b": ()}
        assert representable(ONE(), "*").sections == {"*": ("id:*",)}
        for P in (Ya, Yb):
            assert presheaf_violation(P) is None

    def test_restrict(self):
        C = C2()
        Yb = representable(C, "b")
        assert restrict_along(identity_functor(C), Yb).sections == Yb.sections
        R = restrict_along(point_at(C, "b"), representable(C, "a"))
        assert R.sections == {"*": ()}
        K = constant_functor(C, C, "b")
        assert restrict_along(K, Yb).sections == {"a": ("id:b",), "b": ("id:b",)}

    def test_colimits(self):
        C = C2()
        one = point_at(C, "a")
        col = colimit_of_representables(one).presheaf
        assert col.size() == representable(C, "a").size()
        # co-Yoneda for the terminal presheaf
        col = colimit_of_representables(identity_functor(C)).presheaf
        assert col.size() == {"a": 1, "b": 1}
        two = discrete_category(["i", "j"])
        F = FinFunctor(two, C, {"i": "a", "j": "a"}, {"id:i": "id:a", "id:j": "id:a"})
        assert colimit_of_representables(F).presheaf.size() == {"a": 2, "b": 0}

    def test_lan_examples(self):
        C = C2()
        for P in (representable(C, "a"), representable(C, "b"), empty_presheaf(C)):
            L = left_kan_presheaf(identity_functor(C), P)
            assert L.size() == P.size()
        L = left_kan_presheaf(identity_functor(C), representable(C, "b"))
        assert presheaf_violation(L) is None

    def test_lan_of_representable(self):
        for D in small_categories(2, 3):
            for E in small_categories(2, 3):
                for A in itertools.islice(enumerate_functors(D, E), 20):
                    for d in D.objects:
                        L = left_kan_presheaf(A, representable(D, d))
                        Y = representable(E, A.object_map[d])
                        comps = {x: {s: E._comp[(A.arrow_map[s[2]], s[1])] for s in L.sections[x]} for x in E.objects}
                        assert isomorphic_by(L, Y, comps)

    def test_lan_preserves_colimits(self):
        n = 0
        for I in small_categories(2, 2):
            for D in small_categories(2, 3):
                for F in enumerate_functors(I, D):
                    col = colimit_of_representables(F)
                    for E in small_categories(2, 3):
                        for A in itertools.islice(enumerate_functors(D, E), 6):
                            L = left_kan_presheaf(A, col.presheaf)
                            right = colimit_of_representables(compose_functors(A, F))
                            comps = {
                                x: {(d, h, s): right.leg[(s[0], x, E._comp[(A.arrow_map[s[1]], h)])] for d, h, s in L.sections[x]}
                                for x in E.objects
                            }
                            assert isomorphic_by(L, right.presheaf, comps)
                            n += 1
        assert n > 200


class TestPhiTilde:
    def test_identity_is_iso(self):
        prob = identity_problem()
        for c in prob.C.objects:
            m = build_phi_tilde(prob, c)
            assert morphism_violation(m) is None and is_bijection(m)

    def test_neg(self):
        prob = fixture_neg()
        m = build_phi_tilde(prob, "a")
        assert all(not s for s in m.source.sections.values())
        assert m.target.sections["a"] == ("id:a",)
        v = is_locally_surjective(m, prob.right.topology)
        assert not v and v.witness == {"object": "a", "section": "id:a"}
        assert not is_local_isomorphism(m, prob.right.topology)

    def test_pos(self):
        prob = fixture_pos()
        assert is_bijection(build_phi_tilde(prob, "b"))

    def test_target_is_restricted_representable(self):
        for prob in itertools.islice(exhaustive_problems(Bounds()), 0, None, 97):
            for c in prob.C.objects:
                m = build_phi_tilde(prob, c)
                assert morphism_violation(m) is None
                assert m.target.sections == restrict_along(prob.p_prime, representable(prob.C, c)).sections


class TestLocal:
    def test_identity(self):
        C = C2()
        for P in (representable(C, "a"), representable(C, "b")):
            v = is_local_isomorphism(identity_morphism(P), J1(C))
            assert v.parts["locally_surjective"] and v.parts["locally_injective"]

    def test_empty_into_representable(self):
        C = C2()
        Ya = representable(C, "a")
        m = PresheafMorphism(empty_presheaf(C), Ya, {x: {} for x in C.objects})
        assert not is_locally_surjective(m, J_triv(C))
        assert is_locally_surjective(m, everything_covers(C))

    def test_fold(self):
        C = C2()
        m = codiagonal(representable(C, "a"))
        assert morphism_violation(m) is None
        assert is_locally_surjective(m, J_triv(C)) and not is_locally_injective(m, J_triv(C))


class TestSheafification:
    def test_trivial_topology(self):
        for P in itertools.islice(small_presheaves(), 200):
            assert is_bijection(plus_unit(P, J_triv(P.category)))

    def test_examples(self):
        C = C2()
        Yb, Ya = representable(C, "b"), representable(C, "a")
        assert is_sheaf(Yb, J1(C))
        assert len(matching_families(Ya, frozenset({"f"}))) == 1
        assert not is_sheaf(Ya, J1(C))
        assert len(sheafify(Ya, J1(C)).sections["b"]) == 1
        assert plus_construction(Ya, J1(C)).size() == {"a": 1, "b": 1}

    def test_properties(self):
        n = 0
        for P in small_presheaves(2):
            C = P.category
            for K in enumerate_topologies(C):
                S = sheafify(P, K)
                assert presheaf_violation(S) is None
                assert is_sheaf(S, K)
                assert is_bijection(sheafification_unit(S, K))
                if is_sheaf(P, K):
                    assert is_bijection(sheafification_unit(P, K))
                n += 1
        assert n > 300


def corpus_morphisms(limit=None):
    """φ̃ maps of corpus problems, then fold and identity maps of small presheaves."""
    for prob in itertools.islice(exhaustive_problems(Bounds()), 0, limit, 61):
        for c in prob.C.objects:
            yield build_phi_tilde(prob, c), prob.right.topology
    for P in small_presheaves(1):
        for K in enumerate_topologies(P.category):
            yield codiagonal(P), K
            yield identity_morphism(P), K


def test_local_iso_iff_sheafified_bijection():
    seen = []
    for m, K in corpus_morphisms():
        iso = is_local_isomorphism(m, K).ok
        assert iso == is_bijection(sheafify_morphism(m, K))
        seen.append(iso)
    assert len(seen) >= 200 and seen.count(False) > 50 and seen.count(True) > 50


def test_oracle_bridge():
    outcomes = set()
    for prob in itertools.islice(exhaustive_problems(Bounds()), 0, None, 53):
        ok = all(is_local_isomorphism(build_phi_tilde(prob, c), prob.right.topology) for c in prob.C.objects)
        assert ok == check_cofinality(prob).ok
        outcomes.add(ok)
    assert outcomes == {True, False}
