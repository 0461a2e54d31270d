import itertools

import brute
from relsite.core import compose_functors, enumerate_functors, identity_functor
from relsite.corpus import small_categories
from relsite.fixtures import C2, J1, J_triv, ONE, point_at
from relsite.sitecheck import check_comorphism, check_cover_preserving, check_filtering, check_site_morphism
from relsite.topology import enumerate_topologies


def sites(max_objects=2, max_arrows=3):
    for cat in small_categories(max_objects, max_arrows):
        for K in enumerate_topologies(cat):
            yield cat, K


def test_comorphism_examples():
    C = C2()
    assert check_comorphism(identity_functor(C), J1(C), J1(C))
    p = point_at(C, "b")
    v = check_comorphism(p, J_triv(p.source), J1(C))
    assert not v and v.witness["object"] == "*" and v.witness["sieve"] == ["f"]
    for cat, K in sites(2, 2):
        for p in enumerate_functors(cat, C):
            assert check_comorphism(p, K, J_triv(C))


def test_cover_preserving_examples():
    C = C2()
    assert check_cover_preserving(identity_functor(C), J1(C), J1(C))
    v = check_cover_preserving(identity_functor(C), J1(C), J_triv(C))
    assert not v and v.witness == {"object": "b", "sieve": ["f"]}
    for cat, K in sites(2, 2):
        for A in enumerate_functors(cat, C):
            assert check_cover_preserving(A, J_triv(cat), J1(C))


def test_filtering_examples():
    C = C2()
    assert check_filtering(identity_functor(C), J1(C))
    v = check_filtering(point_at(C, "b"), J_triv(C))
    assert v and all(v.parts[k] for k in ("F1", "F2", "F3"))
    v = check_filtering(point_at(C, "a"), J_triv(C))
    assert not v and not v.parts["F1"] and v.parts["F1"].witness == {"object": "b"}


def test_site_morphism_examples():
    C = C2()
    assert check_site_morphism(identity_functor(C), J1(C), J1(C))
    assert check_site_morphism(point_at(C, "b"), J_triv(ONE()), J_triv(C))
    v = check_site_morphism(point_at(C, "a"), J_triv(ONE()), J_triv(C))
    assert not v and v.witness["part"] == "filtering"


def test_identity_passes_everywhere():
    for cat, K in sites():
        I = identity_functor(cat)
        assert check_comorphism(I, K, K)
        assert check_site_morphism(I, K, K)


def test_against_literal_search():
    n = 0
    for D, K in sites(2, 3):
        for E, K2 in sites(2, 3):
            for A in enumerate_functors(D, E):
                v = check_filtering(A, K2)
                assert (v.parts["F1"].ok, v.parts["F2"].ok, v.parts["F3"].ok) == brute.filtering(A, K2)
                assert check_cover_preserving(A, K, K2).ok == brute.cover_preserving(A, K, K2)
                assert check_comorphism(A, K, K2).ok == brute.comorphism(A, K, K2)
                n += 1
    assert n > 500


def test_trivial_topology_single_arrow():
    # with only maximal covers each condition must hold at the identity of d'
    for D in small_categories(2, 3):
        for E in small_categories(2, 3):
            T = J_triv(E)
            for A in enumerate_functors(D, E):
                f1 = all(any(E.hom(y, A.object_map[d]) for d in D.objects) for y in E.objects)
                assert check_filtering(A, T).parts["F1"].ok == f1


def test_composition_closed():
    checked = 0
    for (D, K), (E, K2), (F, K3) in itertools.product(list(sites(2, 2)), list(sites(2, 3)), list(sites(2, 2))):
        for A in enumerate_functors(D, E):
            if not check_site_morphism(A, K, K2):
                continue
            for B in enumerate_functors(E, F):
                if check_site_morphism(B, K2, K3):
                    checked += 1
                    assert check_site_morphism(compose_functors(B, A), K, K3)
    assert checked > 50
