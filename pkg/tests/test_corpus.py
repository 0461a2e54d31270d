from collections import Counter
from itertools import islice

import pytest

import brute
from relsite.core import validate_category
from relsite.corpus import (
    Bounds,
    enumerate_categories,
    exhaustive_problems,
    fibration_corpus,
    fibration_morphisms,
    random_problems,
)
from relsite.fixtures import C2, J1, J_triv
from relsite.relative import problem_violation
from relsite.topology import enumerate_topologies


def counts(max_objects, max_arrows):
    return Counter((len(c.objects), len(c.arrows)) for c in enumerate_categories(max_objects, max_arrows))


def test_monoid_counts():
    # monoids of order 1..4 up to isomorphism
    c = counts(1, 4)
    assert [c[(1, m)] for m in range(1, 5)] == [1, 2, 7, 35]


@pytest.mark.slow
def test_monoids_of_order_five():
    assert counts(1, 5)[(1, 5)] == 228


def test_small_category_counts():
    c = counts(3, 5)
    assert [c[(2, m)] for m in range(2, 6)] == [1, 3, 16, 77]
    assert [c[(3, m)] for m in range(3, 6)] == [1, 3, 20]


def test_terminal_category_first():
    first = next(enumerate_categories(1, 1))
    assert len(first.objects) == 1 and len(first.arrows) == 1


def test_enumerated_categories_are_valid():
    for cat in enumerate_categories(2, 4):
        validate_category(cat)


def cover_pattern(K, rename):
    return {rename[x]: {frozenset(rename[a] for a in S) for S in K.covers(x)} for x in K.category.objects}


def test_contains_c2_with_both_topologies():
    c2 = C2()
    want = [cover_pattern(T, {x: x for x in [*c2.objects, *c2.arrows]}) for T in (J_triv(c2), J1(c2))]
    found = []
    for cat in enumerate_categories(2, 3, min_objects=2):
        arrows = [a for a in cat.arrows if not cat.is_identity(a)]
        if len(arrows) != 1 or cat.src[arrows[0]] == cat.dst[arrows[0]]:
            continue
        g = arrows[0]
        rename = {cat.src[g]: "a", cat.dst[g]: "b", g: "f", cat.identity[cat.src[g]]: "id:a", cat.identity[cat.dst[g]]: "id:b"}
        found = [cover_pattern(K, rename) for K in enumerate_topologies(cat)]
    assert all(w in found for w in want)


def test_topologies_match_brute_force():
    for cat in enumerate_categories(2, 3):
        for K in enumerate_topologies(cat):
            assert brute.satisfies_axioms(cat, {x: set(K.covers(x)) for x in cat.objects})


def test_problems_are_valid_and_deterministic():
    b = Bounds(random_count=30)
    first = [p.name for p in random_problems(b, seed=9)]
    assert first == [p.name for p in random_problems(b, seed=9)]
    for prob in random_problems(b, seed=9):
        assert problem_violation(prob) is None
    for i, prob in enumerate(exhaustive_problems(b)):
        if i % 101 == 0:
            assert problem_violation(prob) is None


def test_random_tier_reaches_four_objects():
    sizes = {len(p.C.objects) for p in random_problems(Bounds(), seed=0, count=200)}
    assert 4 in sizes


def test_fibration_corpus_and_morphisms():
    totals = list(fibration_corpus(max_total_objects=4))
    assert len(totals) > 20
    seen = Counter((fm, sm) for _, fm, sm in islice(fibration_morphisms(), 400))
    assert seen[(True, True)] > 0 and sum(seen.values()) > seen[(True, True)]
