"""Deterministic generators: small categories up to isomorphism, fibrations, and relative problems."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import permutations, product

from .core import (
    FinCategory,
    FinFunctor,
    compose_functors,
    constant_functor,
    enumerate_functors,
    enumerate_nat_transforms,
    identity_functor,
    identity_name,
)
from .indexed import (
    IndexedCategory,
    check_fibration_morphism,
    constant_indexed,
    giraud_topology,
    grothendieck_construction,
    indexed_functor,
    presheaf_indexed,
)
from .relative import RelativeProblem, make_problem
from .sitecheck import check_comorphism, check_site_morphism
from .topology import Topology, all_sieves, enumerate_topologies, generate_topology, topology_leq

OBJECT_NAMES = "abcdefgh"


# categories up to isomorphism


def _hom_matrices(n: int, max_arrows: int):
    """Hom-count matrices with at least one endomorphism per object, canonical under object relabeling."""
    cells = [(i, j) for i in range(n) for j in range(n)]
    budget = max_arrows - n
    if budget < 0:
        return

    def rec(k, left, acc):
        if k == len(cells):
            yield dict(acc)
            return
        i, j = cells[k]
        for extra in range(left + 1):
            acc[(i, j)] = extra + (1 if i == j else 0)
            yield from rec(k + 1, left - extra, acc)
        del acc[(i, j)]

    seen = set()
    for m in rec(0, budget, {}):
        key = min(tuple(m[(s[i], s[j])] for i in range(n) for j in range(n)) for s in permutations(range(n)))
        if key not in seen:
            seen.add(key)
            yield {(i, j): key[i * n + j] for i in range(n) for j in range(n)}


def _tables(n: int, hom: dict):
    """Associative unital composition tables for a hom-count matrix."""
    arrows = [(i, i, i) for i in range(n)]  # (id, src, dst); identities first
    for i in range(n):
        for j in range(n):
            for _ in range(hom[(i, j)] - (1 if i == j else 0)):
                arrows.append((len(arrows), i, j))
    src = [s for _, s, _ in arrows]
    dst = [t for _, _, t in arrows]
    homs: dict = {}
    for a, s, t in arrows:
        homs.setdefault((s, t), []).append(a)
    table: dict = {}
    for a in range(len(arrows)):
        table[(dst[a], a)] = a
        table[(a, src[a])] = a
    pairs = [(g, f) for g in range(n, len(arrows)) for f in range(n, len(arrows)) if src[g] == dst[f]]
    for g, f in pairs:
        if not homs.get((src[f], dst[g])):
            return
    m = len(arrows)

    def defined(x, y):
        return table.get((x, y))

    def assoc_ok(g, f, v):
        """Check every triple in which the new entry ``g∘f = v`` plays a part."""
        for h in range(m):
            if src[h] == dst[g]:
                hg = defined(h, g)
                # (h∘g)∘f against h∘(g∘f)
                if hg is not None:
                    a, b = defined(h, v), defined(hg, f)
                    if a is not None and b is not None and a != b:
                        return False
        for e in range(m):
            if dst[e] == src[f]:
                fe = defined(f, e)
                if fe is not None:
                    a, b = defined(g, fe), defined(v, e)
                    if a is not None and b is not None and a != b:
                        return False
        for (x, y), w in list(table.items()):
            # the entry as the outer composite g∘(x∘y) or (x∘y)∘f
            if w == f and src[g] == dst[x]:
                gx = defined(g, x)
                if gx is not None:
                    b = defined(gx, y)
                    if b is not None and b != v:
                        return False
            if w == g and src[y] == dst[f]:
                yf = defined(y, f)
                if yf is not None:
                    a = defined(x, yf)
                    if a is not None and a != v:
                        return False
        return True

    def rec(k):
        if k == len(pairs):
            for h in range(m):
                for g in range(m):
                    if src[h] != dst[g]:
                        continue
                    for f in range(m):
                        if src[g] == dst[f] and table[(h, table[(g, f)])] != table[(table[(h, g)], f)]:
                            return
            yield dict(table)
            return
        g, f = pairs[k]
        for h in homs[(src[f], dst[g])]:
            table[(g, f)] = h
            if assoc_ok(g, f, h):
                yield from rec(k + 1)
        del table[(g, f)]

    for t in rec(0):
        yield arrows, t


def _canonical(n, arrows, table):
    """Least encoding over all object permutations and hom-set relabelings."""
    src = [s for _, s, _ in arrows]
    dst = [t for _, _, t in arrows]
    m = len(arrows)
    best = None
    for perm in permutations(range(n)):
        inv = {perm[i]: i for i in range(n)}
        # arrows grouped by relabeled hom-set, identities first
        groups: dict = {}
        for a in range(n, m):
            groups.setdefault((inv[src[a]], inv[dst[a]]), []).append(a)
        keys = sorted(groups)
        for orders in product(*(permutations(groups[k]) for k in keys)):
            label = {a: inv[a] for a in range(n)}
            nxt = n
            for seq in orders:
                for a in seq:
                    label[a] = nxt
                    nxt += 1
            shape = tuple((inv[src[a]], inv[dst[a]]) for a in sorted(range(m), key=label.__getitem__))
            tab = tuple(
                sorted((label[g], label[f], label[h]) for (g, f), h in table.items())
            )
            code = (shape, tab)
            if best is None or code < best:
                best = code
    return best


def _materialize(n, code, name=None) -> FinCategory:
    shape, tab = code
    objs = list(OBJECT_NAMES[:n])
    names = {}
    counter: dict = {}
    for a, (s, t) in enumerate(shape):
        if a < n:
            names[a] = identity_name(objs[a])
        else:
            counter[(s, t)] = counter.get((s, t), 0) + 1
            names[a] = f"{objs[s]}{objs[t]}{counter[(s, t)]}"
    arrows = [(names[a], objs[s], objs[t]) for a, (s, t) in enumerate(shape)]
    ids = {objs[i]: names[i] for i in range(n)}
    compose = {(names[g], names[f]): names[h] for g, f, h in tab}
    return FinCategory(objs, arrows, ids, compose, name=name, check=False)


_CAT_CACHE: dict = {}


def enumerate_categories(max_objects: int, max_arrows: int, min_objects: int = 1, deadline: float | None = None):
    """Every category with ``min_objects..max_objects`` objects and at most ``max_arrows`` arrows, once per iso class.

    Categories come out ordered by object count, then arrow count, then
    encoding.  ``deadline`` (a ``time.monotonic`` value) stops the search
    early with :class:`TimeoutError`.
    """
    for n in range(min_objects, max_objects + 1):
        for m in range(n, max_arrows + 1):
            key = (n, m)
            if key not in _CAT_CACHE:
                codes = set()
                for hom in _hom_matrices(n, m):
                    if sum(hom.values()) != m:
                        continue
                    for arrows, table in _tables(n, hom):
                        if deadline is not None and time.monotonic() > deadline:
                            raise TimeoutError((n, m))
                        codes.add(_canonical(n, arrows, table))
                _CAT_CACHE[key] = [_materialize(n, c, name=f"K{n}.{m}.{i}") for i, c in enumerate(sorted(codes))]
            yield from _CAT_CACHE[key]


def small_categories(max_objects: int, max_arrows: int) -> list[FinCategory]:
    return list(enumerate_categories(max_objects, max_arrows))


# fibrations


def presheaves_on(C: FinCategory, max_size: int):
    """Set-valued presheaves on ``C`` with fibers of size ``0..max_size`` (labelled, deterministic)."""
    sizes = product(range(max_size + 1), repeat=len(C.objects))
    non_id = [g for g in C.arrows if not C.is_identity(g)]
    for combo in sizes:
        sets = {c: [f"{c}{k}" for k in range(n)] for c, n in zip(C.objects, combo)}
        choices = [list(product(sets[C.src[g]], repeat=len(sets[C.dst[g]]))) for g in non_id]
        for pick in product(*choices):
            maps = {g: dict(zip(sets[C.dst[g]], img)) for g, img in zip(non_id, pick)}
            ok = True
            for g, f in C.composable_pairs():
                gf = C._comp[(g, f)]
                mg = maps.get(g) or {x: x for x in sets[C.dst[g]]}
                mf = maps.get(f) or {x: x for x in sets[C.dst[f]]}
                mgf = maps.get(gf) or {x: x for x in sets[C.dst[gf]]}
                if any(mgf[x] != mf[mg[x]] for x in sets[C.dst[g]]):
                    ok = False
                    break
            if ok:
                D = presheaf_indexed(C, sets, maps)
                D.name = "P" + "".join(str(n) for n in combo)
                yield D


def fibration_corpus(max_base_objects=2, max_base_arrows=3, max_fiber=2, max_total_objects=4, constant_fibers=(2, 3)):
    """``(base, indexed category, total)`` over small bases.

    Discrete fibers come from every presheaf with fibers of size at most
    ``max_fiber``; non-discrete ones from constant indexed categories whose
    fiber ranges over categories within ``constant_fibers``.
    """
    for C in enumerate_categories(max_base_objects, max_base_arrows):
        for D in presheaves_on(C, max_fiber):
            if sum(len(D.fiber[c].objects) for c in C.objects) > max_total_objects:
                continue
            yield C, D, grothendieck_construction(D)
        if constant_fibers:
            for E in small_categories(*constant_fibers):
                if len(E.objects) * len(C.objects) > max_total_objects:
                    continue
                D = constant_indexed(C, E)
                D.name = f"const({E.name})"
                yield C, D, grothendieck_construction(D)


# relative problems


@dataclass(frozen=True)
class Bounds:
    """Exhaustive tier: base, source and target categories within ``exhaustive_*``.

    The random tier draws categories with up to ``max_objects`` objects, at
    most ``max_arrows`` arrows and at most ``max_extra_arrows`` non-identity
    arrows.
    """

    max_objects: int = 4
    max_arrows: int = 7
    max_extra_arrows: int = 3
    exhaustive_objects: int = 2
    exhaustive_arrows: int = 3
    exhaustive_side_arrows: int = 2
    random_count: int = 200
    max_fiber: int = 2


def comorphism_topologies(p: FinFunctor, J: Topology):
    """Topologies on the source of ``p`` making it a comorphism into ``(target, J)``."""
    floor = minimal_comorphism_topology(p, J)
    for K in enumerate_topologies(p.source):
        if topology_leq(floor, K):
            yield K


def minimal_comorphism_topology(p: FinFunctor, J: Topology, extra=None) -> Topology:
    """Least topology on the source of ``p`` making ``p`` a comorphism, closed together with ``extra`` covers."""
    D = p.source
    basis: dict = {d: list((extra or {}).get(d, ())) for d in D.objects}
    for d in D.objects:
        into = D.arrows_into(d)
        for S in J.covers(p.object_map[d]):
            basis[d].append(frozenset(f for f in into if p.arrow_map[f] in S))
    return generate_topology(D, basis)


def _problems_over(C, J, D, p, K, D2, p2, K2, names):
    for A in enumerate_functors(D, D2):
        pA = compose_functors(p2, A)
        for phi in enumerate_nat_transforms(pA, p):
            yield make_problem(C, J, D, K, p, D2, K2, p2, A, phi.components, name=names())


def exhaustive_problems(bounds: Bounds = Bounds()):
    """Every problem whose base has at most ``exhaustive_objects`` objects and ``exhaustive_arrows`` arrows.

    The two sides range over categories with at most ``exhaustive_objects``
    objects and ``exhaustive_side_arrows`` arrows, with every comorphism and
    every topology that makes it one.
    """
    counter = iter(range(10**9))
    names = lambda: f"E{next(counter)}"
    bases = small_categories(bounds.exhaustive_objects, bounds.exhaustive_arrows)
    sides = small_categories(bounds.exhaustive_objects, bounds.exhaustive_side_arrows)
    for C in bases:
        for J in enumerate_topologies(C):
            legs = []
            for D in sides:
                for p in enumerate_functors(D, C):
                    for K in comorphism_topologies(p, J):
                        legs.append((D, p, K))
            for D, p, K in legs:
                for D2, p2, K2 in legs:
                    yield from _problems_over(C, J, D, p, K, D2, p2, K2, names)


def _random_topology(rng: random.Random, cat: FinCategory, max_basis: int = 2) -> Topology:
    basis: dict = {c: [] for c in cat.objects}
    for _ in range(rng.randint(0, max_basis) if cat.objects else 0):
        c = rng.choice(cat.objects)
        basis[c].append(rng.choice(all_sieves(cat, c)))
    return generate_topology(cat, basis)


def random_pool(bounds: Bounds) -> list[FinCategory]:
    out = []
    for n in range(1, bounds.max_objects + 1):
        cap = min(bounds.max_arrows, n + bounds.max_extra_arrows)
        out.extend(enumerate_categories(n, cap, min_objects=n))
    return out


def random_problems(bounds: Bounds = Bounds(), seed: int = 0, count: int | None = None):
    """Seeded problems with categories of up to ``max_objects`` objects and ``max_arrows`` arrows."""
    rng = random.Random(seed)
    pool = random_pool(bounds)
    count = bounds.random_count if count is None else count
    made = 0
    attempts = 0
    while made < count and attempts < 50 * count:
        attempts += 1
        C, D, D2 = rng.choice(pool), rng.choice(pool), rng.choice(pool)
        J = _random_topology(rng, C)
        ps = list(enumerate_functors(D, C))
        p2s = list(enumerate_functors(D2, C))
        As = list(enumerate_functors(D, D2))
        if not ps or not p2s or not As:
            continue
        p, p2, A = rng.choice(ps), rng.choice(p2s), rng.choice(As)
        phis = list(enumerate_nat_transforms(compose_functors(p2, A), p))
        if not phis:
            continue
        phi = rng.choice(phis)
        K = minimal_comorphism_topology(p, J, _random_topology(rng, D).table() if rng.random() < 0.5 else None)
        K2 = minimal_comorphism_topology(p2, J, _random_topology(rng, D2).table() if rng.random() < 0.5 else None)
        yield make_problem(C, J, D, K, p, D2, K2, p2, A, phi.components, name=f"R{seed}.{made}")
        made += 1


def fibration_morphisms(seed: int = 0, max_base_objects=2, max_base_arrows=3, max_fiber=2, constant_fibers=(2, 2)):
    """Problems built from maps of discrete-fibered indexed categories with Giraud topologies.

    Yields ``(problem, is_fibration_morphism, is_site_morphism)``; every
    strictly natural family of fiber maps is tried.
    """
    rng = random.Random(seed)
    for C in enumerate_categories(max_base_objects, max_base_arrows):
        for J in enumerate_topologies(C):
            sheaves = list(presheaves_on(C, max_fiber))
            for D in sheaves:
                GD = grothendieck_construction(D)
                for D2 in sheaves:
                    GD2 = grothendieck_construction(D2)
                    for maps in _fiber_maps(C, D, D2):
                        A = indexed_functor(D, D2, maps, GD, GD2)
                        phi = {X: C.identity[GD.projection.object_map[X]] for X in GD.carrier.objects}
                        K, K2 = giraud_topology(GD, J), giraud_topology(GD2, J)
                        if rng.random() < 0.25:
                            K2 = minimal_comorphism_topology(GD2.projection, J, _random_topology(rng, GD2.carrier, 1).table())
                        prob = make_problem(
                            C, J, GD.carrier, K, GD.projection, GD2.carrier, K2, GD2.projection, A, phi,
                            name=f"F{D.name}->{D2.name}",
                        )
                        fm = check_fibration_morphism(A, prob.phi, GD2.projection).ok
                        sm = check_site_morphism(A, K, K2).ok
                        yield prob, fm, sm
            # constant indexed categories with non-discrete fibers
            for E in small_categories(*constant_fibers):
                for E2 in small_categories(*constant_fibers):
                    T, T2 = constant_indexed(C, E), constant_indexed(C, E2)
                    T.name, T2.name = f"const({E.name})", f"const({E2.name})"
                    GT, GT2 = grothendieck_construction(T), grothendieck_construction(T2)
                    for F in enumerate_functors(E, E2):
                        A = indexed_functor(T, T2, {c: F for c in C.objects}, GT, GT2)
                        phi = {X: C.identity[GT.projection.object_map[X]] for X in GT.carrier.objects}
                        K, K2 = giraud_topology(GT, J), giraud_topology(GT2, J)
                        prob = make_problem(
                            C, J, GT.carrier, K, GT.projection, GT2.carrier, K2, GT2.projection, A, phi,
                            name=f"F{T.name}->{T2.name}",
                        )
                        fm = check_fibration_morphism(A, prob.phi, GT2.projection).ok
                        sm = check_site_morphism(A, K, K2).ok
                        yield prob, fm, sm


def _fiber_maps(C: FinCategory, D: IndexedCategory, D2: IndexedCategory):
    """Strictly natural families of maps between discrete fibers."""
    objs = C.objects
    choices = [list(product(D2.fiber[c].objects, repeat=len(D.fiber[c].objects))) for c in objs]
    for pick in product(*choices):
        fn = {c: dict(zip(D.fiber[c].objects, img)) for c, img in zip(objs, pick)}
        ok = all(
            fn[C.src[g]][D.transition[g].object_map[x]] == D2.transition[g].object_map[fn[C.dst[g]][x]]
            for g in C.arrows
            for x in D.fiber[C.dst[g]].objects
        )
        if not ok:
            continue
        maps = {}
        for c in objs:
            F1, F2 = D.fiber[c], D2.fiber[c]
            maps[c] = FinFunctor(F1, F2, fn[c], {F1.identity[x]: F2.identity[fn[c][x]] for x in F1.objects})
        yield maps


def corpus_problems(bounds: Bounds = Bounds(), seed: int = 0, exhaustive_limit: int | None = None):
    """The exhaustive tier followed by the seeded random tier."""
    for i, prob in enumerate(exhaustive_problems(bounds)):
        if exhaustive_limit is not None and i >= exhaustive_limit:
            break
        yield prob
    yield from random_problems(bounds, seed)
