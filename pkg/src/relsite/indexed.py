"""Strict indexed categories and their Grothendieck construction."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    CategoryError,
    FinCategory,
    FinFunctor,
    Id,
    NatTransform,
    functor_violation,
)
from .topology import Topology, close_sieve
from .verdict import Verdict


class NotStrict(CategoryError):
    pass


@dataclass(eq=False)
class IndexedCategory:
    """``base^op -> Cat``: a fiber per object, ``transition[g]: fiber(c') -> fiber(c)`` for ``g: c -> c'``."""

    base: FinCategory
    fiber: dict
    transition: dict
    name: str | None = None


def strictness_violation(D: IndexedCategory):
    C = D.base
    for c in C.objects:
        if c not in D.fiber:
            return ("missing fiber", c)
    for g in C.arrows:
        F = D.transition.get(g)
        if F is None:
            return ("missing transition", g)
        if F.source is not D.fiber[C.dst[g]] or F.target is not D.fiber[C.src[g]]:
            return ("transition endpoints", g)
        if functor_violation(F) is not None:
            return ("transition not a functor", g)
    for c in C.objects:
        F = D.transition[C.identity[c]]
        if any(F.object_map[x] != x for x in F.source.objects) or any(F.arrow_map[a] != a for a in F.source.arrows):
            return ("identity", c)
    for g, f in C.composable_pairs():
        gf = C._comp[(g, f)]
        Fg, Ff, Fgf = D.transition[g], D.transition[f], D.transition[gf]
        # D(g∘f) = D(f)∘D(g)
        for x in Fg.source.objects:
            if Fgf.object_map[x] != Ff.object_map[Fg.object_map[x]]:
                return ("composition", (g, f))
        for a in Fg.source.arrows:
            if Fgf.arrow_map[a] != Ff.arrow_map[Fg.arrow_map[a]]:
                return ("composition", (g, f))
    return None


def validate_indexed(D: IndexedCategory) -> IndexedCategory:
    v = strictness_violation(D)
    if v is not None:
        raise NotStrict(f"indexed category fails: {v[0]} at {v[1]!r}", v)
    return D


def constant_indexed(base: FinCategory, fiber: FinCategory) -> IndexedCategory:
    ident = FinFunctor(fiber, fiber, {x: x for x in fiber.objects}, {a: a for a in fiber.arrows})
    return IndexedCategory(base, {c: fiber for c in base.objects}, {g: ident for g in base.arrows})


def presheaf_indexed(base: FinCategory, sets: dict, maps: dict) -> IndexedCategory:
    """Discrete fibers: ``sets[c]`` and restriction functions ``maps[g]: sets[c'] -> sets[c]``."""
    fibers = {c: FinCategory.build(list(sets[c]), [], name=f"D({c})") for c in base.objects}
    trans = {}
    for g in base.arrows:
        s, t = base.src[g], base.dst[g]
        fn = dict(maps[g]) if not base.is_identity(g) else {x: x for x in sets[t]}
        trans[g] = FinFunctor(
            fibers[t],
            fibers[s],
            fn,
            {fibers[t].identity[x]: fibers[s].identity[fn[x]] for x in sets[t]},
        )
    return IndexedCategory(base, fibers, trans)


def total_object(x, c) -> str:
    return f"{x}@{c}"


def total_arrow(v, g, X, Y) -> str:
    return f"({v},{g}):{X}->{Y}"


@dataclass(eq=False)
class TotalCategory:
    carrier: FinCategory
    projection: FinFunctor
    cartesian_arrows: frozenset
    indexed: IndexedCategory
    object_tags: dict = field(default_factory=dict)
    arrow_tags: dict = field(default_factory=dict)


def grothendieck_construction(D: IndexedCategory) -> TotalCategory:
    """``G(D)`` with objects ``x@c`` and arrows ``(v, g)``, ``v: x -> D(g)(x')``."""
    validate_indexed(D)
    C = D.base
    objects, otags = [], {}
    for c in C.objects:
        for x in D.fiber[c].objects:
            X = total_object(x, c)
            objects.append(X)
            otags[X] = (x, c)
    arrows, atags = [], {}
    lookup = {}
    for X in objects:
        x, c = otags[X]
        Fc = D.fiber[c]
        for Y in objects:
            y, c2 = otags[Y]
            for g in C.hom(c, c2):
                target = D.transition[g].object_map[y]
                for v in Fc.hom(x, target):
                    a = total_arrow(v, g, X, Y)
                    arrows.append((a, X, Y))
                    atags[a] = (v, g)
                    lookup[(X, Y, v, g)] = a
    ids = {X: lookup[(X, X, D.fiber[otags[X][1]].identity[otags[X][0]], C.identity[otags[X][1]])] for X in objects}
    by_src: dict = {}
    for a, X, Y in arrows:
        by_src.setdefault(X, []).append((a, Y))
    table = {}
    for a, X, Y in arrows:
        v, g = atags[a]
        c = otags[X][1]
        for b, Z in by_src.get(Y, []):
            v2, g2 = atags[b]
            w = D.fiber[c]._comp[(D.transition[g].arrow_map[v2], v)]
            table[(b, a)] = lookup[(X, Z, w, C._comp[(g2, g)])]
    carrier = FinCategory(objects, arrows, ids, table, name=f"G({D.name or 'D'})", check=False)
    proj = FinFunctor(
        carrier,
        C,
        {X: otags[X][1] for X in objects},
        {a: atags[a][1] for a in carrier.arrows},
        name="p_D",
    )
    cart = frozenset(a for a in carrier.arrows if D.fiber[otags[carrier.src[a]][1]].is_identity(atags[a][0]))
    return TotalCategory(carrier, proj, cart, D, otags, atags)


def is_cartesian(p: FinFunctor, a: Id) -> bool:
    """Strong universal property of ``a: y -> x`` over ``p(a)``."""
    E, B = p.source, p.target
    y, x = E.src[a], E.dst[a]
    g = p.arrow_map[a]
    for psi in E.arrows_into(x):
        z = E.src[psi]
        for h in B.hom(p.object_map[z], p.object_map[y]):
            if B._comp[(g, h)] != p.arrow_map[psi]:
                continue
            lifts = [chi for chi in E.hom(z, y) if p.arrow_map[chi] == h and E._comp[(a, chi)] == psi]
            if len(lifts) != 1:
                return False
    return True


def cartesian_arrows(p: FinFunctor) -> frozenset:
    return frozenset(a for a in p.source.arrows if is_cartesian(p, a))


def check_fibration(p: FinFunctor) -> Verdict:
    E, B = p.source, p.target
    cart = cartesian_arrows(p)
    for x in E.objects:
        for g in B.arrows_into(p.object_map[x]):
            if not any(p.arrow_map[a] == g for a in E.arrows_into(x) if a in cart):
                return Verdict(False, {"object": x, "arrow": g, "reason": "no cartesian lift"})
    return Verdict(True)


def giraud_topology(total: TotalCategory, J: Topology) -> Topology:
    """Covers contain cartesian arrows whose projections generate a ``J``-cover."""
    p, C, cart = total.projection, J.category, total.cartesian_arrows

    def rule(X, members):
        return J.is_covering(p.object_map[X], close_sieve(C, (p.arrow_map[a] for a in members if a in cart)))

    return Topology(total.carrier, rule=rule, name=f"J_{total.indexed.name or 'D'}")


def check_fibration_morphism(A: FinFunctor, phi: NatTransform, p_prime: FinFunctor) -> Verdict:
    """``phi: p'∘A ⇒ p`` invertible and ``A`` cartesian-preserving."""
    p = phi.target_functor
    C = p.target
    for d in A.source.objects:
        if not C.is_iso(phi.components[d]):
            return Verdict(False, {"component": d, "arrow": phi.components[d], "reason": "not invertible"})
    for a in A.source.arrows:
        if is_cartesian(p, a) and not is_cartesian(p_prime, A.arrow_map[a]):
            return Verdict(False, {"arrow": a, "image": A.arrow_map[a], "reason": "cartesian arrow not preserved"})
    return Verdict(True)


def indexed_functor(D: IndexedCategory, D2: IndexedCategory, fiber_maps: dict, total=None, total2=None) -> FinFunctor:
    """Functor ``G(D) -> G(D2)`` from strictly compatible fiber functors ``fiber_maps[c]``."""
    T1 = total or grothendieck_construction(D)
    T2 = total2 or grothendieck_construction(D2)
    omap, amap = {}, {}
    for X in T1.carrier.objects:
        x, c = T1.object_tags[X]
        omap[X] = total_object(fiber_maps[c].object_map[x], c)
    for a in T1.carrier.arrows:
        v, g = T1.arrow_tags[a]
        c = T1.object_tags[T1.carrier.src[a]][1]
        amap[a] = total_arrow(fiber_maps[c].arrow_map[v], g, omap[T1.carrier.src[a]], omap[T1.carrier.dst[a]])
    return FinFunctor(T1.carrier, T2.carrier, omap, amap)
