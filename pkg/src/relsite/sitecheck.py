"""Comorphisms, cover preservation and the filtering conditions for a morphism of sites.

Every existential "there is a covering family such that ..." is decided by
collecting the arrows ``g: x -> d'`` for which the required data exists.  That
set is closed under precomposition, so the condition holds exactly when this
sieve of solutions is covering.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import FinCategory, FinFunctor
from .topology import Topology, close_sieve, topology_violation
from .verdict import Verdict


@dataclass(eq=False)
class SitePair:
    category: FinCategory
    topology: Topology

    def __post_init__(self):
        if self.topology.category is not self.category and self.topology.category != self.category:
            raise ValueError("topology lives on another category")


def validate_site(site: SitePair) -> SitePair:
    v = topology_violation(site.topology)
    if v is not None:
        from .topology import AxiomViolation

        raise AxiomViolation(*v)
    return site


def _arrow_list(cat, members):
    order = cat.arrow_index
    return sorted(members, key=order.__getitem__)


def check_comorphism(p: FinFunctor, K: Topology, J: Topology) -> Verdict:
    """Every ``J``-cover of ``p(d)`` contains the image of some ``K``-cover of ``d``."""
    D = p.source
    for d in D.objects:
        into = D.arrows_into(d)
        for S in J.sorted_covers(p.object_map[d]):
            S = frozenset(S)
            # the largest candidate refinement; covers are upward closed
            pre = frozenset(f for f in into if p.arrow_map[f] in S)
            if not K.is_covering(d, pre):
                return Verdict(False, {"object": d, "sieve": _arrow_list(p.target, S)})
    return Verdict(True)


def check_cover_preserving(A: FinFunctor, K: Topology, K2: Topology) -> Verdict:
    D, E = A.source, A.target
    for d in D.objects:
        for S in K.sorted_covers(d):
            image = close_sieve(E, (A.arrow_map[f] for f in S))
            if not K2.is_covering(A.object_map[d], image):
                return Verdict(False, {"object": d, "sieve": S})
    return Verdict(True)


def _solutions(E: FinCategory, d2, test) -> frozenset:
    return frozenset(g for g in E.arrows_into(d2) if test(g))


def check_filtering(A: FinFunctor, K2: Topology) -> Verdict:
    """The three local filtering conditions of ``A: D -> D'`` against ``K'``."""
    D, E = A.source, A.target
    comp = E._comp
    Aobj, Aarr = A.object_map, A.arrow_map

    # F1: every d' is covered by arrows from objects that map into the image of A
    reaches = {x: any(E.hom(x, Aobj[d]) for d in D.objects) for x in E.objects}
    f1 = Verdict(True)
    for d2 in E.objects:
        sol = _solutions(E, d2, lambda g: reaches[E.src[g]])
        if not K2.is_covering(d2, sol):
            f1 = Verdict(False, {"object": d2})
            break

    # F2: cones over pairs u: d' -> A(d1), v: d' -> A(d2)
    memo2: dict = {}

    def cone(x, a, b, d1, d2):
        key = (a, b, d1, d2)
        if key not in memo2:
            memo2[key] = any(
                comp[(Aarr[s], gam)] == a and comp[(Aarr[t], gam)] == b
                for d in D.objects
                for gam in E.hom(x, Aobj[d])
                for s in D.hom(d, d1)
                for t in D.hom(d, d2)
            )
        return memo2[key]

    f2 = Verdict(True)
    for d2 in E.objects:
        if not f2:
            break
        for i, da in enumerate(D.objects):
            if not f2:
                break
            for db in D.objects[i:]:
                if not f2:
                    break
                for u in E.hom(d2, Aobj[da]):
                    if not f2:
                        break
                    for v in E.hom(d2, Aobj[db]):
                        sol = _solutions(
                            E, d2, lambda g: cone(E.src[g], comp[(u, g)], comp[(v, g)], da, db)
                        )
                        if not K2.is_covering(d2, sol):
                            f2 = Verdict(False, {"object": d2, "d1": da, "d2": db, "u": u, "v": v})
                            break

    # F3: equalizing data for f1, f2: d1 => d2 and g: d' -> A(d1) with A(f1)g = A(f2)g
    memo3: dict = {}

    def equalized(x, a, f1, f2, d1):
        key = (a, f1, f2)
        if key not in memo3:
            memo3[key] = any(
                comp[(Aarr[k], gam)] == a
                for d in D.objects
                for k in D.hom(d, d1)
                if D._comp[(f1, k)] == D._comp[(f2, k)]
                for gam in E.hom(x, Aobj[d])
            )
        return memo3[key]

    f3 = Verdict(True)
    for d1 in D.objects:
        if not f3:
            break
        for dd in D.objects:
            if not f3:
                break
            par = D.hom(d1, dd)
            for i, fa in enumerate(par):
                if not f3:
                    break
                for fb in par[i + 1 :]:
                    if not f3:
                        break
                    for d2 in E.objects:
                        if not f3:
                            break
                        for g in E.hom(d2, Aobj[d1]):
                            if comp[(Aarr[fa], g)] != comp[(Aarr[fb], g)]:
                                continue
                            sol = _solutions(E, d2, lambda h: equalized(E.src[h], comp[(g, h)], fa, fb, d1))
                            if not K2.is_covering(d2, sol):
                                f3 = Verdict(False, {"f1": fa, "f2": fb, "object": d2, "g": g})
                                break
    return Verdict.all_of({"F1": f1, "F2": f2, "F3": f3})


def check_site_morphism(A: FinFunctor, K: Topology, K2: Topology) -> Verdict:
    return Verdict.all_of({"cover_preserving": check_cover_preserving(A, K, K2), "filtering": check_filtering(A, K2)})
