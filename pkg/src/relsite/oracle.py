"""Brute-force presheaf oracle.

Everything here works with explicit finite sets of sections; none of it shares
search code with the combinatorial checkers.  Quotients use a union-find and
name each class by its least representative in declared order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .core import CategoryError, FinCategory, FinFunctor, UnknownObject, comma_over_object, partition
from .topology import Topology
from .verdict import Verdict


class PresheafError(CategoryError):
    pass


@dataclass(eq=False)
class FinPresheaf:
    """``sections[x]`` is an ordered tuple; ``restriction[f]`` maps ``sections[dst f]`` to ``sections[src f]``."""

    category: FinCategory
    sections: dict
    restriction: dict
    name: str | None = None

    def __post_init__(self):
        self.sections = {x: tuple(self.sections.get(x, ())) for x in self.category.objects}

    def size(self) -> dict:
        return {x: len(s) for x, s in self.sections.items()}

    def restrict(self, f, s):
        return self.restriction[f][s]

    def __repr__(self):
        return f"<FinPresheaf {self.name or ''} {self.size()}>"


@dataclass(eq=False)
class PresheafMorphism:
    source: FinPresheaf
    target: FinPresheaf
    components: dict = field(default_factory=dict)

    def __call__(self, x, s):
        return self.components[x][s]


def presheaf_violation(P: FinPresheaf):
    C = P.category
    for f in C.arrows:
        r = P.restriction.get(f)
        if r is None:
            return ("missing restriction", f)
        src, dst = set(P.sections[C.src[f]]), P.sections[C.dst[f]]
        if set(r) != set(dst) or any(r[s] not in src for s in dst):
            return ("restriction endpoints", f)
    for x in C.objects:
        if any(P.restriction[C.identity[x]][s] != s for s in P.sections[x]):
            return ("identity", x)
    for g, f in C.composable_pairs():
        gf = C._comp[(g, f)]
        for s in P.sections[C.dst[g]]:
            if P.restriction[gf][s] != P.restriction[f][P.restriction[g][s]]:
                return ("functoriality", (g, f))
    return None


def validate_presheaf(P: FinPresheaf) -> FinPresheaf:
    v = presheaf_violation(P)
    if v is not None:
        raise PresheafError(f"not a presheaf: {v[0]} at {v[1]!r}", v)
    return P


def morphism_violation(m: PresheafMorphism):
    P, Q = m.source, m.target
    C = P.category
    for x in C.objects:
        comp = m.components.get(x)
        if comp is None or set(comp) != set(P.sections[x]) or any(comp[s] not in set(Q.sections[x]) for s in comp):
            return ("component", x)
    for f in C.arrows:
        y, x = C.dst[f], C.src[f]
        for s in P.sections[y]:
            if m.components[x][P.restriction[f][s]] != Q.restriction[f][m.components[y][s]]:
                return ("naturality", f)
    return None


def validate_morphism(m: PresheafMorphism) -> PresheafMorphism:
    v = morphism_violation(m)
    if v is not None:
        raise PresheafError(f"not a presheaf morphism: {v[0]} at {v[1]!r}", v)
    return m


# basic presheaves


def representable(cat: FinCategory, c) -> FinPresheaf:
    if c not in cat.obj_index:
        raise UnknownObject(f"unknown object {c!r}", c)
    comp = cat._comp
    sections = {x: tuple(cat.hom(x, c)) for x in cat.objects}
    restriction = {f: {g: comp[(g, f)] for g in sections[cat.dst[f]]} for f in cat.arrows}
    return FinPresheaf(cat, sections, restriction, name=f"Y({c})")


def empty_presheaf(cat: FinCategory) -> FinPresheaf:
    return FinPresheaf(cat, {}, {f: {} for f in cat.arrows}, name="0")


def terminal_presheaf(cat: FinCategory) -> FinPresheaf:
    return FinPresheaf(cat, {x: ("*",) for x in cat.objects}, {f: {"*": "*"} for f in cat.arrows}, name="1")


def restrict_along(p: FinFunctor, P: FinPresheaf) -> FinPresheaf:
    D = p.source
    sections = {d: P.sections[p.object_map[d]] for d in D.objects}
    restriction = {m: dict(P.restriction[p.arrow_map[m]]) for m in D.arrows}
    return FinPresheaf(D, sections, restriction, name=f"{P.name or 'P'}∘p")


def coproduct(P: FinPresheaf, Q: FinPresheaf) -> FinPresheaf:
    C = P.category
    sections = {x: tuple((0, s) for s in P.sections[x]) + tuple((1, s) for s in Q.sections[x]) for x in C.objects}
    restriction = {}
    for f in C.arrows:
        r = {(0, s): (0, t) for s, t in P.restriction[f].items()}
        r.update({(1, s): (1, t) for s, t in Q.restriction[f].items()})
        restriction[f] = r
    return FinPresheaf(C, sections, restriction, name=f"{P.name}+{Q.name}")


def codiagonal(P: FinPresheaf) -> PresheafMorphism:
    """The fold map ``P ⊔ P -> P``."""
    S = coproduct(P, P)
    return PresheafMorphism(S, P, {x: {s: s[1] for s in S.sections[x]} for x in P.category.objects})


def identity_morphism(P: FinPresheaf) -> PresheafMorphism:
    return PresheafMorphism(P, P, {x: {s: s for s in P.sections[x]} for x in P.category.objects})


# colimits


def _quotient(elements: list, relation, key) -> dict:
    """Map each element to the least member of its class."""
    classes = partition(elements, relation)
    rep = {}
    for block in classes:
        least = min(block, key=key)
        for e in block:
            rep[e] = least
    return rep


@dataclass(eq=False)
class Colimit:
    presheaf: FinPresheaf
    leg: dict  # (i, x, h) -> class

    def cocone(self, i) -> dict:
        return {k[1:]: v for k, v in self.leg.items() if k[0] == i}


def colimit_of_representables(diagram: FinFunctor) -> Colimit:
    """``colim_i Y(diagram(i))``: classes of ``(i, h: x -> diagram(i))``."""
    I, T = diagram.source, diagram.target
    comp = T._comp
    key = lambda e: (I.obj_index[e[0]], T.arrow_index[e[1]])
    reps = {}
    sections = {}
    for x in T.objects:
        elems = [(i, h) for i in I.objects for h in T.hom(x, diagram.object_map[i])]
        rel = [((i, h), (I.dst[a], comp[(diagram.arrow_map[a], h)])) for (i, h) in elems for a in I.arrows_from(i)]
        reps[x] = _quotient(elems, rel, key)
        sections[x] = tuple(sorted(set(reps[x].values()), key=key))
    restriction = {}
    for f in T.arrows:
        y, x = T.dst[f], T.src[f]
        restriction[f] = {s: reps[x][(s[0], comp[(s[1], f)])] for s in sections[y]}
    P = FinPresheaf(T, sections, restriction, name="colim")
    legs = {(i, x, h): reps[x][(i, h)] for x in T.objects for (i, h) in reps[x]}
    return Colimit(P, legs)


def left_kan_presheaf(A: FinFunctor, P: FinPresheaf) -> FinPresheaf:
    """Pointwise ``Lan``: classes of ``(d, h: d' -> A(d), y ∈ P(d))``."""
    D, E = A.source, A.target
    comp = E._comp
    pos = {d: {s: i for i, s in enumerate(P.sections[d])} for d in D.objects}
    key = lambda e: (D.obj_index[e[0]], E.arrow_index[e[1]], pos[e[0]][e[2]])
    reps, sections = {}, {}
    for x in E.objects:
        elems = [(d, h, y) for d in D.objects for h in E.hom(x, A.object_map[d]) for y in P.sections[d]]
        rel = []
        for m in D.arrows:
            d, e = D.src[m], D.dst[m]
            for h in E.hom(x, A.object_map[d]):
                for y in P.sections[e]:
                    rel.append(((d, h, P.restriction[m][y]), (e, comp[(A.arrow_map[m], h)], y)))
        reps[x] = _quotient(elems, rel, key)
        sections[x] = tuple(sorted(set(reps[x].values()), key=key))
    restriction = {}
    for f in E.arrows:
        y, x = E.dst[f], E.src[f]
        restriction[f] = {s: reps[x][(s[0], comp[(s[1], f)], s[2])] for s in sections[y]}
    return FinPresheaf(E, sections, restriction, name=f"Lan({P.name or 'P'})")


def is_bijection(m: PresheafMorphism) -> bool:
    for x in m.source.category.objects:
        img = [m.components[x][s] for s in m.source.sections[x]]
        if len(set(img)) != len(img) or set(img) != set(m.target.sections[x]):
            return False
    return True


def isomorphic_by(P: FinPresheaf, Q: FinPresheaf, components: dict) -> bool:
    return is_bijection(PresheafMorphism(P, Q, components)) and morphism_violation(PresheafMorphism(P, Q, components)) is None


# the comparison map


def build_phi_tilde(prob, c) -> PresheafMorphism:
    """``colim_{(d,v) ∈ (p↓c)} Y(A(d)) -> C(p'(-), c)``, class of ``((d, v), h)`` ↦ ``v∘φ_d∘p'(h)``."""
    C, D2 = prob.C, prob.D2
    comma = comma_over_object(prob.p, c)
    I = comma.carrier
    diagram = FinFunctor(
        I,
        D2,
        {X: prob.A.object_map[X[0]] for X in I.objects},
        {a: prob.A.arrow_map[comma.arrow_tags[a][0]] for a in I.arrows},
    )
    source = colimit_of_representables(diagram).presheaf
    target = restrict_along(prob.p_prime, representable(C, c))
    comp = C._comp
    components = {}
    for x in D2.objects:
        components[x] = {
            s: comp[(s[0][1], comp[(prob.phi.components[s[0][0]], prob.p_prime.arrow_map[s[1]])])]
            for s in source.sections[x]
        }
    return PresheafMorphism(source, target, components)


# local surjectivity and injectivity


def is_locally_surjective(m: PresheafMorphism, K: Topology) -> Verdict:
    Q = m.target
    C = Q.category
    images = {x: set(m.components[x].values()) for x in C.objects}
    for x in C.objects:
        for y in Q.sections[x]:
            sieve = frozenset(f for f in C.arrows_into(x) if Q.restriction[f][y] in images[C.src[f]])
            if not K.is_covering(x, sieve):
                return Verdict(False, {"object": x, "section": y})
    return Verdict(True)


def is_locally_injective(m: PresheafMorphism, K: Topology) -> Verdict:
    P = m.source
    C = P.category
    for x in C.objects:
        by_image: dict = {}
        for s in P.sections[x]:
            by_image.setdefault(m.components[x][s], []).append(s)
        for group in by_image.values():
            for s1, s2 in combinations(group, 2):
                sieve = frozenset(f for f in C.arrows_into(x) if P.restriction[f][s1] == P.restriction[f][s2])
                if not K.is_covering(x, sieve):
                    return Verdict(False, {"object": x, "sections": [s1, s2]})
    return Verdict(True)


def is_local_isomorphism(m: PresheafMorphism, K: Topology) -> Verdict:
    return Verdict.all_of({"locally_surjective": is_locally_surjective(m, K), "locally_injective": is_locally_injective(m, K)})


def oracle_verdict(prob) -> Verdict:
    """Local isomorphism of the comparison map at every base object."""
    K2 = prob.right.topology
    surj, inj = Verdict(True), Verdict(True)
    for c in prob.C.objects:
        m = build_phi_tilde(prob, c)
        if surj:
            v = is_locally_surjective(m, K2)
            if not v:
                surj = Verdict(False, {"c": c, **v.witness})
        if inj:
            v = is_locally_injective(m, K2)
            if not v:
                inj = Verdict(False, {"c": c, **v.witness})
    return Verdict.all_of({"locally_surjective": surj, "locally_injective": inj})


# plus construction


def minimal_cover(K: Topology, x) -> frozenset:
    """Intersection of all covering sieves on ``x``; covering since covers are closed under meets."""
    covers = K.covers(x)
    out = frozenset(K.category.arrows_into(x))
    for S in covers:
        out &= S
    return out


def matching_families(P: FinPresheaf, S) -> list[dict]:
    """Every compatible choice ``f ↦ s_f ∈ P(src f)`` over the sieve ``S``."""
    C = P.category
    comp = C._comp
    order = sorted(S, key=C.arrow_index.__getitem__)
    out = []

    def extend(i, fam):
        if i == len(order):
            out.append(dict(fam))
            return
        f = order[i]
        if f in fam:
            extend(i + 1, fam)
            return
        for s in P.sections[C.src[f]]:
            forced = {}
            ok = True
            for g in C.arrows_into(C.src[f]):
                fg, val = comp[(f, g)], P.restriction[g][s]
                have = fam.get(fg, forced.get(fg))
                if have is None:
                    forced[fg] = val
                elif have != val:
                    ok = False
                    break
            if ok:
                extend(i + 1, {**fam, **forced})

    extend(0, {})
    return out


def _family_key(C: FinCategory, fam: dict) -> tuple:
    return tuple(sorted(fam.items(), key=lambda kv: C.arrow_index[kv[0]]))


@dataclass(eq=False)
class PlusData:
    presheaf: FinPresheaf
    cover: dict  # x -> minimal covering sieve
    unit: dict  # x -> {s: family key}


def plus_data(P: FinPresheaf, K: Topology) -> PlusData:
    """``P⁺(x)`` as matching families on the least covering sieve ``M_x``.

    Since ``M_x`` is the least cover, two families on it are identified only
    when they agree on a covering sieve, i.e. everywhere; the quotient is kept
    explicit anyway.
    """
    C = P.category
    comp = C._comp
    M = {x: minimal_cover(K, x) for x in C.objects}
    sections, reps = {}, {}
    for x in C.objects:
        fams = [_family_key(C, f) for f in matching_families(P, M[x])]
        fams.sort(key=lambda k: [(C.arrow_index[a], P.sections[C.src[a]].index(s)) for a, s in k])

        def agree(k1, k2, x=x):
            d1, d2 = dict(k1), dict(k2)
            return K.is_covering(x, frozenset(f for f in M[x] if d1[f] == d2[f]))

        rel = [(k1, k2) for k1, k2 in combinations(fams, 2) if agree(k1, k2)]
        pos = {k: i for i, k in enumerate(fams)}
        reps[x] = _quotient(fams, rel, pos.__getitem__)
        sections[x] = tuple(k for k in fams if reps[x][k] == k)
    restriction = {}
    for h in C.arrows:
        y, x = C.src[h], C.dst[h]
        r = {}
        for k in sections[x]:
            fam = dict(k)
            # M_y lies inside the pullback of M_x along h
            r[k] = reps[y][_family_key(C, {g: fam[comp[(h, g)]] for g in M[y]})]
        restriction[h] = r
    unit = {}
    for x in C.objects:
        unit[x] = {s: reps[x][_family_key(C, {f: P.restriction[f][s] for f in M[x]})] for s in P.sections[x]}
    Q = FinPresheaf(C, sections, restriction, name=f"{P.name or 'P'}+")
    return PlusData(Q, M, unit)


def plus_construction(P: FinPresheaf, K: Topology) -> FinPresheaf:
    return plus_data(P, K).presheaf


def plus_unit(P: FinPresheaf, K: Topology) -> PresheafMorphism:
    d = plus_data(P, K)
    return PresheafMorphism(P, d.presheaf, d.unit)


def plus_morphism(m: PresheafMorphism, K: Topology, source: PlusData | None = None, target: PlusData | None = None) -> PresheafMorphism:
    src = source or plus_data(m.source, K)
    tgt = target or plus_data(m.target, K)
    C = m.source.category
    comps = {}
    for x in C.objects:
        comps[x] = {}
        for k in src.presheaf.sections[x]:
            # both sides use the same least cover M_x
            image = _family_key(C, {f: m.components[C.src[f]][s] for f, s in k})
            comps[x][k] = _rep_in(tgt, x, image, K)
    return PresheafMorphism(src.presheaf, tgt.presheaf, comps)


def _rep_in(data: PlusData, x, key, K):
    if key in set(data.presheaf.sections[x]):
        return key
    fam = dict(key)
    for k in data.presheaf.sections[x]:
        other = dict(k)
        if K.is_covering(x, frozenset(f for f in data.cover[x] if fam[f] == other[f])):
            return k
    raise PresheafError("family has no class", key)


def sheafify(P: FinPresheaf, K: Topology) -> FinPresheaf:
    return plus_construction(plus_construction(P, K), K)


def sheafify_morphism(m: PresheafMorphism, K: Topology) -> PresheafMorphism:
    s1, t1 = plus_data(m.source, K), plus_data(m.target, K)
    m1 = plus_morphism(m, K, s1, t1)
    return plus_morphism(m1, K)


def sheafification_unit(P: FinPresheaf, K: Topology) -> PresheafMorphism:
    d1 = plus_data(P, K)
    d2 = plus_data(d1.presheaf, K)
    comps = {x: {s: d2.unit[x][d1.unit[x][s]] for s in P.sections[x]} for x in P.category.objects}
    return PresheafMorphism(P, d2.presheaf, comps)


def is_sheaf(P: FinPresheaf, K: Topology) -> Verdict:
    """Every matching family on every covering sieve has exactly one amalgamation."""
    C = P.category
    for x in C.objects:
        for S in K.sorted_covers(x):
            for fam in matching_families(P, S):
                amalg = [s for s in P.sections[x] if all(P.restriction[f][s] == v for f, v in fam.items())]
                if len(amalg) != 1:
                    return Verdict(False, {"object": x, "sieve": S, "amalgamations": len(amalg)})
    return Verdict(True)


__all__ = [
    "Colimit",
    "FinPresheaf",
    "PlusData",
    "PresheafError",
    "PresheafMorphism",
    "build_phi_tilde",
    "codiagonal",
    "colimit_of_representables",
    "coproduct",
    "empty_presheaf",
    "identity_morphism",
    "is_bijection",
    "is_local_isomorphism",
    "is_locally_injective",
    "is_locally_surjective",
    "is_sheaf",
    "left_kan_presheaf",
    "matching_families",
    "minimal_cover",
    "oracle_verdict",
    "plus_construction",
    "plus_data",
    "plus_morphism",
    "plus_unit",
    "presheaf_violation",
    "representable",
    "restrict_along",
    "sheafification_unit",
    "sheafify",
    "sheafify_morphism",
    "terminal_presheaf",
    "validate_morphism",
    "validate_presheaf",
]
