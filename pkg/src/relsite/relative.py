"""Checkers deciding whether ``(A, φ)`` between sites over a common base is a morphism over it.

A problem is a base site ``(C, J)``, two comorphisms ``p: (D, K) -> (C, J)``
and ``p': (D', K') -> (C, J)``, a functor ``A: D -> D'`` and a natural
transformation ``φ: p'∘A ⇒ p``.  Throughout, ``φ_d: p'(A(d)) -> p(d)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    CategoryError,
    CommaCategory,
    FinCategory,
    FinFunctor,
    NatTransform,
    _assemble_comma,
    comma_over_identity,
    comma_over_object,
    compose_functors,
    functor_violation,
    nat_transform_violation,
    partition,
)
from .sitecheck import SitePair, check_comorphism, check_cover_preserving, check_filtering, check_site_morphism
from .topology import Topology, close_sieve, comma_giraud_topology, projected_topology, topology_violation
from .verdict import Verdict


class ProblemError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DiscrepancyDetected(RuntimeError):
    def __init__(self, verdict):
        super().__init__(f"criteria proved equivalent disagree: {verdict.discrepancies}")
        self.verdict = verdict


@dataclass(eq=False)
class RelativeProblem:
    base: SitePair
    left: SitePair
    right: SitePair
    p: FinFunctor
    p_prime: FinFunctor
    A: FinFunctor
    phi: NatTransform
    name: str | None = None
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def C(self) -> FinCategory:
        return self.base.category

    @property
    def D(self) -> FinCategory:
        return self.left.category

    @property
    def D2(self) -> FinCategory:
        return self.right.category

    def phi_at(self, d):
        return self.phi.components[d]


def make_problem(C, J, D, K, p, D2, K2, p2, A, phi_components, name=None) -> RelativeProblem:
    phi = NatTransform(compose_functors(p2, A), p, dict(phi_components))
    return RelativeProblem(SitePair(C, J), SitePair(D, K), SitePair(D2, K2), p, p2, A, phi, name=name)


def problem_violation(prob: RelativeProblem, check_topologies: bool = True):
    """First reason ``prob`` is not a valid problem, or ``None``."""
    C, D, D2 = prob.C, prob.D, prob.D2
    for label, F, s, t in (("p", prob.p, D, C), ("p'", prob.p_prime, D2, C), ("A", prob.A, D, D2)):
        if F.source is not s or F.target is not t:
            return (f"{label} has wrong endpoints", None)
        v = functor_violation(F)
        if v is not None:
            return (f"{label} is not a functor", v)
    if check_topologies:
        for label, site in (("J", prob.base), ("K", prob.left), ("K'", prob.right)):
            v = topology_violation(site.topology)
            if v is not None:
                return (f"{label} is not a topology", v)
    t = NatTransform(compose_functors(prob.p_prime, prob.A), prob.p, prob.phi.components)
    v = nat_transform_violation(t)
    if v is not None:
        return ("phi is not natural", v)
    for label, F, site in (("p", prob.p, prob.left), ("p'", prob.p_prime, prob.right)):
        cv = check_comorphism(F, site.topology, prob.base.topology)
        if not cv:
            return (f"{label} is not a comorphism", cv.witness)
    return None


def validate_problem(prob: RelativeProblem, check_topologies: bool = True) -> RelativeProblem:
    v = problem_violation(prob, check_topologies)
    if v is not None:
        raise ProblemError(f"invalid problem: {v[0]}", v[1])
    return prob


# fiber and global functors


def fiber_data(prob: RelativeProblem, c) -> tuple[CommaCategory, CommaCategory, FinFunctor]:
    """``(p↓c)``, ``(p'↓c)`` and ``A_c: (d, v) ↦ (A(d), v∘φ_d)``."""
    key = ("fiber", c)
    if key in prob.cache:
        return prob.cache[key]
    src = comma_over_object(prob.p, c)
    tgt = comma_over_object(prob.p_prime, c)
    C, A = prob.C, prob.A
    omap = {X: (A.object_map[X[0]], C._comp[(X[1], prob.phi_at(X[0]))]) for X in src.carrier.objects}
    amap = {}
    for a in src.carrier.arrows:
        X, Y, (m,) = a
        amap[a] = (omap[X], omap[Y], (A.arrow_map[m],))
    F = FinFunctor(src.carrier, tgt.carrier, omap, amap, name=f"A_{c}")
    prob.cache[key] = (src, tgt, F)
    return prob.cache[key]


def fiber_functor(prob: RelativeProblem, c) -> FinFunctor:
    return fiber_data(prob, c)[2]


def global_data(prob: RelativeProblem) -> tuple[CommaCategory, CommaCategory, FinFunctor]:
    """``(p↓1_C)``, ``(p'↓1_C)`` and ``A_C: (d, c, u) ↦ (A(d), c, u∘φ_d)``."""
    key = ("global",)
    if key in prob.cache:
        return prob.cache[key]
    src = comma_over_identity(prob.p)
    tgt = comma_over_identity(prob.p_prime)
    C, A = prob.C, prob.A
    omap = {X: (A.object_map[X[0]], X[1], C._comp[(X[2], prob.phi_at(X[0]))]) for X in src.carrier.objects}
    amap = {}
    for a in src.carrier.arrows:
        X, Y, (m, n) = a
        amap[a] = (omap[X], omap[Y], (A.arrow_map[m], n))
    F = FinFunctor(src.carrier, tgt.carrier, omap, amap, name="A_C")
    prob.cache[key] = (src, tgt, F)
    return prob.cache[key]


def global_functor(prob: RelativeProblem) -> FinFunctor:
    return global_data(prob)[2]


# cofinality


def _elements(prob: RelativeProblem, x, c):
    """Objects ``(k, w, v)`` of ``(x ↓ A∘π_c)``: ``w: p(k) -> c``, ``v: x -> A(k)``."""
    C, D, D2, p, A = prob.C, prob.D, prob.D2, prob.p, prob.A
    return [
        (k, w, v)
        for k in D.objects
        for w in C.hom(p.object_map[k], c)
        for v in D2.hom(x, A.object_map[k])
    ]


def _element_components(prob: RelativeProblem, x, c) -> dict:
    key = ("components", x, c)
    if key in prob.cache:
        return prob.cache[key]
    C, D, D2, p, A = prob.C, prob.D, prob.D2, prob.p, prob.A
    objs = _elements(prob, x, c)
    index = set(objs)
    edges = []
    for (k, w, v) in objs:
        for m in D.arrows_from(k):
            k2 = D.dst[m]
            v2 = D2._comp[(A.arrow_map[m], v)]
            for w2 in C.hom(p.object_map[k2], c):
                if C._comp[(w2, p.arrow_map[m])] == w and (k2, w2, v2) in index:
                    edges.append(((k, w, v), (k2, w2, v2)))
    label = {}
    for i, block in enumerate(partition(objs, edges)):
        for o in block:
            label[o] = i
    prob.cache[key] = label
    return label


def _image(prob: RelativeProblem, k, w, v):
    """``w∘φ_k∘p'(v)``."""
    C = prob.C
    return C._comp[(w, C._comp[(prob.phi_at(k), prob.p_prime.arrow_map[v])])]


def check_cofinality(prob: RelativeProblem) -> Verdict:
    """Local surjectivity (CS) and local injectivity (CI) of the comparison, for every base object."""
    C, D2, p2, K2 = prob.C, prob.D2, prob.p_prime, prob.right.topology
    comp2 = D2._comp
    cs = Verdict(True)
    ci = Verdict(True)
    for c in C.objects:
        reached = {x: {_image(prob, *o) for o in _elements(prob, x, c)} for x in D2.objects}
        if cs:
            for d2 in D2.objects:
                for u in C.hom(p2.object_map[d2], c):
                    sol = frozenset(
                        f for f in D2.arrows_into(d2) if C._comp[(u, p2.arrow_map[f])] in reached[D2.src[f]]
                    )
                    if not K2.is_covering(d2, sol):
                        cs = Verdict(False, {"c": c, "object": d2, "arrow": u})
                        break
                if not cs:
                    break
        if ci:
            for d2 in D2.objects:
                label = _element_components(prob, d2, c)
                reps: dict = {}
                for o in _elements(prob, d2, c):
                    reps.setdefault(_image(prob, *o), {}).setdefault(label[o], o)
                for img, blocks in reps.items():
                    firsts = list(blocks.values())
                    for i, o1 in enumerate(firsts):
                        for o2 in firsts[i + 1 :]:

                            def joined(f, o1=o1, o2=o2):
                                x = D2.src[f]
                                lab = _element_components(prob, x, c)
                                return lab[(o1[0], o1[1], comp2[(o1[2], f)])] == lab[(o2[0], o2[1], comp2[(o2[2], f)])]

                            sol = frozenset(f for f in D2.arrows_into(d2) if joined(f))
                            if not K2.is_covering(d2, sol):
                                ci = Verdict(False, {"c": c, "object": d2, "pair": [list(o1), list(o2)], "image": img})
                                break
                        if not ci:
                            break
                    if not ci:
                        break
                if not ci:
                    break
    return Verdict.all_of({"local_surjectivity": cs, "local_injectivity": ci})




# relative local filteredness


def _cond_a(prob: RelativeProblem, c) -> Verdict:
    """Every ``χ: p'(d') -> c`` is locally of the form ``u∘φ_d∘p'(γ)``."""
    C, D, D2, p, p2, A, K2 = prob.C, prob.D, prob.D2, prob.p, prob.p_prime, prob.A, prob.right.topology
    memo: dict = {}

    def has_data(x, target):
        key = (x, target)
        if key not in memo:
            memo[key] = any(
                C._comp[(u, C._comp[(prob.phi_at(d), p2.arrow_map[gam])])] == target
                for d in D.objects
                for gam in D2.hom(x, A.object_map[d])
                for u in C.hom(p.object_map[d], c)
            )
        return memo[key]

    for d2 in D2.objects:
        for chi in C.hom(p2.object_map[d2], c):
            sol = frozenset(
                g for g in D2.arrows_into(d2) if has_data(D2.src[g], C._comp[(chi, p2.arrow_map[g])])
            )
            if not K2.is_covering(d2, sol):
                return Verdict(False, {"c": c, "object": d2, "chi": chi})
    return Verdict(True)


def _cond_b(prob: RelativeProblem, c) -> Verdict:
    """Locally, compatible pairs ``u: d' -> A(d1)``, ``v: d' -> A(d2)`` factor through a common span in ``D``."""
    C, D, D2, p, p2, A, K2 = prob.C, prob.D, prob.D2, prob.p, prob.p_prime, prob.A, prob.right.topology
    comp2 = D2._comp
    memo: dict = {}

    def has_span(x, a, b, d1, d2, h1, h2):
        key = (a, b, d1, d2, h1, h2)
        if key not in memo:
            memo[key] = any(
                comp2[(A.arrow_map[s], gam)] == a and comp2[(A.arrow_map[t], gam)] == b
                for d in D.objects
                for s in D.hom(d, d1)
                for t in D.hom(d, d2)
                if C._comp[(h1, p.arrow_map[s])] == C._comp[(h2, p.arrow_map[t])]
                for gam in D2.hom(x, A.object_map[d])
            )
        return memo[key]

    objs = D.objects
    for x in D2.objects:
        for i, d1 in enumerate(objs):
            for d2 in objs[i:]:
                for h1 in C.hom(p.object_map[d1], c):
                    for h2 in C.hom(p.object_map[d2], c):
                        for u in D2.hom(x, A.object_map[d1]):
                            left = _image(prob, d1, h1, u)
                            for v in D2.hom(x, A.object_map[d2]):
                                if left != _image(prob, d2, h2, v):
                                    continue
                                sol = frozenset(
                                    g
                                    for g in D2.arrows_into(x)
                                    if has_span(D2.src[g], comp2[(u, g)], comp2[(v, g)], d1, d2, h1, h2)
                                )
                                if not K2.is_covering(x, sol):
                                    return Verdict(
                                        False,
                                        {"c": c, "object": x, "d1": d1, "d2": d2, "h1": h1, "h2": h2, "u": u, "v": v},
                                    )
    return Verdict(True)


def check_relative_filtered(prob: RelativeProblem) -> Verdict:
    """Relative local filteredness (a), (b), the equalizer condition (c) and cover preservation (d)."""
    parts = {}
    for name, cond in (("a", _cond_a), ("b", _cond_b)):
        v = Verdict(True)
        for c in prob.C.objects:
            v = cond(prob, c)
            if not v:
                break
        parts[name] = v
    parts["c"] = check_filtering(prob.A, prob.right.topology).parts["F3"]
    parts["d"] = check_cover_preserving(prob.A, prob.left.topology, prob.right.topology)
    return Verdict.all_of(parts)


def check_relative_filtered_at(prob: RelativeProblem, c) -> Verdict:
    """Condition (a) alone at one base object."""
    return _cond_a(prob, c)


def check_fiberwise(prob: RelativeProblem) -> Verdict:
    """Every ``A_c: ((p↓c), K_c) -> ((p'↓c), K'_c)`` is a morphism of sites."""
    parts = {}
    for c in prob.C.objects:
        src, tgt, F = fiber_data(prob, c)
        Kc = comma_giraud_topology(src, prob.left.topology, "fiber")
        K2c = comma_giraud_topology(tgt, prob.right.topology, "fiber")
        parts[str(c)] = v = check_site_morphism(F, Kc, K2c)
        if not v:
            return Verdict(False, {"c": c, "witness": v.witness}, parts)
    return Verdict(True, None, parts)


# the diagonal category


@dataclass(eq=False)
class DiagonalData:
    comma: CommaCategory
    diagonal: list
    topology: Topology


def diagonal_objects(prob: RelativeProblem) -> list:
    """Objects ``((d', c', u'), (d, c, u), g, f)`` of ``(1 ↓ A_C)``.

    ``g: d' -> A(d)`` and ``f: c' -> c`` with ``u∘φ_d∘p'(g) = f∘u'``.
    """
    C, D, D2, p, p2, A = prob.C, prob.D, prob.D2, prob.p, prob.p_prime, prob.A
    left = [(d2, c2, u2) for d2 in D2.objects for c2 in C.objects for u2 in C.hom(p2.object_map[d2], c2)]
    right = [(d, c, u) for d in D.objects for c in C.objects for u in C.hom(p.object_map[d], c)]
    out = []
    for chi in left:
        d2, c2, u2 = chi
        for xi in right:
            d, c, u = xi
            for g in D2.hom(d2, A.object_map[d]):
                img = _image(prob, d, u, g)
                for f in C.hom(c2, c):
                    if C._comp[(f, u2)] == img:
                        out.append((chi, xi, g, f))
    return out


def is_diagonal(prob: RelativeProblem, X) -> bool:
    chi, xi, g, f = X
    return chi[1] == xi[1] and f == prob.C.identity[xi[1]]


def diagonal_category(prob: RelativeProblem) -> DiagonalData:
    """The comma ``(1_{(p'↓1_C)} ↓ A_C)``, its diagonal objects, and the topology ``K̃``."""
    C, D, D2, p, p2, A = prob.C, prob.D, prob.D2, prob.p, prob.p_prime, prob.A
    objects = diagonal_objects(prob)
    entries = []
    for X in objects:
        (x2, xc2, xu2), (xd, xc, xu), xg, xf = X
        for Y in objects:
            (y2, yc2, yu2), (yd, yc, yu), yg, yf = Y
            for t in D2.hom(x2, y2):
                for n in C.hom(xc2, yc2):
                    if C._comp[(yu2, p2.arrow_map[t])] != C._comp[(n, xu2)]:
                        continue
                    for m in D.hom(xd, yd):
                        if D2._comp[(A.arrow_map[m], xg)] != D2._comp[(yg, t)]:
                            continue
                        for k in C.hom(xc, yc):
                            if C._comp[(yu, p.arrow_map[m])] != C._comp[(k, xu)]:
                                continue
                            if C._comp[(k, xf)] != C._comp[(yf, n)]:
                                continue
                            entries.append((X, Y, (t, n, m, k)))
    carrier = _assemble_comma(
        objects,
        entries,
        lambda b, a: (
            D2._comp[(b[0], a[0])],
            C._comp[(b[1], a[1])],
            D._comp[(b[2], a[2])],
            C._comp[(b[3], a[3])],
        ),
        lambda X: (D2.identity[X[0][0]], C.identity[X[0][1]], D.identity[X[1][0]], C.identity[X[1][1]]),
        name="(1↓A_C)",
    )
    proj = FinFunctor(carrier, D2, {X: X[0][0] for X in objects}, {a: a[2][0] for a in carrier.arrows}, name="π_D'")
    comma = CommaCategory(carrier, "diagonal", {X: X for X in objects}, {a: a[2] for a in carrier.arrows}, {"D'": proj})
    topo = projected_topology(carrier, proj, prob.right.topology, name="K~")
    return DiagonalData(comma, [X for X in objects if is_diagonal(prob, X)], topo)


def check_diagonal_density(prob: RelativeProblem) -> Verdict:
    """Every comma object is covered by arrows out of diagonal objects.

    An arrow from a diagonal object over ``x'`` into ``X`` with ``D'``-part
    ``t`` exists exactly when there are ``d``, ``γ: x' -> A(d)``,
    ``m: d -> d_X`` and ``w: p(d) -> c'_X`` with ``u'_X∘p'(t) = w∘φ_d∘p'(γ)``,
    ``u_X∘p(m) = f_X∘w`` and ``A(m)∘γ = g_X∘t``; the diagonal object is
    ``((x', c'_X, w∘φ_d∘p'(γ)), (d, c'_X, w), γ, id)`` and the arrow is
    ``((t, id), (m, f_X))``.
    """
    C, D, D2, p, p2, A, K2 = prob.C, prob.D, prob.D2, prob.p, prob.p_prime, prob.A, prob.right.topology
    memo: dict = {}
    for X in diagonal_objects(prob):
        if is_diagonal(prob, X):
            continue
        (d2, c2, u2), (dX, cX, uX), gX, fX = X

        def reached(t):
            key = (t, c2, u2, dX, uX, gX, fX)
            if key not in memo:
                x = D2.src[t]
                target = C._comp[(u2, p2.arrow_map[t])]
                gt = D2._comp[(gX, t)]
                memo[key] = any(
                    _image(prob, d, w, gam) == target
                    and C._comp[(uX, p.arrow_map[m])] == C._comp[(fX, w)]
                    and D2._comp[(A.arrow_map[m], gam)] == gt
                    for d in D.objects
                    for gam in D2.hom(x, A.object_map[d])
                    for m in D.hom(d, dX)
                    for w in C.hom(p.object_map[d], c2)
                )
            return memo[key]

        sol = close_sieve(D2, [t for t in D2.arrows_into(d2) if reached(t)])
        if not K2.is_covering(d2, sol):
            return Verdict(False, {"object": _plain(X)})
    return Verdict(True)


def check_diagonal_density_direct(prob: RelativeProblem, data: DiagonalData | None = None) -> Verdict:
    """Density read off the materialized comma: arrows from diagonal objects into each object."""
    data = data or diagonal_category(prob)
    carrier = data.comma.carrier
    diag = set(data.diagonal)
    for X in carrier.objects:
        gens = [a for a in carrier.arrows_into(X) if carrier.src[a] in diag]
        if not data.topology.is_covering(X, close_sieve(carrier, gens)):
            return Verdict(False, {"object": _plain(X)})
    return Verdict(True)


def _plain(x):
    if isinstance(x, tuple):
        return [_plain(y) for y in x]
    return x


# aggregate verdict


@dataclass
class RelativeVerdict:
    criteria: dict
    site_morphism: Verdict
    discrepancies: list
    aggregate: bool

    @property
    def discrepancy(self) -> bool:
        return bool(self.discrepancies)

    def as_dict(self) -> dict:
        return {
            "aggregate": self.aggregate,
            "site_morphism": self.site_morphism.as_dict(),
            "criteria": {k: v.as_dict() for k, v in self.criteria.items()},
            "discrepancy": self.discrepancy,
            "discrepancies": self.discrepancies,
        }


CRITERIA = ("cofinality", "filtered", "fiberwise", "diagonal", "oracle")


def relative_verdict(prob: RelativeProblem, include_oracle: bool = True, criteria=None, strict: bool = False) -> RelativeVerdict:
    """Run the criteria and flag any disagreement between criteria that must agree.

    ``filtered`` and ``fiberwise`` must always agree, as must ``cofinality``
    and ``oracle``; when ``A`` is a morphism of sites all criteria must agree.
    """
    wanted = list(criteria or [c for c in CRITERIA if include_oracle or c != "oracle"])
    runners = {
        "cofinality": check_cofinality,
        "filtered": check_relative_filtered,
        "fiberwise": check_fiberwise,
        "diagonal": check_diagonal_density,
    }
    results = {}
    for name in wanted:
        if name == "oracle":
            from .oracle import oracle_verdict

            results[name] = oracle_verdict(prob)
        else:
            results[name] = runners[name](prob)
    sm = check_site_morphism(prob.A, prob.left.topology, prob.right.topology)
    issues = []

    def agree(a, b, why):
        if a in results and b in results and results[a].ok != results[b].ok:
            issues.append({"between": [a, b], "reason": why, a: results[a].ok, b: results[b].ok})

    agree("filtered", "fiberwise", "fiberwise morphism of sites vs relative filteredness")
    agree("cofinality", "oracle", "cofinality vs sheafified comparison")
    if "filtered" in results and "oracle" in results:
        surj = results["oracle"].parts.get("locally_surjective")
        a_part = results["filtered"].parts.get("a")
        if surj is not None and a_part is not None and surj.ok != a_part.ok:
            issues.append({"between": ["filtered.a", "oracle.locally_surjective"], "reason": "condition (a) vs local surjectivity"})
    if sm.ok:
        agree("cofinality", "filtered", "cofinality vs relative filteredness for a morphism of sites")
        agree("filtered", "diagonal", "relative filteredness vs diagonal density for a morphism of sites")
        agree("cofinality", "diagonal", "cofinality vs diagonal density for a morphism of sites")
    aggregate = sm.ok and all(v.ok for v in results.values())
    out = RelativeVerdict(results, sm, issues, aggregate)
    if strict and issues:
        raise DiscrepancyDetected(out)
    return out
