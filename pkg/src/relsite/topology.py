"""Sieves and Grothendieck topologies on finite categories."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .core import CategoryError, CommaCategory, FinCategory, Id, UnknownObject


class TopologyError(ValueError):
    pass


class WrongCodomain(TopologyError):
    pass


class EndpointMismatch(TopologyError):
    pass


class CarrierMismatch(TopologyError):
    pass


class BadCommaTags(TopologyError):
    pass


class AxiomViolation(TopologyError):
    def __init__(self, axiom: str, witness):
        super().__init__(f"{axiom} axiom fails at {witness!r}")
        self.axiom = axiom
        self.witness = witness


@dataclass(frozen=True)
class Sieve:
    base_object: Id
    members: frozenset

    def __contains__(self, a):
        return a in self.members

    def __len__(self):
        return len(self.members)


def close_sieve(cat: FinCategory, generators: Iterable[Id]) -> frozenset:
    """Precomposition closure; one step suffices because ``h∘k`` is again an arrow."""
    out = set()
    comp = cat._comp
    for g in generators:
        for h in cat.arrows_into(cat.src[g]):
            out.add(comp[(g, h)])
    return frozenset(out)


def generate_sieve(cat: FinCategory, c: Id, generators: Iterable[Id]) -> Sieve:
    if c not in cat.obj_index:
        raise UnknownObject(f"unknown object {c!r}", c)
    gens = list(generators)
    for g in gens:
        if cat.dst.get(g) != c:
            raise WrongCodomain(f"generator {g!r} does not end at {c!r}")
    return Sieve(c, close_sieve(cat, gens))


def maximal_sieve(cat: FinCategory, c: Id) -> frozenset:
    return frozenset(cat.arrows_into(c))


def pullback_members(cat: FinCategory, S: frozenset, h: Id) -> frozenset:
    comp = cat._comp
    return frozenset(g for g in cat.arrows_into(cat.src[h]) if comp[(h, g)] in S)


def pullback_sieve(cat: FinCategory, S: Sieve, h: Id) -> Sieve:
    if cat.dst[h] != S.base_object:
        raise EndpointMismatch(f"{h!r} does not end at {S.base_object!r}")
    return Sieve(cat.src[h], pullback_members(cat, S.members, h))


def is_sieve(cat: FinCategory, c: Id, members: Iterable[Id]) -> bool:
    m = frozenset(members)
    if any(cat.dst[g] != c for g in m):
        return False
    return close_sieve(cat, m) == m


def all_sieves(cat: FinCategory, c: Id) -> tuple[frozenset, ...]:
    """Every sieve on ``c``, as unions of principal sieves, smallest first."""
    key = ("sieves", c)
    if key in cat.cache:
        return cat.cache[key]
    principal = []
    for h in cat.arrows_into(c):
        ph = close_sieve(cat, [h])
        if ph not in principal:
            principal.append(ph)
    found = {frozenset()}
    for ph in principal:
        found |= {s | ph for s in found}
    order = {a: i for i, a in enumerate(cat.arrows)}
    result = tuple(sorted(found, key=lambda s: (len(s), sorted(order[a] for a in s))))
    cat.cache[key] = result
    return result


class Topology:
    """Covering sieves per object.

    Either an explicit ``covers`` table or a membership ``rule(c, members)``;
    rule-defined topologies materialize their table on first request.
    """

    def __init__(
        self,
        category: FinCategory,
        covers: Mapping[Id, Iterable[Iterable[Id]]] | None = None,
        rule: Callable[[Id, frozenset], bool] | None = None,
        name: str | None = None,
    ):
        if (covers is None) == (rule is None):
            raise TypeError("give exactly one of covers or rule")
        self.category = category
        self.name = name
        self.rule = rule
        self._covers: dict | None = None
        if covers is not None:
            self._covers = {c: frozenset(frozenset(s) for s in covers.get(c, ())) for c in category.objects}
            extra = set(covers) - set(category.objects)
            if extra:
                raise UnknownObject(f"covers name unknown objects {sorted(map(str, extra))}", extra)

    def is_covering(self, c: Id, members) -> bool:
        if self._covers is not None:
            return frozenset(members) in self._covers[c]
        return self.rule(c, frozenset(members))

    def covers(self, c: Id) -> frozenset:
        if self._covers is None:
            self._covers = {
                x: frozenset(s for s in all_sieves(self.category, x) if self.rule(x, s))
                for x in self.category.objects
            }
        return self._covers[c]

    def table(self) -> dict:
        return {c: self.covers(c) for c in self.category.objects}

    def sorted_covers(self, c: Id) -> list[list[Id]]:
        order = self.category.arrow_index
        return sorted((sorted(s, key=order.__getitem__) for s in self.covers(c)), key=lambda s: (len(s), [order[a] for a in s]))

    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return self.category == other.category and self.table() == other.table()

    def __hash__(self):
        return hash(tuple(self.table().items()))

    def __repr__(self):
        n = sum(len(self.covers(c)) for c in self.category.objects)
        return f"<Topology {self.name or ''} on {self.category!r}: {n} covering sieves>"


def trivial_topology(cat: FinCategory) -> Topology:
    return Topology(cat, {c: [maximal_sieve(cat, c)] for c in cat.objects}, name="trivial")


def largest_topology(cat: FinCategory) -> Topology:
    return Topology(cat, {c: all_sieves(cat, c) for c in cat.objects}, name="largest")


def topology_violation(T: Topology):
    """First axiom failure as ``(axiom, witness)``, or ``None``."""
    cat = T.category
    for c in cat.objects:
        for S in T.covers(c):
            if not is_sieve(cat, c, S):
                return ("well-formedness", (c, S))
    for c in cat.objects:
        if maximal_sieve(cat, c) not in T.covers(c):
            return ("maximality", c)
    for c in cat.objects:
        for S in T.covers(c):
            for h in cat.arrows_into(c):
                if pullback_members(cat, S, h) not in T.covers(cat.src[h]):
                    return ("stability", (c, S, h))
    for c in cat.objects:
        covers_c = T.covers(c)
        for S in all_sieves(cat, c):
            if S in covers_c:
                continue
            local = {h for h in cat.arrows_into(c) if pullback_members(cat, S, h) in T.covers(cat.src[h])}
            if any(R <= local for R in covers_c):
                return ("transitivity", (c, S))
    return None


def validate_topology(T: Topology) -> Topology:
    v = topology_violation(T)
    if v is not None:
        raise AxiomViolation(*v)
    return T


def _close_topology(cat: FinCategory, covers: dict[Id, set]) -> dict[Id, set]:
    """Least family containing ``covers`` and closed under the three axioms (in place)."""
    for c in cat.objects:
        covers[c].add(maximal_sieve(cat, c))
    changed = True
    while changed:
        changed = False
        for c in cat.objects:
            for S in list(covers[c]):
                for h in cat.arrows_into(c):
                    x = cat.src[h]
                    P = pullback_members(cat, S, h)
                    if P not in covers[x]:
                        covers[x].add(P)
                        changed = True
        for c in cat.objects:
            for S in all_sieves(cat, c):
                if S in covers[c]:
                    continue
                local = {h for h in cat.arrows_into(c) if pullback_members(cat, S, h) in covers[cat.src[h]]}
                if any(R <= local for R in covers[c]):
                    covers[c].add(S)
                    changed = True
    return covers


def generate_topology(cat: FinCategory, basis: Mapping[Id, Iterable[Iterable[Id]]] | None = None, name=None) -> Topology:
    basis = basis or {}
    covers: dict[Id, set] = {c: set() for c in cat.objects}
    for c, sieves in basis.items():
        if c not in covers:
            raise UnknownObject(f"unknown object {c!r}", c)
        for S in sieves:
            S = frozenset(S)
            if not is_sieve(cat, c, S):
                raise TopologyError(f"basis entry on {c!r} is not a sieve: {sorted(map(str, S))}")
            covers[c].add(S)
    return Topology(cat, _close_topology(cat, covers), name=name)


def topology_leq(T1: Topology, T2: Topology) -> bool:
    if T1.category is not T2.category and T1.category != T2.category:
        raise CarrierMismatch("topologies live on different categories")
    return all(T1.covers(c) <= T2.covers(c) for c in T1.category.objects)


def enumerate_topologies(cat: FinCategory):
    """Every Grothendieck topology on ``cat`` (Ganter's NextClosure over covering sieves).

    Topologies are the closed sets of :func:`generate_topology`; they are
    produced in lectic order, the trivial topology first.
    """
    ground = [(c, S) for c in cat.objects for S in all_sieves(cat, c) if S != maximal_sieve(cat, c)]
    n = len(ground)

    def closure(bits: frozenset) -> frozenset:
        covers: dict[Id, set] = {c: set() for c in cat.objects}
        for i in bits:
            c, S = ground[i]
            covers[c].add(S)
        _close_topology(cat, covers)
        index = {g: i for i, g in enumerate(ground)}
        return frozenset(index[(c, S)] for c in cat.objects for S in covers[c] if (c, S) in index)

    def emit(bits):
        covers = {c: [maximal_sieve(cat, c)] for c in cat.objects}
        for i in sorted(bits):
            c, S = ground[i]
            covers[c].append(S)
        return Topology(cat, covers)

    A = closure(frozenset())
    yield emit(A)
    while True:
        for i in range(n - 1, -1, -1):
            if i in A:
                continue
            B = closure(frozenset(j for j in A if j < i) | {i})
            if all(j in A for j in B if j < i):
                A = B
                yield emit(A)
                break
        else:
            return


def comma_giraud_topology(comma: CommaCategory, K: Topology, variant: str = "fiber") -> Topology:
    """Topology on a comma whose covers project to ``K``-covers on ``D``.

    ``variant`` is ``"fiber"`` for a comma built by ``comma_over_object`` and
    ``"global"`` for one built by ``comma_over_identity``.
    """
    expected = {"fiber": "over_object", "global": "over_identity"}.get(variant)
    if expected is None:
        raise ValueError(f"unknown variant {variant!r}")
    if comma.shape != expected or "D" not in comma.projections:
        raise BadCommaTags(f"{variant} variant needs a comma of shape {expected!r}")
    proj = comma.projections["D"]
    if proj.target is not K.category and proj.target != K.category:
        raise CarrierMismatch("K lives on a different category than the comma's projection")
    D = K.category

    def rule(X, members):
        return K.is_covering(proj.object_map[X], close_sieve(D, (proj.arrow_map[a] for a in members)))

    return Topology(comma.carrier, rule=rule, name=f"{K.name or 'K'}_{variant}")


def projected_topology(cat: FinCategory, proj, K: Topology, name=None) -> Topology:
    """Covers are the sieves whose image under ``proj`` generates a ``K``-cover."""
    D = K.category

    def rule(X, members):
        return K.is_covering(proj.object_map[X], close_sieve(D, (proj.arrow_map[a] for a in members)))

    return Topology(cat, rule=rule, name=name)


__all__ = [
    "AxiomViolation",
    "BadCommaTags",
    "CarrierMismatch",
    "CategoryError",
    "EndpointMismatch",
    "Sieve",
    "Topology",
    "TopologyError",
    "WrongCodomain",
    "all_sieves",
    "close_sieve",
    "comma_giraud_topology",
    "enumerate_topologies",
    "generate_sieve",
    "generate_topology",
    "is_sieve",
    "largest_topology",
    "maximal_sieve",
    "projected_topology",
    "pullback_members",
    "pullback_sieve",
    "topology_leq",
    "topology_violation",
    "trivial_topology",
    "validate_topology",
]
