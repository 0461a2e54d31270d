"""Finite categories, functors, natural transformations and comma categories.

Every object and arrow carries a hashable identifier; the order in which they
are declared is the order used by every enumeration and every witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Hashable, Iterable, Mapping, Sequence

from scipy.cluster.hierarchy import DisjointSet

Id = Hashable


class CategoryError(ValueError):
    """Raised when a category description violates the axioms."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class UnknownObject(CategoryError):
    pass


class UnknownArrow(CategoryError):
    pass


class MissingComposite(CategoryError):
    pass


class BadComposite(CategoryError):
    pass


class BadIdentity(CategoryError):
    pass


class NonAssociative(CategoryError):
    pass


class NotFunctorial(CategoryError):
    pass


class NotNatural(CategoryError):
    pass


def identity_name(obj: Id) -> str:
    return f"id:{obj}"


class FinCategory:
    """A finite category given by an explicit composition table.

    ``compose(g, f)`` is ``g ∘ f`` and is defined exactly when
    ``dst(f) == src(g)``.  Construct through :func:`validate_category` or
    :meth:`build` unless the table is known to be lawful (``check=False``).
    """

    def __init__(
        self,
        objects: Sequence[Id],
        arrows: Sequence[tuple[Id, Id, Id]],
        identities: Mapping[Id, Id],
        compose: Mapping[tuple[Id, Id], Id],
        name: str | None = None,
        check: bool = True,
    ):
        self.name = name
        self.objects = tuple(objects)
        self.arrows = tuple(a for a, _, _ in arrows)
        self.src = {a: s for a, s, _ in arrows}
        self.dst = {a: t for a, _, t in arrows}
        self.identity = dict(identities)
        self._comp = dict(compose)
        self.obj_index = {x: i for i, x in enumerate(self.objects)}
        self.arrow_index = {a: i for i, a in enumerate(self.arrows)}
        if len(self.obj_index) != len(self.objects):
            raise CategoryError("duplicate object identifier")
        if len(self.arrow_index) != len(self.arrows):
            raise CategoryError("duplicate arrow identifier")
        self._hom: dict[tuple[Id, Id], list[Id]] = {}
        self._into: dict[Id, list[Id]] = {x: [] for x in self.objects}
        self._from: dict[Id, list[Id]] = {x: [] for x in self.objects}
        for a in self.arrows:
            s, t = self.src[a], self.dst[a]
            if s not in self.obj_index or t not in self.obj_index:
                raise UnknownObject(f"arrow {a!r} has unknown endpoint", a)
            self._hom.setdefault((s, t), []).append(a)
            self._into[t].append(a)
            self._from[s].append(a)
        self._identities = frozenset(self.identity.values())
        self.cache: dict[Any, Any] = {}
        if check:
            _check_category(self)

    # construction helpers

    @classmethod
    def build(
        cls,
        objects: Sequence[Id],
        arrows: Sequence[tuple[Id, Id, Id]],
        compose: Iterable[tuple[Id, Id, Id]] = (),
        name: str | None = None,
    ) -> "FinCategory":
        """Category from non-identity arrows and ``(g, f, g∘f)`` triples.

        Identities are added as ``id:<object>`` and their composites filled in.
        """
        ids = {x: identity_name(x) for x in objects}
        all_arrows = [(ids[x], x, x) for x in objects] + list(arrows)
        table: dict[tuple[Id, Id], Id] = {}
        dst = {a: t for a, _, t in all_arrows}
        src = {a: s for a, s, _ in all_arrows}
        for a, s, t in all_arrows:
            table[(ids[t], a)] = a
            table[(a, ids[s])] = a
        for g, f, h in compose:
            if (g, f) in table and table[(g, f)] != h:
                raise BadIdentity(f"composite {g}∘{f} conflicts with identity law", (g, f))
            table[(g, f)] = h
        for (g, f) in table:
            if g not in dst or f not in dst:
                raise UnknownArrow(f"composite mentions unknown arrow in {(g, f)!r}", (g, f))
            if src[g] != dst[f]:
                raise BadComposite(f"{g}∘{f} is not composable", (g, f))
        return cls(objects, all_arrows, ids, table, name=name)

    # queries

    def compose(self, g: Id, f: Id) -> Id:
        try:
            return self._comp[(g, f)]
        except KeyError:
            raise BadComposite(f"{g!r}∘{f!r} is undefined", (g, f)) from None

    def comp(self, *arrows: Id) -> Id:
        """Composite of a chain, written left to right as in ``g ∘ f ∘ e``."""
        result = arrows[-1]
        for g in reversed(arrows[:-1]):
            result = self._comp[(g, result)]
        return result

    def hom(self, x: Id, y: Id) -> list[Id]:
        return self._hom.get((x, y), [])

    def arrows_into(self, c: Id) -> list[Id]:
        return self._into[c]

    def arrows_from(self, c: Id) -> list[Id]:
        return self._from[c]

    def is_identity(self, a: Id) -> bool:
        return a in self._identities

    def composable_pairs(self):
        for f in self.arrows:
            for g in self._from[self.dst[f]]:
                yield g, f

    def inverse(self, a: Id) -> Id | None:
        s, t = self.src[a], self.dst[a]
        for b in self.hom(t, s):
            if self._comp[(b, a)] == self.identity[s] and self._comp[(a, b)] == self.identity[t]:
                return b
        return None

    def is_iso(self, a: Id) -> bool:
        return self.inverse(a) is not None

    def table(self) -> dict[tuple[Id, Id], Id]:
        return dict(self._comp)

    def describe(self) -> dict:
        """Plain description accepted back by :func:`validate_category`."""
        return {
            "objects": list(self.objects),
            "arrows": [{"id": a, "src": self.src[a], "dst": self.dst[a]} for a in self.arrows],
            "identities": {x: self.identity[x] for x in self.objects},
            "compose": [[g, f, self._comp[(g, f)]] for g, f in self.composable_pairs()],
        }

    def __len__(self):
        return len(self.arrows)

    def __repr__(self):
        label = self.name or "FinCategory"
        return f"<{label}: {len(self.objects)} objects, {len(self.arrows)} arrows>"

    def __eq__(self, other):
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.arrows == other.arrows
            and self.src == other.src
            and self.dst == other.dst
            and self.identity == other.identity
            and self._comp == other._comp
        )

    def __hash__(self):
        return hash((self.objects, self.arrows))


def _check_category(cat: FinCategory) -> None:
    for x in cat.objects:
        i = cat.identity.get(x)
        if i is None or i not in cat.src:
            raise BadIdentity(f"object {x!r} has no identity arrow", x)
        if cat.src[i] != x or cat.dst[i] != x:
            raise BadIdentity(f"identity of {x!r} has wrong endpoints", i)
    for (g, f), h in cat._comp.items():
        if g not in cat.src or f not in cat.src or h not in cat.src:
            raise UnknownArrow(f"composition entry {(g, f, h)!r} names an unknown arrow", (g, f, h))
        if cat.src[g] != cat.dst[f]:
            raise BadComposite(f"entry {g}∘{f} is not composable", (g, f))
    for g, f in cat.composable_pairs():
        if (g, f) not in cat._comp:
            raise MissingComposite(f"composite {g}∘{f} is missing", (g, f))
        h = cat._comp[(g, f)]
        if cat.src[h] != cat.src[f] or cat.dst[h] != cat.dst[g]:
            if cat.is_identity(g) or cat.is_identity(f):
                raise BadIdentity(f"{g}∘{f} = {h} has wrong endpoints", (g, f))
            raise BadComposite(f"{g}∘{f} = {h} has wrong endpoints", (g, f))
    for f in cat.arrows:
        if cat._comp[(cat.identity[cat.dst[f]], f)] != f or cat._comp[(f, cat.identity[cat.src[f]])] != f:
            raise BadIdentity(f"identity law fails at {f!r}", f)
    for f in cat.arrows:
        for g in cat.arrows_from(cat.dst[f]):
            gf = cat._comp[(g, f)]
            for h in cat.arrows_from(cat.dst[g]):
                if cat._comp[(h, gf)] != cat._comp[(cat._comp[(h, g)], f)]:
                    raise NonAssociative(f"({h}∘{g})∘{f} != {h}∘({g}∘{f})", (h, g, f))


def validate_category(raw: Mapping | FinCategory, name: str | None = None) -> FinCategory:
    """Build and check a category from a plain description.

    ``raw`` holds ``objects``, ``arrows`` (``{id, src, dst}`` mappings or
    triples, identities may be omitted) and ``compose`` as ``[g, f, g∘f]``
    triples.  Identities default to ``id:<object>``; composites with an
    identity may be omitted and are then filled in by the unit laws.
    """
    if isinstance(raw, FinCategory):
        _check_category(raw)
        return raw
    objects = list(raw["objects"])
    idents = dict(raw.get("identities") or {x: identity_name(x) for x in objects})
    arrows: list[tuple[Id, Id, Id]] = []
    seen = set()
    for entry in raw.get("arrows", []):
        if isinstance(entry, Mapping):
            a, s, t = entry["id"], entry["src"], entry["dst"]
        else:
            a, s, t = entry
        arrows.append((a, s, t))
        seen.add(a)
    for x in objects:
        if x not in idents:
            raise BadIdentity(f"object {x!r} has no identity", x)
        if idents[x] not in seen:
            arrows.insert(0, (idents[x], x, x))
            seen.add(idents[x])
    src = {a: s for a, s, _ in arrows}
    dst = {a: t for a, _, t in arrows}
    table: dict[tuple[Id, Id], Id] = {}
    for g, f, h in raw.get("compose", []):
        for a in (g, f, h):
            if a not in src:
                raise UnknownArrow(f"composition entry {[g, f, h]!r} names unknown arrow {a!r}", a)
        if (g, f) in table and table[(g, f)] != h:
            raise BadComposite(f"composite {g}∘{f} declared twice", (g, f))
        table[(g, f)] = h
    identity_set = set(idents.values())
    for (g, f), h in table.items():
        if (g in identity_set or f in identity_set) and h != (f if g in identity_set else g):
            raise BadIdentity(f"{g}∘{f} declared as {h}", (g, f))
    for a, s, t in arrows:
        table.setdefault((idents[t], a), a)
        table.setdefault((a, idents[s]), a)
    del dst
    return FinCategory(objects, arrows, idents, table, name=name)


def terminal_category(obj: Id = "*", name: str | None = "1") -> FinCategory:
    return FinCategory.build([obj], [], name=name)


def empty_category(name: str | None = "0") -> FinCategory:
    return FinCategory([], [], {}, {}, name=name)


def discrete_category(objects: Sequence[Id], name: str | None = None) -> FinCategory:
    return FinCategory.build(objects, [], name=name)


def preorder_category(objects: Sequence[Id], leq: Iterable[tuple[Id, Id]], name: str | None = None) -> FinCategory:
    """Thin category on ``objects``; ``leq`` is closed reflexively and transitively."""
    rel = {(x, x) for x in objects} | set(leq)
    changed = True
    while changed:
        changed = False
        for (x, y) in list(rel):
            for (y2, z) in list(rel):
                if y == y2 and (x, z) not in rel:
                    rel.add((x, z))
                    changed = True
    name_of = {(x, y): (identity_name(x) if x == y else f"{x}<{y}") for (x, y) in rel}
    arrows = [(name_of[(x, y)], x, y) for x in objects for y in objects if (x, y) in rel and x != y]
    comps = [
        (name_of[(y, z)], name_of[(x, y)], name_of[(x, z)])
        for (x, y) in rel
        for (y2, z) in rel
        if y == y2 and x != y and y != z
    ]
    return FinCategory.build(objects, arrows, comps, name=name)


@dataclass(eq=False)
class FinFunctor:
    source: FinCategory
    target: FinCategory
    object_map: dict
    arrow_map: dict
    name: str | None = None

    def __call__(self, x):
        return self.object_map[x]

    def arr(self, a):
        return self.arrow_map[a]

    def image_sieve_generators(self, arrows: Iterable[Id]) -> set:
        return {self.arrow_map[a] for a in arrows}

    def __repr__(self):
        label = self.name or "FinFunctor"
        return f"<{label}: {self.source!r} -> {self.target!r}>"


def functor_violation(F: FinFunctor):
    """First violation of the functor laws in declared order, or ``None``."""
    S, T = F.source, F.target
    for x in S.objects:
        if x not in F.object_map or F.object_map[x] not in T.obj_index:
            return ("object", x)
    for a in S.arrows:
        b = F.arrow_map.get(a)
        if b is None or b not in T.arrow_index:
            return ("arrow", a)
        if T.src[b] != F.object_map[S.src[a]] or T.dst[b] != F.object_map[S.dst[a]]:
            return ("endpoints", a)
    for x in S.objects:
        if F.arrow_map[S.identity[x]] != T.identity[F.object_map[x]]:
            return ("identity", x)
    am = F.arrow_map
    for g, f in S.composable_pairs():
        if am[S._comp[(g, f)]] != T._comp[(am[g], am[f])]:
            return ("composition", (g, f))
    return None


def validate_functor(F: FinFunctor) -> FinFunctor:
    v = functor_violation(F)
    if v is not None:
        raise NotFunctorial(f"functor law fails: {v[0]} at {v[1]!r}", v)
    return F


def identity_functor(cat: FinCategory) -> FinFunctor:
    return FinFunctor(cat, cat, {x: x for x in cat.objects}, {a: a for a in cat.arrows}, name="id")


def constant_functor(source: FinCategory, target: FinCategory, obj: Id) -> FinFunctor:
    i = target.identity[obj]
    return FinFunctor(source, target, {x: obj for x in source.objects}, {a: i for a in source.arrows})


def compose_functors(G: FinFunctor, F: FinFunctor) -> FinFunctor:
    """``G ∘ F``."""
    return FinFunctor(
        F.source,
        G.target,
        {x: G.object_map[y] for x, y in F.object_map.items()},
        {a: G.arrow_map[b] for a, b in F.arrow_map.items()},
    )


def enumerate_functors(source: FinCategory, target: FinCategory):
    """All functors ``source -> target`` in a deterministic order (backtracking)."""
    S, T = source, target
    objs = S.objects
    non_id = [a for a in S.arrows if not S.is_identity(a)]
    pairs_by_last: dict[Id, list[tuple[Id, Id]]] = {a: [] for a in non_id}
    pos = {a: i for i, a in enumerate(non_id)}
    for g, f in S.composable_pairs():
        if S.is_identity(g) or S.is_identity(f):
            continue
        h = S._comp[(g, f)]
        members = [g, f] + ([] if S.is_identity(h) else [h])
        last = max(members, key=pos.__getitem__)
        pairs_by_last[last].append((g, f))

    def image(a, amap, omap):
        if S.is_identity(a):
            return T.identity[omap[S.src[a]]]
        return amap[a]

    for obj_choice in product(T.objects, repeat=len(objs)):
        omap = dict(zip(objs, obj_choice))
        amap: dict[Id, Id] = {}

        def extend(i):
            if i == len(non_id):
                full = {a: image(a, amap, omap) for a in S.arrows}
                yield FinFunctor(S, T, dict(omap), full)
                return
            a = non_id[i]
            for b in T.hom(omap[S.src[a]], omap[S.dst[a]]):
                amap[a] = b
                ok = True
                for g, f in pairs_by_last[a]:
                    h = S._comp[(g, f)]
                    if image(h, amap, omap) != T._comp[(image(g, amap, omap), image(f, amap, omap))]:
                        ok = False
                        break
                if ok:
                    yield from extend(i + 1)
            amap.pop(a, None)

        yield from extend(0)


@dataclass(eq=False)
class NatTransform:
    """A natural transformation ``source_functor ⇒ target_functor``."""

    source_functor: FinFunctor
    target_functor: FinFunctor
    components: dict

    def __getitem__(self, x):
        return self.components[x]


def nat_transform_violation(t: NatTransform):
    F, G = t.source_functor, t.target_functor
    if F.source is not G.source and F.source != G.source:
        return ("parallel", None)
    if F.target is not G.target and F.target != G.target:
        return ("parallel", None)
    S, T = F.source, F.target
    for x in S.objects:
        c = t.components.get(x)
        if c is None or c not in T.src or T.src[c] != F.object_map[x] or T.dst[c] != G.object_map[x]:
            return ("component", x)
    for a in S.arrows:
        s, d = S.src[a], S.dst[a]
        if T._comp[(t.components[d], F.arrow_map[a])] != T._comp[(G.arrow_map[a], t.components[s])]:
            return ("naturality", a)
    return None


def validate_nat_transform(t: NatTransform) -> NatTransform:
    v = nat_transform_violation(t)
    if v is not None:
        raise NotNatural(f"natural transformation fails: {v[0]} at {v[1]!r}", v)
    return t


def identity_transform(F: FinFunctor) -> NatTransform:
    return NatTransform(F, F, {x: F.target.identity[F.object_map[x]] for x in F.source.objects})


def enumerate_nat_transforms(F: FinFunctor, G: FinFunctor):
    S, T = F.source, F.target
    choices = [T.hom(F.object_map[x], G.object_map[x]) for x in S.objects]
    for combo in product(*choices):
        t = NatTransform(F, G, dict(zip(S.objects, combo)))
        if nat_transform_violation(t) is None:
            yield t


# comma categories


@dataclass(eq=False)
class CommaCategory:
    """A materialized comma category with tags recording its constituents.

    ``object_tags[X]`` and ``arrow_tags[m]`` are tuples whose layout depends
    on ``shape``; ``projections`` maps a leg name to a functor out of
    ``carrier``.
    """

    carrier: FinCategory
    shape: str
    object_tags: dict
    arrow_tags: dict
    projections: dict = field(default_factory=dict)


def _assemble_comma(objects, arrow_entries, compose_components, identity_components, name):
    """Materialize a comma carrier.

    ``arrow_entries`` lists ``(X, Y, comps)`` and arrows are identified by that
    triple; ``compose_components(c2, c1)`` returns the components of the
    composite of ``c1`` followed by ``c2``.
    """
    arrows = [((X, Y, comps), X, Y) for X, Y, comps in arrow_entries]
    ids = {X: (X, X, identity_components(X)) for X in objects}
    by_src: dict = {}
    by_dst: dict = {}
    for a, X, Y in arrows:
        by_src.setdefault(X, []).append(a)
        by_dst.setdefault(Y, []).append(a)
    table = {}
    for a, X, Y in arrows:
        for b in by_src.get(Y, []):
            Z = b[1]
            table[(b, a)] = (X, Z, compose_components(b[2], a[2]))
    return FinCategory(objects, arrows, ids, table, name=name, check=False)


def comma_over_object(p: FinFunctor, c: Id) -> CommaCategory:
    """``(p ↓ c)``: objects ``(d, u: p(d) -> c)``, arrows ``m: d -> e`` with ``v∘p(m) = u``."""
    D, C = p.source, p.target
    if c not in C.obj_index:
        raise UnknownObject(f"unknown object {c!r}", c)
    objects = [(d, u) for d in D.objects for u in C.hom(p.object_map[d], c)]
    entries = []
    for (d, u) in objects:
        for (e, v) in objects:
            for m in D.hom(d, e):
                if C._comp[(v, p.arrow_map[m])] == u:
                    entries.append(((d, u), (e, v), (m,)))
    carrier = _assemble_comma(
        objects,
        entries,
        lambda c2, c1: (D._comp[(c2[0], c1[0])],),
        lambda X: (D.identity[X[0]],),
        name=f"(p↓{c})",
    )
    proj = FinFunctor(
        carrier,
        D,
        {X: X[0] for X in objects},
        {a: a[2][0] for a in carrier.arrows},
        name="π",
    )
    return CommaCategory(
        carrier,
        "over_object",
        {X: X for X in objects},
        {a: a[2] for a in carrier.arrows},
        {"D": proj},
    )


def comma_over_identity(p: FinFunctor) -> CommaCategory:
    """``(p ↓ 1_C)``: objects ``(d, c, u: p(d) -> c)``, arrows ``(m, n)`` with ``u'∘p(m) = n∘u``."""
    D, C = p.source, p.target
    objects = [(d, c, u) for d in D.objects for c in C.objects for u in C.hom(p.object_map[d], c)]
    entries = []
    for X in objects:
        d, c, u = X
        for Y in objects:
            e, c2, u2 = Y
            for m in D.hom(d, e):
                left = C._comp[(u2, p.arrow_map[m])]
                for n in C.hom(c, c2):
                    if C._comp[(n, u)] == left:
                        entries.append((X, Y, (m, n)))
    carrier = _assemble_comma(
        objects,
        entries,
        lambda c2, c1: (D._comp[(c2[0], c1[0])], C._comp[(c2[1], c1[1])]),
        lambda X: (D.identity[X[0]], C.identity[X[1]]),
        name="(p↓1)",
    )
    projD = FinFunctor(carrier, D, {X: X[0] for X in objects}, {a: a[2][0] for a in carrier.arrows}, name="π_D")
    projC = FinFunctor(carrier, C, {X: X[1] for X in objects}, {a: a[2][1] for a in carrier.arrows}, name="π_C")
    return CommaCategory(
        carrier,
        "over_identity",
        {X: X for X in objects},
        {a: a[2] for a in carrier.arrows},
        {"D": projD, "C": projC},
    )


def arrow_comma(d0: Id, F: FinFunctor) -> CommaCategory:
    """``(d0 ↓ F)``: objects ``(x, h: d0 -> F(x))``, arrows ``m: x -> y`` with ``F(m)∘h = h'``."""
    I, T = F.source, F.target
    if d0 not in T.obj_index:
        raise UnknownObject(f"unknown object {d0!r}", d0)
    objects = [(x, h) for x in I.objects for h in T.hom(d0, F.object_map[x])]
    entries = []
    for (x, h) in objects:
        for (y, k) in objects:
            for m in I.hom(x, y):
                if T._comp[(F.arrow_map[m], h)] == k:
                    entries.append(((x, h), (y, k), (m,)))
    carrier = _assemble_comma(
        objects,
        entries,
        lambda c2, c1: (I._comp[(c2[0], c1[0])],),
        lambda X: (I.identity[X[0]],),
        name=f"({d0}↓F)",
    )
    proj = FinFunctor(carrier, I, {X: X[0] for X in objects}, {a: a[2][0] for a in carrier.arrows}, name="π")
    return CommaCategory(
        carrier,
        "under_object",
        {X: X for X in objects},
        {a: a[2] for a in carrier.arrows},
        {"I": proj},
    )


def partition(nodes: Sequence[Id], edges: Iterable[tuple[Id, Id]]) -> list[list[Id]]:
    """Blocks of the equivalence generated by ``edges``, in declared node order."""
    ds = DisjointSet(nodes)
    for x, y in edges:
        ds.merge(x, y)
    blocks: dict = {}
    for x in nodes:
        blocks.setdefault(ds[x], []).append(x)
    return list(blocks.values())


def connected_components(K: FinCategory) -> list[list[Id]]:
    return partition(K.objects, ((K.src[a], K.dst[a]) for a in K.arrows))
