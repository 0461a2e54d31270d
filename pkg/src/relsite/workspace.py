"""JSON workspaces: loading with validation, serialization, and check reports."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    CategoryError,
    FinCategory,
    FinFunctor,
    NatTransform,
    functor_violation,
    identity_name,
    nat_transform_violation,
    validate_category,
)
from .indexed import IndexedCategory, giraud_topology, grothendieck_construction, strictness_violation
from .relative import CRITERIA, DiscrepancyDetected, RelativeProblem, ProblemError, problem_violation, relative_verdict
from .sitecheck import SitePair
from .topology import AxiomViolation, Topology, TopologyError, generate_topology, is_sieve, topology_violation


class WorkspaceError(ValueError):
    """Base class; ``location`` names the offending entry."""

    def __init__(self, message, location=None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class ParseError(WorkspaceError):
    pass


class UnresolvedReference(WorkspaceError):
    pass


class ValidationError(WorkspaceError):
    pass


class UnknownProblem(WorkspaceError):
    pass


class UnknownMode(WorkspaceError):
    pass


MODES = CRITERIA + ("all",)


@dataclass(eq=False)
class Workspace:
    categories: dict = field(default_factory=dict)
    functors: dict = field(default_factory=dict)
    topologies: dict = field(default_factory=dict)
    nat_transforms: dict = field(default_factory=dict)
    indexed: dict = field(default_factory=dict)
    problems: dict = field(default_factory=dict)
    # names introduced by expanding indexed categories; not written back out
    derived: set = field(default_factory=set)


def jsonable(x):
    """Witness data as plain JSON values; tuples become lists, sets sorted lists."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((jsonable(v) for v in x), key=lambda v: json.dumps(v, sort_keys=True))
    if x is None or isinstance(x, (str, int, float, bool)):
        return x
    return str(x)


# loading


def _need(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"missing key {key!r}", where)
    return d[key]


def _resolve(table: dict, name, kind: str, where: str):
    if name not in table:
        raise UnresolvedReference(f"unknown {kind} {name!r}", where)
    return table[name]


def parse_workspace(data: dict) -> Workspace:
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    unknown = set(data) - {"categories", "functors", "topologies", "nat_transforms", "indexed", "problems"}
    if unknown:
        raise ParseError(f"unknown top-level keys {sorted(unknown)}")
    ws = Workspace()
    for name, raw in (data.get("categories") or {}).items():
        where = f"categories.{name}"
        if not isinstance(raw, dict) or "objects" not in raw:
            raise ParseError("a category needs an 'objects' list", where)
        try:
            ws.categories[name] = validate_category(
                {"objects": raw["objects"], "arrows": raw.get("arrows", []), "compose": raw.get("compose", [])}, name=name
            )
        except CategoryError as e:
            if type(e).__name__ in ("UnknownArrow", "UnknownObject"):
                raise UnresolvedReference(str(e), where) from e
            raise ValidationError(f"{type(e).__name__}: {e}", where) from e
    # functors and topologies on expanded total categories wait for the expansion
    ready = lambda raw, keys: all(isinstance(raw, dict) and raw.get(k) in ws.categories for k in keys)
    functors = dict(data.get("functors") or {})
    topologies = dict(data.get("topologies") or {})
    for name in [n for n, raw in functors.items() if ready(raw, ("source", "target"))]:
        _load_functor(ws, name, functors.pop(name))
    for name in [n for n, raw in topologies.items() if ready(raw, ("category",))]:
        _load_topology(ws, name, topologies.pop(name))
    for name, raw in (data.get("indexed") or {}).items():
        _load_indexed(ws, name, raw)
    for name, raw in functors.items():
        _load_functor(ws, name, raw)
    for name, raw in topologies.items():
        _load_topology(ws, name, raw)
    for name, raw in (data.get("nat_transforms") or {}).items():
        _load_nat(ws, name, raw)
    for name, raw in (data.get("problems") or {}).items():
        _load_problem(ws, name, raw)
    return ws


def _load_functor(ws: Workspace, name, raw):
    where = f"functors.{name}"
    S = _resolve(ws.categories, _need(raw, "source", where), "category", where)
    T = _resolve(ws.categories, _need(raw, "target", where), "category", where)
    omap = dict(_need(raw, "on_objects", where))
    amap = dict(raw.get("on_arrows") or {})
    for x in S.objects:
        if x not in omap:
            raise ValidationError(f"object {x!r} is not mapped", where)
        if omap[x] not in T.obj_index:
            raise UnresolvedReference(f"object {x!r} maps to unknown {omap[x]!r}", where)
        amap.setdefault(S.identity[x], T.identity[omap[x]])
    for a in S.arrows:
        if a not in amap:
            raise ValidationError(f"arrow {a!r} is not mapped", where)
        if amap[a] not in T.src:
            raise UnresolvedReference(f"arrow {a!r} maps to unknown {amap[a]!r}", where)
    F = FinFunctor(S, T, omap, {a: amap[a] for a in S.arrows}, name=name)
    v = functor_violation(F)
    if v is not None:
        raise ValidationError(f"NotFunctorial: {v!r}", where)
    ws.functors[name] = F


def _load_topology(ws: Workspace, name, raw):
    where = f"topologies.{name}"
    cat = _resolve(ws.categories, _need(raw, "category", where), "category", where)
    if ("covers" in raw) == ("basis" in raw):
        raise ParseError("give exactly one of 'covers' or 'basis'", where)
    table = raw.get("covers", raw.get("basis")) or {}
    for c, sieves in table.items():
        if c not in cat.obj_index:
            raise UnresolvedReference(f"unknown object {c!r}", where)
        for S in sieves:
            for a in S:
                if a not in cat.src:
                    raise UnresolvedReference(f"unknown arrow {a!r}", where)
            if not is_sieve(cat, c, S):
                raise ValidationError(f"{sorted(S)} is not a sieve on {c!r}", where)
    if "basis" in raw:
        T = generate_topology(cat, table, name=name)
    else:
        T = Topology(cat, table, name=name)
    v = topology_violation(T)
    if v is not None:
        raise ValidationError(f"AxiomViolation: {v[0]} fails at {jsonable(v[1])}", where)
    ws.topologies[name] = T


def _load_nat(ws: Workspace, name, raw):
    where = f"nat_transforms.{name}"
    F = _resolve(ws.functors, _need(raw, "source", where), "functor", where)
    G = _resolve(ws.functors, _need(raw, "target", where), "functor", where)
    comps = dict(_need(raw, "components", where))
    t = NatTransform(F, G, comps)
    v = nat_transform_violation(t)
    if v is not None:
        raise ValidationError(f"NotNatural: {v!r}", where)
    ws.nat_transforms[name] = t


def _load_indexed(ws: Workspace, name, raw):
    """Registers ``<name>`` (the total category), ``p_<name>`` and, given ``giraud``, ``J_<name>``."""
    where = f"indexed.{name}"
    base = _resolve(ws.categories, _need(raw, "base", where), "category", where)
    fibers = {c: _resolve(ws.categories, f, "category", where) for c, f in _need(raw, "fibers", where).items()}
    trans = {}
    for g in base.arrows:
        fname = (raw.get("transitions") or {}).get(g)
        if fname is None and base.is_identity(g):
            c = base.src[g]
            trans[g] = FinFunctor(fibers[c], fibers[c], {x: x for x in fibers[c].objects}, {a: a for a in fibers[c].arrows})
            continue
        if fname is None:
            raise ValidationError(f"missing transition for {g!r}", where)
        trans[g] = _resolve(ws.functors, fname, "functor", where)
    for c in base.objects:
        if c not in fibers:
            raise ValidationError(f"missing fiber over {c!r}", where)
    D = IndexedCategory(base, fibers, trans, name=name)
    v = strictness_violation(D)
    if v is not None:
        raise ValidationError(f"NotStrict: {v[0]} at {v[1]!r}", where)
    total = grothendieck_construction(D)
    total.carrier.name = name
    ws.indexed[name] = (D, total, raw)
    for table, key, value in (
        (ws.categories, name, total.carrier),
        (ws.functors, f"p_{name}", total.projection),
    ):
        if key in table:
            raise ParseError(f"name {key!r} clashes with an expanded indexed category", where)
        table[key] = value
        ws.derived.add(key)
    if "giraud" in raw:
        J = _resolve(ws.topologies, raw["giraud"], "topology", where)
        ws.topologies[f"J_{name}"] = giraud_topology(total, J)
        ws.derived.add(f"J_{name}")


def _load_site(ws, raw, where, with_functor):
    cat = _resolve(ws.categories, _need(raw, "category", where), "category", where)
    top = _resolve(ws.topologies, _need(raw, "topology", where), "topology", where)
    if top.category is not cat and top.category != cat:
        raise ValidationError("topology lives on another category", where)
    F = _resolve(ws.functors, _need(raw, "comorphism", where), "functor", where) if with_functor else None
    return SitePair(cat, top), F


def _load_problem(ws: Workspace, name, raw):
    where = f"problems.{name}"
    base, _ = _load_site(ws, _need(raw, "base", where), where + ".base", False)
    left, p = _load_site(ws, _need(raw, "left", where), where + ".left", True)
    right, p2 = _load_site(ws, _need(raw, "right", where), where + ".right", True)
    A = _resolve(ws.functors, _need(raw, "A", where), "functor", where)
    phi = _resolve(ws.nat_transforms, _need(raw, "phi", where), "natural transformation", where)
    prob = RelativeProblem(base, left, right, p, p2, A, phi, name=name)
    v = problem_violation(prob, check_topologies=False)
    if v is not None:
        raise ValidationError(f"{v[0]}: {jsonable(v[1])}", where)
    ws.problems[name] = prob


def load_workspace(path) -> Workspace:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(str(e), str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}", str(path)) from e
    return parse_workspace(data)


def loads_workspace(text: str) -> Workspace:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}") from e
    return parse_workspace(data)



# serialization


def _category_json(cat: FinCategory) -> dict:
    non_id = [a for a in cat.arrows if not cat.is_identity(a)]
    return {
        "objects": list(cat.objects),
        "arrows": [{"id": a, "src": cat.src[a], "dst": cat.dst[a]} for a in non_id],
        "compose": [[g, f, cat._comp[(g, f)]] for g, f in cat.composable_pairs() if g in non_id and f in non_id],
    }


def _name_of(table: dict, obj, kind):
    for k, v in table.items():
        if v is obj:
            return k
    for k, v in table.items():
        if v == obj:
            return k
    raise UnresolvedReference(f"unnamed {kind} in workspace")


def serialize(ws: Workspace) -> dict:
    """Plain JSON form; topologies are written with their full covers."""
    for name, cat in ws.categories.items():
        if name not in ws.derived:
            for x in cat.objects:
                if cat.identity[x] != identity_name(x):
                    raise WorkspaceError(f"identity of {x!r} is not named {identity_name(x)!r}", f"categories.{name}")
    out: dict = {"categories": {}, "functors": {}, "topologies": {}, "nat_transforms": {}, "indexed": {}, "problems": {}}
    for name, cat in ws.categories.items():
        if name not in ws.derived:
            out["categories"][name] = _category_json(cat)
    for name, F in ws.functors.items():
        if name in ws.derived:
            continue
        out["functors"][name] = {
            "source": _name_of(ws.categories, F.source, "category"),
            "target": _name_of(ws.categories, F.target, "category"),
            "on_objects": {x: F.object_map[x] for x in F.source.objects},
            "on_arrows": {a: F.arrow_map[a] for a in F.source.arrows if not F.source.is_identity(a)},
        }
    for name, (D, total, raw) in ws.indexed.items():
        entry = {
            "base": _name_of(ws.categories, D.base, "category"),
            "fibers": {c: _name_of(ws.categories, D.fiber[c], "category") for c in D.base.objects},
            "transitions": {
                g: _name_of(ws.functors, D.transition[g], "functor") for g in D.base.arrows if not D.base.is_identity(g)
            },
        }
        if "giraud" in raw:
            entry["giraud"] = raw["giraud"]
        out["indexed"][name] = entry
    for name, T in ws.topologies.items():
        if name in ws.derived:
            continue
        cat = T.category
        out["topologies"][name] = {
            "category": _name_of(ws.categories, cat, "category"),
            "covers": {c: T.sorted_covers(c) for c in cat.objects},
        }
    for name, t in ws.nat_transforms.items():
        out["nat_transforms"][name] = {
            "source": _name_of(ws.functors, t.source_functor, "functor"),
            "target": _name_of(ws.functors, t.target_functor, "functor"),
            "components": {x: t.components[x] for x in t.source_functor.source.objects},
        }
    for name, prob in ws.problems.items():
        site = lambda s: {
            "category": _name_of(ws.categories, s.category, "category"),
            "topology": _name_of(ws.topologies, s.topology, "topology"),
        }
        out["problems"][name] = {
            "base": site(prob.base),
            "left": {**site(prob.left), "comorphism": _name_of(ws.functors, prob.p, "functor")},
            "right": {**site(prob.right), "comorphism": _name_of(ws.functors, prob.p_prime, "functor")},
            "A": _name_of(ws.functors, prob.A, "functor"),
            "phi": _name_of(ws.nat_transforms, prob.phi, "natural transformation"),
        }
    return {k: v for k, v in out.items() if v}


def dumps(ws: Workspace) -> str:
    return json.dumps(serialize(ws), indent=2, sort_keys=False, ensure_ascii=False)


def workspace_from_problem(prob: RelativeProblem, name: str | None = None) -> Workspace:
    """A self-contained workspace holding one problem; sides that coincide share a name."""
    name = name or prob.name or "problem"
    ws = Workspace()
    cats = {}
    for label, cat in (("C", prob.C), ("D", prob.D), ("D'", prob.D2)):
        if not any(cat is c for c in cats.values()):
            cats[label] = cat
    ws.categories.update(cats)
    tops = {}
    for label, T in (("J", prob.base.topology), ("K", prob.left.topology), ("K'", prob.right.topology)):
        if not any(T is t for t in tops.values()):
            tops[label] = T
    ws.topologies.update(tops)
    funs = {}
    for label, F in (("p", prob.p), ("p'", prob.p_prime), ("A", prob.A)):
        if not any(F is g for g in funs.values()):
            funs[label] = F
    pA = prob.phi.source_functor
    if not any(pA is g for g in funs.values()):
        funs["p'A"] = pA
    ws.functors.update(funs)
    ws.nat_transforms["phi"] = prob.phi
    ws.problems[name] = prob
    return ws


# reports


@dataclass
class Report:
    """Machine-readable outcome of a check run."""

    problem: str
    mode: str
    verdicts: dict
    site_morphism: dict
    aggregate: bool
    discrepancy: bool
    discrepancies: list
    timings: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "problem": self.problem,
            "mode": self.mode,
            "aggregate": self.aggregate,
            "site_morphism": self.site_morphism,
            "verdicts": self.verdicts,
            "discrepancy": self.discrepancy,
            "discrepancies": self.discrepancies,
        }
        if self.timings is not None:
            out["timings"] = self.timings
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(
            d["problem"], d["mode"], d["verdicts"], d["site_morphism"], d["aggregate"], d["discrepancy"], d["discrepancies"], d.get("timings")
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    @property
    def passed(self) -> bool:
        return all(v["ok"] for v in self.verdicts.values())

    def text(self) -> str:
        lines = [f"problem {self.problem} (mode {self.mode})"]
        for k, v in self.verdicts.items():
            lines.append(f"  {k:<12} {'pass' if v['ok'] else 'FAIL'}")
            if not v["ok"]:
                lines.append(f"    witness: {json.dumps(v['witness'], ensure_ascii=False)}")
        lines.append(f"  site morphism: {'yes' if self.site_morphism['ok'] else 'no'}")
        if self.discrepancy:
            lines.append(f"  DISCREPANCY: {json.dumps(self.discrepancies, ensure_ascii=False)}")
        return "\n".join(lines)


def run_check(ws: Workspace, problem: str, mode: str = "all", timings: bool = False) -> Report:
    """Run one criterion (or all of them, with the discrepancy detector) on a named problem."""
    if mode not in MODES:
        raise UnknownMode(f"mode must be one of {', '.join(MODES)}", mode)
    if problem not in ws.problems:
        raise UnknownProblem(f"no problem named {problem!r}", problem)
    prob = ws.problems[problem]
    t0 = time.perf_counter()
    criteria = list(CRITERIA) if mode == "all" else [mode]
    rv = relative_verdict(prob, criteria=criteria)
    elapsed = time.perf_counter() - t0
    return Report(
        problem=problem,
        mode=mode,
        verdicts={k: jsonable(v.as_dict()) for k, v in rv.criteria.items()},
        site_morphism=jsonable(rv.site_morphism.as_dict()),
        aggregate=rv.aggregate,
        discrepancy=rv.discrepancy if mode == "all" else False,
        discrepancies=jsonable(rv.discrepancies) if mode == "all" else [],
        timings={"seconds": round(elapsed, 6)} if timings else None,
    )
