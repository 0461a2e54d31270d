"""Named small fixtures shared by tests, demos and the workspace examples."""

from __future__ import annotations

from .core import FinCategory, FinFunctor, constant_functor, identity_functor, terminal_category
from .indexed import IndexedCategory, constant_indexed, giraud_topology, grothendieck_construction, indexed_functor, presheaf_indexed
from .relative import RelativeProblem, make_problem
from .topology import Topology, generate_topology, trivial_topology


def C2() -> FinCategory:
    """Two objects ``a, b`` and one arrow ``f: a -> b``."""
    return FinCategory.build(["a", "b"], [("f", "a", "b")], name="C2")


def ONE(obj="*") -> FinCategory:
    return terminal_category(obj)


def J_triv(cat: FinCategory) -> Topology:
    return trivial_topology(cat)


def J1(cat: FinCategory | None = None) -> Topology:
    """On ``C2``: maximal sieves plus ``S_f = {f}`` on ``b``."""
    cat = cat or C2()
    T = generate_topology(cat, {"b": [["f"]]}, name="J1")
    return T


def point_at(target: FinCategory, obj, source: FinCategory | None = None) -> FinFunctor:
    return constant_functor(source or ONE(), target, obj)


def identity_problem(C: FinCategory | None = None, J: Topology | None = None) -> RelativeProblem:
    C = C or C2()
    J = J or J1(C)
    I = identity_functor(C)
    return make_problem(C, J, C, J, I, C, J, I, I, {x: C.identity[x] for x in C.objects}, name="identity")


def fixture_neg() -> RelativeProblem:
    """``p, A: 1 -> C2`` at ``b``, ``p' = id``, all topologies trivial."""
    C = C2()
    one = ONE()
    p = point_at(C, "b", one)
    A = point_at(C, "b", one)
    return make_problem(
        C, J_triv(C), one, J_triv(one), p, C, J_triv(C), identity_functor(C), A, {"*": "id:b"}, name="NEG"
    )


def fixture_pos() -> RelativeProblem:
    """The same shape over the one-object base at ``b``."""
    C = ONE("b")
    one = ONE()
    p = point_at(C, "b", one)
    A = point_at(C, "b", one)
    return make_problem(
        C, J_triv(C), one, J_triv(one), p, C, J_triv(C), identity_functor(C), A, {"*": "id:b"}, name="POS"
    )


def four_object_indexed(C: FinCategory | None = None) -> IndexedCategory:
    """Discrete fibers ``{x, y}`` over ``b`` and ``{x', y'}`` over ``a``, ``D(f): x ↦ x', y ↦ y'``."""
    C = C or C2()
    D = presheaf_indexed(C, {"a": ["x'", "y'"], "b": ["x", "y"]}, {"f": {"x": "x'", "y": "y'"}})
    D.name = "D4"
    return D


def terminal_indexed(C: FinCategory | None = None) -> IndexedCategory:
    C = C or C2()
    D = constant_indexed(C, ONE())
    D.name = "T"
    return D


def collapse_problem() -> RelativeProblem:
    """The four-object total category collapsed onto the terminal one over ``(C2, J1)``."""
    C = C2()
    J = J1(C)
    D, T = four_object_indexed(C), terminal_indexed(C)
    GD, GT = grothendieck_construction(D), grothendieck_construction(T)
    maps = {c: constant_functor(D.fiber[c], T.fiber[c], "*") for c in C.objects}
    A = indexed_functor(D, T, maps, GD, GT)
    phi = {X: C.identity[GD.projection.object_map[X]] for X in GD.carrier.objects}
    return make_problem(
        C,
        J,
        GD.carrier,
        giraud_topology(GD, J),
        GD.projection,
        GT.carrier,
        giraud_topology(GT, J),
        GT.projection,
        A,
        phi,
        name="collapse",
    )
