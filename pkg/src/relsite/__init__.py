"""Finite sites, relative sites and the criteria deciding morphisms of sites over a base."""

from .core import (
    CategoryError,
    CommaCategory,
    FinCategory,
    FinFunctor,
    NatTransform,
    arrow_comma,
    comma_over_identity,
    comma_over_object,
    connected_components,
    validate_category,
    validate_functor,
    validate_nat_transform,
)
from .indexed import (
    IndexedCategory,
    TotalCategory,
    check_fibration,
    check_fibration_morphism,
    giraud_topology,
    grothendieck_construction,
)
from .oracle import (
    FinPresheaf,
    PresheafMorphism,
    build_phi_tilde,
    is_local_isomorphism,
    is_locally_injective,
    is_locally_surjective,
    is_sheaf,
    plus_construction,
    sheafify,
)
from .relative import (
    RelativeProblem,
    RelativeVerdict,
    check_cofinality,
    check_diagonal_density,
    check_fiberwise,
    check_relative_filtered,
    diagonal_category,
    fiber_functor,
    global_functor,
    make_problem,
    relative_verdict,
)
from .sitecheck import SitePair, check_comorphism, check_cover_preserving, check_filtering, check_site_morphism
from .topology import (
    Sieve,
    Topology,
    comma_giraud_topology,
    generate_sieve,
    generate_topology,
    pullback_sieve,
    topology_leq,
    validate_topology,
)
from .verdict import Verdict

__all__ = [name for name in dir() if not name.startswith("_")]
