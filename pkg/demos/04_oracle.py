"""The presheaf side: colimits of representables, the comparison map, and sheafification."""

from relsite.fixtures import C2, J1, fixture_neg, identity_problem
from relsite.oracle import (
    build_phi_tilde,
    codiagonal,
    is_bijection,
    is_local_isomorphism,
    is_sheaf,
    representable,
    sheafify,
    sheafify_morphism,
)

C, J = C2(), J1(C2())
Ya = representable(C, "a")
print("Y(a) sections:", Ya.sections)
print("Y(a) is a J1-sheaf:", is_sheaf(Ya, J).ok)
S = sheafify(Ya, J)
print("after sheafification:", S.size(), "sheaf:", is_sheaf(S, J).ok)

for prob in (identity_problem(), fixture_neg()):
    for c in prob.C.objects:
        m = build_phi_tilde(prob, c)
        v = is_local_isomorphism(m, prob.right.topology)
        print(f"{prob.name} at {c}: source {m.source.size()} -> target {m.target.size()}, local iso {v.ok}")

fold = codiagonal(Ya)
print("\nfold Y(a)+Y(a) -> Y(a): local iso", is_local_isomorphism(fold, J).ok, "| sheafified bijection", is_bijection(sheafify_morphism(fold, J)))
