"""Small sites: a two-object category, its sieves and topologies, and a comorphism check.

Run with ``python demos/01_sites.py``.
"""

from relsite.core import identity_functor
from relsite.fixtures import C2, J1, J_triv, point_at
from relsite.sitecheck import check_comorphism, check_filtering
from relsite.topology import all_sieves, enumerate_topologies

C = C2()
print("The category a --f--> b has arrows", list(C.arrows))
for c in C.objects:
    print(f"  sieves on {c}:", [sorted(S) for S in all_sieves(C, c)])

tops = list(enumerate_topologies(C))
print(f"\nIt carries {len(tops)} Grothendieck topologies. Their covers:")
for T in tops:
    print("  ", {c: [sorted(S) for S in T.sorted_covers(c)] for c in C.objects})

J = J1(C)
print("\nJ1 is the least topology in which {f} covers b:", [sorted(S) for S in J.sorted_covers("b")])

p = point_at(C, "b")
v = check_comorphism(p, J_triv(p.source), J)
print("\nThe point at b is not a comorphism into (C2, J1):", v.ok, "witness", v.witness)
print("Into the trivial topology it is:", check_comorphism(p, J_triv(p.source), J_triv(C)).ok)

print("\nFiltering conditions for the point at a, trivial topology:")
v = check_filtering(point_at(C, "a"), J_triv(C))
for k, part in v.parts.items():
    print(f"  {k}: {part.ok} {part.witness or ''}")
print("The identity is filtering everywhere:", check_filtering(identity_functor(C), J).ok)
