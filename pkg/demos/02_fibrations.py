"""Indexed categories, their total categories, and the Giraud topology.

The projection of a total category is a comorphism for a topology K exactly
when K contains the Giraud topology. This script checks that on one example
and then across a small corpus.
"""

from relsite.corpus import fibration_corpus
from relsite.fixtures import C2, J1, four_object_indexed
from relsite.indexed import check_fibration, giraud_topology, grothendieck_construction
from relsite.sitecheck import check_comorphism
from relsite.topology import enumerate_topologies, topology_leq

C = C2()
G = grothendieck_construction(four_object_indexed(C))
print("Total category objects:", list(G.carrier.objects))
print("Cartesian arrows:", sorted(a for a in G.cartesian_arrows if not G.carrier.is_identity(a)))
print("Projection is a fibration:", check_fibration(G.projection).ok)

JD = giraud_topology(G, J1(C))
for X in G.carrier.objects:
    print(f"  Giraud covers on {X}:", [sorted(S) for S in JD.sorted_covers(X)])

agree = total = 0
for base, D, T in fibration_corpus(max_total_objects=4):
    for J in enumerate_topologies(base):
        JD = giraud_topology(T, J)
        for K in enumerate_topologies(T.carrier):
            total += 1
            agree += check_comorphism(T.projection, K, J).ok == topology_leq(JD, K)
print(f"\ncomorphism <=> contains Giraud: {agree}/{total} (J, K) pairs agree")
