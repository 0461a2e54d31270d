"""Deciding whether a pair (A, phi) is a morphism of sites over a base.

Four independent criteria are run on three named problems and then on a slice
of the corpus; criteria that must agree are compared automatically.
"""

import itertools

from relsite.corpus import Bounds, exhaustive_problems, random_problems
from relsite.fixtures import collapse_problem, fixture_neg, fixture_pos, identity_problem
from relsite.relative import relative_verdict

for prob in (identity_problem(), fixture_neg(), fixture_pos(), collapse_problem()):
    v = relative_verdict(prob)
    row = " ".join(f"{k}={'T' if r.ok else 'F'}" for k, r in v.criteria.items())
    print(f"{prob.name:>10}: site morphism={'T' if v.site_morphism.ok else 'F'} {row} discrepancy={v.discrepancy}")

v = relative_verdict(fixture_neg())
print("\nWhy NEG fails condition (a):", v.criteria["filtered"].parts["a"].witness)
print("Why the collapse is not a site morphism:", relative_verdict(collapse_problem()).site_morphism.witness)

problems = itertools.chain(itertools.islice(exhaustive_problems(Bounds()), 0, None, 50), random_problems(Bounds(), seed=1, count=50))
n = sm = events = 0
for prob in problems:
    v = relative_verdict(prob)
    n += 1
    sm += v.site_morphism.ok
    events += v.discrepancy
print(f"\n{n} corpus problems, {sm} with A a morphism of sites, {events} disagreements between equivalent criteria")
