"""Command line: ``relsite validate|check|corpus``.

Exit codes: 0 everything passes, 1 a check fails, 2 bad input, 3 criteria
that must agree disagree.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter

from .corpus import Bounds, corpus_problems
from .oracle import build_phi_tilde, is_locally_surjective
from .relative import CRITERIA, check_relative_filtered_at, relative_verdict
from .workspace import MODES, WorkspaceError, jsonable, load_workspace, run_check, workspace_from_problem

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DISCREPANCY = 0, 1, 2, 3


def enumerate_instances(bounds: Bounds = Bounds(), seed: int = 0, exhaustive_limit: int | None = None):
    """Corpus problems, each wrapped in its own workspace."""
    for prob in corpus_problems(bounds, seed, exhaustive_limit):
        yield workspace_from_problem(prob)


def _surjectivity_per_c(prob) -> list:
    """Base objects where condition (a) and local surjectivity of the comparison disagree."""
    out = []
    for c in prob.C.objects:
        a = check_relative_filtered_at(prob, c).ok
        s = is_locally_surjective(build_phi_tilde(prob, c), prob.right.topology).ok
        if a != s:
            out.append({"c": c, "condition_a": a, "locally_surjective": s})
    return out


def run_corpus(bounds: Bounds, seed: int, exhaustive_limit: int | None = None, oracle: bool = True, per_instance: bool = False) -> dict:
    criteria = [c for c in CRITERIA if oracle or c != "oracle"]
    passes: Counter = Counter()
    events = []
    rows = []
    total = site_morphisms = 0
    for prob in corpus_problems(bounds, seed, exhaustive_limit):
        total += 1
        v = relative_verdict(prob, criteria=criteria)
        site_morphisms += v.site_morphism.ok
        for k, r in v.criteria.items():
            passes[k] += r.ok
        issues = list(v.discrepancies)
        if oracle:
            issues += [{"between": ["filtered.a", "oracle.locally_surjective"], **d} for d in _surjectivity_per_c(prob)]
        if issues:
            events.append({"problem": prob.name, "issues": jsonable(issues)})
        if per_instance:
            rows.append({"problem": prob.name, "site_morphism": v.site_morphism.ok, **{k: r.ok for k, r in v.criteria.items()}})
    report = {
        "bounds": bounds.__dict__,
        "seed": seed,
        "exhaustive_limit": exhaustive_limit,
        "instances": total,
        "site_morphisms": site_morphisms,
        "passes": {k: passes[k] for k in criteria},
        "discrepancy_events": events,
    }
    if per_instance:
        report["per_instance"] = rows
    return report


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relsite", description="Decide morphisms of sites over a base on finite data.")
    sub = ap.add_subparsers(dest="verb", required=True)

    v = sub.add_parser("validate", help="load a workspace and validate every entry")
    v.add_argument("file")

    c = sub.add_parser("check", help="run criteria on a named problem")
    c.add_argument("file")
    c.add_argument("--problem", required=True)
    c.add_argument("--mode", default="all", choices=MODES)
    c.add_argument("--format", default="text", choices=("text", "json"))
    c.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identical output)")

    k = sub.add_parser("corpus", help="run every criterion over the generated corpus")
    k.add_argument("--max-objects", type=int, default=4)
    k.add_argument("--max-arrows", type=int, default=7)
    k.add_argument("--max-extra-arrows", type=int, default=3)
    k.add_argument("--count", type=int, default=200, help="random problems after the exhaustive tier")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--exhaustive-objects", type=int, default=2)
    k.add_argument("--exhaustive-arrows", type=int, default=3)
    k.add_argument("--exhaustive-side-arrows", type=int, default=2)
    k.add_argument("--exhaustive-limit", type=int, default=None)
    k.add_argument("--no-oracle", action="store_true")
    k.add_argument("--per-instance", action="store_true")
    k.add_argument("--assert-equivalences", action="store_true")
    k.add_argument("--output")
    return ap


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    out = sys.stdout
    if args.verb == "validate":
        try:
            ws = load_workspace(args.file)
        except WorkspaceError as e:
            print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
            return EXIT_INPUT
        counts = {k: len(getattr(ws, k)) for k in ("categories", "functors", "topologies", "nat_transforms", "indexed", "problems")}
        print("ok " + " ".join(f"{k}={n}" for k, n in counts.items()), file=out)
        return EXIT_OK
    if args.verb == "check":
        try:
            ws = load_workspace(args.file)
            report = run_check(ws, args.problem, args.mode, timings=args.timings)
        except WorkspaceError as e:
            print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
            return EXIT_INPUT
        print(report.to_json() if args.format == "json" else report.text(), file=out)
        if report.discrepancy:
            return EXIT_DISCREPANCY
        return EXIT_OK if report.passed else EXIT_FAIL
    bounds = Bounds(
        max_objects=args.max_objects,
        max_arrows=args.max_arrows,
        max_extra_arrows=args.max_extra_arrows,
        exhaustive_objects=args.exhaustive_objects,
        exhaustive_arrows=args.exhaustive_arrows,
        exhaustive_side_arrows=args.exhaustive_side_arrows,
        random_count=args.count,
    )
    report = run_corpus(bounds, args.seed, args.exhaustive_limit, oracle=not args.no_oracle, per_instance=args.per_instance)
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=out)
    if args.assert_equivalences and report["discrepancy_events"]:
        return EXIT_DISCREPANCY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
