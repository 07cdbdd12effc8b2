"""Derandomize a quantum learner into a classical query plan and audit it.

Runs the full pipeline: pick a learner (the one-query subset-parity learner
or the uniform-subset learner), check the pairwise overlap constraints,
sample a distinguishing set from the amplitude profile, expand it into base
queries, and verify the plan decodes every concept.
"""
import argparse
import json
import sys

from nonadapt import (
    ClassicalOracle,
    build_classical_plan,
    build_hadamard_instance,
    build_subset_state,
    classical_learn,
    full_concept_class,
    min_distinguishing_set,
    plan_to_dict,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--learner", choices=["bv", "vandam"], default="bv")
    ap.add_argument("--b", type=int, default=3, help="subset-parity instance size")
    ap.add_argument("--n", type=int, default=4, help="uniform-subset string length")
    ap.add_argument("--k", type=int, default=3, help="uniform-subset query count")
    ap.add_argument("--eps", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.learner == "bv":
        concepts, alg = build_hadamard_instance(args.b)
        learner = alg
    else:
        learner = build_subset_state(args.n, args.k)
        concepts = full_concept_class(args.n)

    result = build_classical_plan(learner, concepts, eps=args.eps, seed=args.seed)
    ok = all(
        classical_learn(result.plan, ClassicalOracle(x)).concept_index == i
        for i, x in enumerate(concepts.concepts)
    )
    exact = min_distinguishing_set(concepts, "exact") if concepts.n <= 24 else None

    print(json.dumps({
        "audit": result.audit,
        "plan": plan_to_dict(result.plan),
        "decodes_every_concept": ok,
        "exact_min_set": list(exact) if exact is not None else None,
    }, indent=2, sort_keys=True))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
