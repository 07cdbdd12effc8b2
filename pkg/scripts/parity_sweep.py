"""Sweep the pairwise-parity evaluator and report tightness against the bound.

For each n the evaluator uses ceil(n/2) queries and evaluates the n-bit
parity exactly, which meets the query lower bound at zero error. Prints one
CSV row per n.
"""
import argparse
import sys

from nonadapt import (
    build_function,
    build_parity_algorithm,
    decision_measurement,
    error_lower_bound,
    query_lower_bound,
    worst_case_error,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=12)
    args = ap.parse_args()

    print("n,k,worst_case_error,eps_lower_bound,query_bound,tight")
    for n in range(1, args.max_n + 1):
        alg = build_parity_algorithm(n)
        f = build_function("parity", n)
        wce = worst_case_error(alg.psi, decision_measurement(alg), f)
        eps_lb = error_lower_bound(alg.psi, f)
        rhs = query_lower_bound(n, min(wce, 0.5))
        tight = alg.k <= rhs + 1.0  # ceil(n/2) exceeds n/2 by at most one query
        print(f"{n},{alg.k},{wce!r},{eps_lb!r},{rhs!r},{str(tight).lower()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
