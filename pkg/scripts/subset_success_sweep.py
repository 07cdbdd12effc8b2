"""Grid of string-recovery success rates for the uniform-subset learner.

Simulates the k-query learner on a random hidden string per cell and checks
the closed form 2^-n * sum_{j<=k} C(n, j). Output is a CSV grid, rows by n,
columns by k.
"""
import argparse
import sys

import numpy as np

from nonadapt import OracleString, recovery_success_probability, subset_outcome_distribution


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--check", action="store_true",
                    help="exit nonzero if any cell strays from the closed form")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    print("n\\k," + ",".join(str(k) for k in range(args.max_n + 1)))
    for n in range(1, args.max_n + 1):
        cells = []
        for k in range(args.max_n + 1):
            if k > n:
                cells.append("")
                continue
            x = OracleString.from_int(n, int(rng.integers(0, 1 << n)))
            sim = subset_outcome_distribution(n, k, x)[str(x)]
            worst = max(worst, abs(sim - recovery_success_probability(n, k)))
            cells.append(f"{sim:.6f}")
        print(f"{n}," + ",".join(cells))
    print(f"# max deviation from closed form: {worst:.3e}", file=sys.stderr)
    if args.check and worst > 1e-9:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
