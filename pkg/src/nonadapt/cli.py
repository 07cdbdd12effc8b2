"""Batch command-line harness for reproducible experiments.

Subcommands tie the simulator, the bound checks, and the learning pipeline
into machine-readable runs.  Every output records the seed; identical
configurations produce byte-identical output.  Exit codes: 0 pass, 1 bound
or plan failure, 2 validation error, 3 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .algorithms import (
    build_hadamard_instance,
    build_parity_algorithm,
    build_subset_state,
    decision_measurement,
    recovery_success_probability,
    run_algorithm,
    subset_outcome_distribution,
)
from .boolfn import build_function, load_function
from .bounds import (
    bound_report,
    error_lower_bound,
    error_profile,
    helstrom_error,
    oracle_pair_overlap,
    query_lower_bound,
)
from .errors import (
    BoundViolation,
    ContractViolation,
    InputOutsideClass,
    ParseError,
    ValidationError,
)
from .learning import (
    AmplitudeProfile,
    ClassicalOracle,
    amplitude_profile,
    build_classical_plan,
    classical_learn,
    full_concept_class,
    load_concept_class,
    min_distinguishing_set,
    plan_to_dict,
    sample_index_set,
    save_plan,
)
from .qstate import ATOL, OracleString, load_state
from .rng import check_seed, stream

EXIT_PASS = 0
EXIT_BOUND_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


def thread_cap() -> int:
    """Parallelism limit: NONADAPT_THREADS when set, else the CPU count."""
    raw = os.environ.get("NONADAPT_THREADS")
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"NONADAPT_THREADS must be an integer, got {raw!r}")
    if cap < 1:
        raise ValidationError(f"NONADAPT_THREADS must be >= 1, got {cap}")
    return cap


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation; identical configs produce identical bytes."""

    command: str
    n: int | None = None
    k: int | None = None
    b: int | None = None
    eps: float = 0.0
    seed: int = 0
    in_path: str | None = None
    table_path: str | None = None
    concepts_path: str | None = None
    out_path: str | None = None
    fmt: str = "json"
    learner: str = "state"
    trials: int = 1
    retry_cap: int = 64

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            n=args.n,
            k=args.k,
            b=getattr(args, "b", None),
            eps=args.eps,
            seed=check_seed(args.seed),
            in_path=args.in_path,
            table_path=getattr(args, "table", None),
            concepts_path=getattr(args, "concepts", None),
            out_path=args.out_path,
            fmt=args.fmt,
            learner=getattr(args, "learner", "state"),
            trials=getattr(args, "trials", 1),
            retry_cap=getattr(args, "retry_cap", 64),
        )


def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(header: list[str], rows: list[dict]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(row[col]) for col in header))
    return "\n".join(lines) + "\n"


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require(value, flag: str):
    if value is None:
        raise ContractViolation(f"{flag} is required for this subcommand")
    return value


def _json_only(cfg: RunConfig) -> None:
    if cfg.fmt != "json":
        raise ValidationError(f"{cfg.command} emits json only; drop --format csv")


# --- subcommands -------------------------------------------------------------


def cmd_verify_bound(cfg: RunConfig) -> int:
    """Check the query lower bound for a serialized state against a truth table."""
    _json_only(cfg)
    state_path = _require(cfg.in_path, "--in (state file)")
    table_path = _require(cfg.table_path, "--table (truth-table file)")
    psi = load_state(state_path)
    f = load_function(table_path)
    report = bound_report(psi, f)
    payload = {
        "command": "verify-bound",
        "run_id": f"verify-bound-{Path(state_path).stem}-{Path(table_path).stem}-seed{cfg.seed}",
        "seed": cfg.seed,
        **report,
    }
    emit(cfg, render_json(payload))
    return EXIT_PASS if report["pass"] else EXIT_BOUND_FAILURE


def cmd_vandam(cfg: RunConfig) -> int:
    """Sweep the uniform-subset learner and compare against the closed form."""
    n = _require(cfg.n, "--n")
    if n < 1:
        raise ContractViolation(f"--n must be >= 1, got {n}")
    if n > 16:
        raise ValidationError(f"n = {n} enumerates 2^{n} subsets; refusing beyond n = 16")
    if cfg.k is not None and not 0 <= cfg.k <= n:
        raise ContractViolation(f"--k must be in [0, {n}], got {cfg.k}")
    ks = [cfg.k] if cfg.k is not None else list(range(n + 1))

    def one_row(k: int) -> dict:
        rng = stream(cfg.seed, "vandam", f"k={k}")
        x = OracleString.from_int(n, int(rng.integers(0, 1 << n)))
        sim = subset_outcome_distribution(n, k, x)[str(x)]
        closed = recovery_success_probability(n, k)
        return {
            "k": k,
            "success": sim,
            "closed_form": closed,
            "match": abs(sim - closed) <= ATOL,
        }

    with ThreadPoolExecutor(max_workers=min(thread_cap(), len(ks))) as pool:
        rows = list(pool.map(one_row, ks))

    suffix = f"-k{cfg.k}" if cfg.k is not None else ""
    payload = {
        "command": "vandam",
        "run_id": f"vandam-n{n}{suffix}-seed{cfg.seed}",
        "n": n,
        "seed": cfg.seed,
        "rows": rows,
    }
    if cfg.fmt == "csv":
        emit(cfg, render_csv(["k", "success", "closed_form", "match"], rows))
    else:
        emit(cfg, render_json(payload))
    return EXIT_PASS if all(r["match"] for r in rows) else EXIT_BOUND_FAILURE


def cmd_parity(cfg: RunConfig) -> int:
    """Run the pairwise-parity evaluator and verify exactness and tightness."""
    _json_only(cfg)
    n = _require(cfg.n, "--n")
    alg = build_parity_algorithm(n)
    f = build_function("parity", n)
    errors = error_profile(alg.psi, decision_measurement(alg), f)
    wce = float(errors.max())
    eps_lb = error_lower_bound(alg.psi, f)
    rhs = query_lower_bound(n, min(wce, 0.5))
    ok = wce <= ATOL and alg.k + ATOL >= rhs
    payload = {
        "command": "parity",
        "run_id": f"parity-n{n}-seed{cfg.seed}",
        "seed": cfg.seed,
        "name": alg.name,
        "n": n,
        "k": alg.k,
        "success_min": 1.0 - wce,
        "success_max": 1.0 - float(errors.min()),
        "worst_case_error": wce,
        "eps_lower_bound": eps_lb,
        "theorem1_rhs": rhs,
        "pass": ok,
    }
    emit(cfg, render_json(payload))
    return EXIT_PASS if ok else EXIT_BOUND_FAILURE


def cmd_bv(cfg: RunConfig) -> int:
    """Run the one-query subset-parity learner over its whole concept class."""
    _json_only(cfg)
    b = _require(cfg.b, "--b")
    concepts, alg = build_hadamard_instance(b)
    success = [
        run_algorithm(alg, x).get(s, 0.0) for s, x in enumerate(concepts.concepts)
    ]
    floor = 0.0
    for i in range(concepts.m):
        for j in range(i + 1, concepts.m):
            c = abs(oracle_pair_overlap(alg.psi, concepts.concepts[i], concepts.concepts[j]))
            floor = max(floor, helstrom_error(min(c, 1.0)))
    min_size = len(min_distinguishing_set(concepts, "exact"))
    ok = min(success) >= 1.0 - ATOL
    payload = {
        "command": "bv",
        "run_id": f"bv-b{b}-seed{cfg.seed}",
        "seed": cfg.seed,
        "name": alg.name,
        "b": b,
        "n": alg.n,
        "k": alg.k,
        "concepts": concepts.m,
        "success_min": min(success),
        "success_max": max(success),
        "eps_lower_bound": floor,
        "min_distinguishing_size": min_size,
        "pass": ok,
    }
    emit(cfg, render_json(payload))
    return EXIT_PASS if ok else EXIT_BOUND_FAILURE


def _resolve_learner(cfg: RunConfig):
    """Pick the query state and default concept class for the learn command."""
    if cfg.learner == "bv":
        b = _require(cfg.b, "--b")
        concepts, alg = build_hadamard_instance(b)
        return alg.psi, concepts, f"bv-b{b}"
    if cfg.learner == "vandam":
        n = _require(cfg.n, "--n")
        k = _require(cfg.k, "--k")
        return build_subset_state(n, k), full_concept_class(n), f"vandam-n{n}-k{k}"
    if cfg.learner == "state":
        path = _require(cfg.in_path, "--in (state file)")
        return load_state(path), None, f"state-{Path(path).stem}"
    raise ContractViolation(f"unknown learner {cfg.learner!r}")


def cmd_learn(cfg: RunConfig) -> int:
    """Derandomize a quantum learner into a classical query plan, then verify it."""
    _json_only(cfg)
    psi, default_class, tag = _resolve_learner(cfg)
    if cfg.concepts_path is not None:
        concepts = load_concept_class(cfg.concepts_path)
    elif default_class is not None:
        concepts = default_class
    else:
        raise ContractViolation("--concepts is required when learning from a state file")

    result = build_classical_plan(
        psi, concepts, cfg.eps, cfg.seed, retry_cap=cfg.retry_cap
    )
    plan = result.plan

    verified = True
    for idx, concept in enumerate(concepts.concepts):
        res = classical_learn(plan, ClassicalOracle(concept))
        if res.concept_index != idx:
            verified = False
    exact_min = (
        len(min_distinguishing_set(concepts, "exact")) if concepts.n <= 24 else None
    )
    margins = None
    if result.overlap_report is not None:
        margins = [
            {
                "i": p.i,
                "j": p.j,
                "overlap_sq": p.overlap_sq,
                "margin": result.overlap_report.bound - p.overlap_sq,
                "ok": p.ok,
            }
            for p in result.overlap_report.pairs
        ]

    payload = {
        "command": "learn",
        "run_id": f"learn-{tag}-seed{cfg.seed}",
        "base_queries": list(plan.base_queries),
        "exact_min": exact_min,
        "overlap_bound": None if result.overlap_report is None else result.overlap_report.bound,
        "overlap_margins": margins,
        "verified_all_concepts": verified,
        **result.audit,
    }
    if cfg.out_path:
        save_plan(plan, cfg.out_path)
        payload["plan_path"] = cfg.out_path
    else:
        payload["plan"] = plan_to_dict(plan)
    sys.stdout.write(render_json(payload))
    return EXIT_PASS if verified else EXIT_BOUND_FAILURE


def cmd_extract_set(cfg: RunConfig) -> int:
    """Sample distinguishing sets from an amplitude profile over repeated trials."""
    concepts_path = _require(cfg.concepts_path, "--concepts")
    k_draws = _require(cfg.k, "--k (number of draws)")
    concepts = load_concept_class(concepts_path)
    if cfg.in_path is not None:
        profile = amplitude_profile(load_state(cfg.in_path))
    else:
        profile = AmplitudeProfile.uniform(concepts.n + 1)
    if cfg.trials < 1:
        raise ContractViolation(f"--trials must be >= 1, got {cfg.trials}")

    results = [
        sample_index_set(profile, concepts, k_draws, seed=[cfg.seed, t])
        for t in range(cfg.trials)
    ]
    failures = sum(1 for r in results if not r.distinguishing)
    rows = [
        {
            "trial": t,
            "distinguishing": r.distinguishing,
            "set_size": len(r.index_set),
            "index_set": "|".join(str(i) for i in r.index_set),
        }
        for t, r in enumerate(results)
    ]
    payload = {
        "command": "extract-set",
        "run_id": f"extract-set-{Path(concepts_path).stem}-k{k_draws}-seed{cfg.seed}",
        "seed": cfg.seed,
        "n": concepts.n,
        "m": concepts.m,
        "k_draws": k_draws,
        "trials": cfg.trials,
        "failures": failures,
        "failure_rate": failures / cfg.trials,
    }
    if cfg.trials <= 16:
        payload["results"] = [
            {
                "draws": list(r.draws),
                "index_set": list(r.index_set),
                "distinguishing": r.distinguishing,
            }
            for r in results
        ]
    if cfg.fmt == "csv":
        emit(cfg, render_csv(["trial", "distinguishing", "set_size", "index_set"], rows))
    else:
        emit(cfg, render_json(payload))
    return EXIT_PASS


def cmd_report(cfg: RunConfig) -> int:
    """Merge prior JSON run records from a directory into one document."""
    _json_only(cfg)
    in_dir = _require(cfg.in_path, "--in (directory of run outputs)")
    root = Path(in_dir)
    if not root.is_dir():
        raise ParseError(f"{in_dir}: not a directory")
    paths = sorted(p for p in root.glob("*.json") if p.is_file())
    if not paths:
        raise ParseError(f"{in_dir}: no run outputs found; expected *.json files")
    runs: dict[str, dict] = {}
    warnings: list[str] = []
    for p in paths:
        try:
            with open(p, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}")
        if not isinstance(data, dict):
            raise ParseError(f"{p}: expected a JSON object")
        run_id = data.get("run_id", p.stem)
        if run_id in runs:
            warnings.append(f"duplicate run id {run_id}: keeping {p.name}")
        runs[run_id] = data
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    payload = {
        "command": "report",
        "seed": cfg.seed,
        "count": len(runs),
        "runs": runs,
        "warnings": warnings,
    }
    emit(cfg, render_json(payload))
    return EXIT_PASS


COMMANDS = {
    "verify-bound": cmd_verify_bound,
    "vandam": cmd_vandam,
    "parity": cmd_parity,
    "bv": cmd_bv,
    "learn": cmd_learn,
    "extract-set": cmd_extract_set,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of input bits")
    common.add_argument("--k", type=int, help="query count / subset size / draw count")
    common.add_argument("--eps", type=float, default=0.0, help="error rate in [0, 1/2)")
    common.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    common.add_argument("--in", dest="in_path", help="input path (state file or directory)")
    common.add_argument("--out", dest="out_path", help="output path (default stdout)")
    common.add_argument(
        "--format", dest="fmt", choices=["json", "csv"], default="json",
        help="output format (csv only for tabular subcommands)",
    )

    parser = argparse.ArgumentParser(
        prog="nonadapt",
        description="Nonadaptive quantum query algorithms: simulation, bounds, learning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-bound", parents=[common],
                       help="check the query lower bound for a state against a truth table")
    p.add_argument("--table", help="truth-table file (line 1: n, line 2: 2^n bits)")

    sub.add_parser("vandam", parents=[common],
                   help="uniform-subset learner sweep vs the closed-form success rate")

    sub.add_parser("parity", parents=[common],
                   help="pairwise-parity evaluator: exactness and bound tightness")

    p = sub.add_parser("bv", parents=[common],
                       help="one-query subset-parity learner over its concept class")
    p.add_argument("--b", type=int, help="instance size: n = 2^b - 1")

    p = sub.add_parser("learn", parents=[common],
                       help="derandomize a quantum learner into a classical query plan")
    p.add_argument("--b", type=int, help="instance size for the bv learner")
    p.add_argument("--learner", choices=["bv", "vandam", "state"], default="state")
    p.add_argument("--concepts", help="concept-class file (default: learner's own class)")
    p.add_argument("--retry-cap", dest="retry_cap", type=int, default=64)

    p = sub.add_parser("extract-set", parents=[common],
                       help="sample distinguishing sets from an amplitude profile")
    p.add_argument("--concepts", help="concept-class file", required=True)
    p.add_argument("--trials", type=int, default=1)

    sub.add_parser("report", parents=[common],
                   help="merge prior JSON run records from a directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[cfg.command](cfg)
    except BoundViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND_FAILURE
    except (ContractViolation, ValidationError, InputOutsideClass) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
