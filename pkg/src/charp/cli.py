"""Batch front end: `charp run <job>`, `charp selftest`, `charp explain <task>`."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import ParseError
from .jobs import TASK_KINDS, parse_job_file, run_job
from .report import report_to_json, report_to_tsv

_EXPLANATIONS = {
    "hk": (
        "lambda_e = dim_k S/(I + m^[q]), q = p^e, normalized by q^d.\n"
        "The limit of lambda_e/q^d is the Hilbert-Kunz multiplicity (Monsky);\n"
        "lambda_e >= q^d with equality iff the point is regular (Kunz)."
    ),
    "fsig": (
        "a_e = lambda(S/(m^[q] : (I^[q]:I))), the rank of the largest free\n"
        "direct summand of the e-th Frobenius pushforward; s_e = a_e/q^d\n"
        "converges to the F-signature (Tucker). s = 1 iff regular\n"
        "(Huneke-Leuschke); s > 0 iff strongly F-regular (Aberbach-Leuschke)."
    ),
    "fedder": (
        "F-pure iff (I^[p] : I) is not contained in m^[p] (Fedder's criterion);\n"
        "for a hypersurface f this reads f^(p-1) not in m^[p]."
    ),
    "pair": (
        "a_e(R, a^t) = lambda(S/(m^[q] : a^ceil(t(q-1)) * (I^[q]:I))):\n"
        "splitting numbers of the Cartier subalgebra scaled by powers of a\n"
        "(Blickle-Schwede-Tucker); t = 0 recovers the plain splitting numbers."
    ),
    "nu": (
        "nu(q) = max{r : a^r not in m^[q] + I}; the growth of nu(q)/q locates\n"
        "the F-pure threshold and guides t-grids for pair sweeps."
    ),
    "global_hk": (
        "max of the local Hilbert-Kunz estimates over sampled primes on the\n"
        "gamma-attaining locus; a lower bound for the global value under\n"
        "incomplete sampling.  Off-locus samples are excluded."
    ),
    "global_fsig": (
        "min of the local F-signature estimates over sampled primes; exactly 0\n"
        "whenever some component misses the global gamma.  An upper bound for\n"
        "the global value under incomplete sampling."
    ),
    "semicontinuity": (
        "checks lambda_e(special) >= lambda_e(P) for nearby rational points on\n"
        "one equidimensional component: upper semicontinuity of the normalized\n"
        "bracket-power length (Shepherd-Barron / Smirnov style)."
    ),
    "flat_check": (
        "adjoins k free variables (flat extension with regular closed fiber)\n"
        "and verifies lambda_T(e) = q^k * lambda_R(e) and s_e(T) = s_e(R)\n"
        "integer-exactly for each e (Kunz's flat comparison with equality)."
    ),
    "classify": (
        "flags: regular (lambda_1 = p^d, exact), F-pure (Fedder),\n"
        "small-multiplicity prediction e_HK <= 1 + max{1/d!, 1/e(R)}\n"
        "(strongly F-regular and Gorenstein), and the bound\n"
        "(e(R)-1)(1-s) >= e_HK - 1 (Huneke-Leuschke).  Limit-based flags are\n"
        "estimate-based, never proofs."
    ),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="charp",
        description="Exact F-invariants of F_p[x..]/I presentations: "
                    "Hilbert-Kunz functions, Frobenius splitting numbers, "
                    "F-purity, pair invariants, and global max/min sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a job file and write reports")
    run_p.add_argument("job", type=Path)
    run_p.add_argument("--tolerance", type=float, default=None,
                       help="override the convergence tolerance")
    run_p.add_argument("--budget-monomials", type=int, default=None,
                       help="cap on any standard-monomial box")
    run_p.add_argument("--jobs", type=int, default=None,
                       help="worker processes for independent tasks")
    run_p.add_argument("--json-only", action="store_true",
                       help="skip the TSV report")

    sub.add_parser("selftest", help="run the built-in corpus and properties")

    exp_p = sub.add_parser("explain", help="print the formula a task computes")
    exp_p.add_argument("task", choices=sorted(TASK_KINDS))

    args = parser.parse_args(argv)

    if args.command == "selftest":
        from .selftest import run_selftest

        return run_selftest()

    if args.command == "explain":
        print(f"{args.task}:")
        print(_EXPLANATIONS[args.task])
        return 0

    # run
    try:
        job = parse_job_file(str(args.job))
    except (ParseError, OSError) as exc:
        print(f"charp: job parse error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # malformed structure
        print(f"charp: job parse error: {exc}", file=sys.stderr)
        return 1

    overrides = {
        "tolerance": args.tolerance,
        "budget_monomials": args.budget_monomials,
        "jobs": args.jobs,
    }
    env_cap = os.environ.get("CHARP_BUDGET_MONOMIALS")
    if env_cap is not None:
        try:
            overrides["env_budget_monomials"] = int(env_cap)
        except ValueError:
            print("charp: CHARP_BUDGET_MONOMIALS must be an integer",
                  file=sys.stderr)
            return 1

    report = run_job(job, overrides)

    base = args.job
    stem = base.with_suffix("") if base.suffix else base
    json_path = Path(f"{stem}.report.json")
    json_path.write_text(report_to_json(report), encoding="utf-8")
    wrote = [str(json_path)]
    if not args.json_only:
        tsv_path = Path(f"{stem}.report.tsv")
        tsv_path.write_text(report_to_tsv(report), encoding="utf-8")
        wrote.append(str(tsv_path))
    print(f"charp: wrote {', '.join(wrote)}", file=sys.stderr)

    if report["status"] != "ok":
        for task in report["tasks"]:
            if task["status"] != "ok":
                print(f"charp: task {task['index']} ({task['kind']}) failed: "
                      f"{task.get('error', 'unknown error')}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
