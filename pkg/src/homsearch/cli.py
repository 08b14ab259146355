"""Command-line interface.

Subcommands: mu, track, solve, optimize-r, search, oracle, selftest.
All randomness flows from --seed; identical invocations produce identical
output files.  Exit codes: 0 success, 1 numerical failure (with a
machine-readable error line on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import HomsearchError
from .oracle import multistart_roots, univariate_roots
from .polynomials import normalize_to_sphere
from .projective import ProjectivePoint, condition_mu
from .rng import DOMAIN_PAIR, substream
from .search import ExperimentConfig, run_experiment, solve_all
from .selftest import run_selftest
from .start_systems import (
    good_initial_pair,
    optimize_r,
    random_initial_pair,
    total_degree,
)
from .sysio import parse_system, write_report, write_system
from .tracking import (
    HeuristicSettings,
    make_aligned_homotopy,
    path_length_c0,
    track_certified,
    track_heuristic,
)


def _parse_degrees(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from None


def _point_str(z: ProjectivePoint) -> str:
    return "[" + ", ".join(f"{float(c.real)!r}{float(c.imag):+}j" for c in z.coords) + "]"


def _cmd_mu(args) -> int:
    parsed = parse_system(args.file)
    system = normalize_to_sphere(parsed.system)
    if args.all_roots:
        roots = solve_all(system, "certified", args.seed)
    elif parsed.roots:
        roots = list(parsed.roots)
    else:
        print("no roots in file; pass --all-roots to solve", file=sys.stderr)
        return 2
    values = [condition_mu(system, z) for z in roots]
    for i, value in enumerate(values, start=1):
        print(f"mu(g,z{i}) = {value:.6g}")
    print(f"mu(g) = {max(values):.6g}")
    return 0


def _start_pair(args, degrees):
    if args.start_family == "total":
        r = optimize_r(degrees)[0] if args.r_opt else args.r
        return total_degree(degrees, r)
    if args.start_family == "good":
        return good_initial_pair(degrees)
    return random_initial_pair(degrees, substream(args.seed, DOMAIN_PAIR))


def _cmd_track(args) -> int:
    target = normalize_to_sphere(parse_system(args.target).system)
    start_parsed = parse_system(args.start)
    start_system = normalize_to_sphere(start_parsed.system)
    if not start_parsed.roots:
        print("start file must list at least one root", file=sys.stderr)
        return 2
    start = start_parsed.roots[args.start_index]
    H = make_aligned_homotopy(target, start_system)
    if args.heuristic:
        result = track_heuristic(H, start, HeuristicSettings(), retain_trace=args.trace)
    else:
        result = track_certified(H, start)
    print(f"NumberOfSteps = {result.num_steps}")
    print(f"status = {result.status}")
    print(f"endpoint = {_point_str(result.endpoint)}")
    if args.trace and result.status == "converged" and not args.heuristic:
        c0 = path_length_c0(result, H)
        print(f"T = {H.T!r}")
        print(f"condition_length_estimate = {c0!r}")
    return 0 if result.status == "converged" else 1


def _cmd_solve(args) -> int:
    target = normalize_to_sphere(parse_system(args.target).system)
    degrees = target.degrees
    tracker = "heuristic" if args.heuristic else "certified"
    if args.start_family == "total":
        roots = solve_all(target, tracker, args.seed)
    else:
        # Single-path families: track their one known root.
        pair = _start_pair(args, degrees)
        H = make_aligned_homotopy(target, pair.g)
        if tracker == "heuristic":
            result = track_heuristic(H, pair.starts[0], HeuristicSettings())
        else:
            result = track_certified(H, pair.starts[0])
        if result.status != "converged":
            raise HomsearchError(f"path failed: {result.status}")
        roots = [result.endpoint]
    for i, z in enumerate(roots, start=1):
        print(f"root {i}: {_point_str(z)}")
    if args.out:
        write_system(target, args.out, roots=roots)
        print(f"wrote {args.out}")
    return 0


def _cmd_optimize_r(args) -> int:
    r_star, mu_star = optimize_r(args.degrees)
    print(f"r_star = {r_star:.6g}")
    print(f"mu_star = {mu_star:.6g}")
    return 0


def _cmd_search(args) -> int:
    config = ExperimentConfig(
        degrees=args.degrees,
        mode=args.mode,
        seed=args.seed,
        num_candidates=args.candidates,
        keep=args.keep,
        num_targets=args.targets,
        pilot_targets=args.pilot_targets,
        tracker=args.tracker,
        include_total_r1=not args.no_total_r1,
        include_total_ropt=not args.no_total_ropt,
        include_good=args.include_good,
        include_fekete=args.include_fekete,
        include_random=args.include_random,
        workers=args.threads,
    )
    report = run_experiment(config)
    json_path, csv_path = write_report(report, args.out, include_timing=args.timing)
    print(f"wrote {json_path} and {csv_path}")
    if report.candidates:
        best = report.candidates[0]
        print(f"best candidate: {best.system_id} mu={best.mu:.6g}")
    if report.one_root:
        for tracker, kinds in report.one_root.items():
            summary = ", ".join(f"{k}: {v.mean:.2f}" for k, v in kinds.items())
            print(f"{tracker}: {summary}")
    return 0


def _cmd_oracle(args) -> int:
    parsed = parse_system(args.file)
    system = parsed.system
    if system.n == 1:
        roots = univariate_roots(system.polys[0])
    else:
        roots = multistart_roots(system, attempts=args.attempts, seed=args.seed)
    print(f"method = {roots.method}")
    for i, (z, res) in enumerate(zip(roots.roots, roots.residuals), start=1):
        print(f"root {i}: {_point_str(z)}  residual={res:.3g}")
    return 0


def _cmd_selftest(args) -> int:
    return 0 if run_selftest() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homsearch",
        description="certified homotopy continuation and start-system search",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=0, help="master 64-bit seed")
        p.add_argument("--threads", type=int, default=1, help="worker processes")

    p = sub.add_parser("mu", help="condition number of a system file")
    add_common(p)
    p.add_argument("--file", required=True)
    p.add_argument("--all-roots", action="store_true",
                   help="solve for all roots instead of using roots from the file")
    p.set_defaults(fn=_cmd_mu)

    p = sub.add_parser("track", help="track one path from a start file root")
    add_common(p)
    p.add_argument("--target", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--start-index", type=int, default=0)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--certified", action="store_true", default=True)
    group.add_argument("--heuristic", action="store_true", default=False)
    p.add_argument("--trace", action="store_true",
                   help="also print path length in the condition metric")
    p.set_defaults(fn=_cmd_track)

    p = sub.add_parser("solve", help="all roots of a target from a start family")
    add_common(p)
    p.add_argument("--target", required=True)
    p.add_argument("--start-family", choices=("total", "good", "random"), default="total")
    p.add_argument("--r", type=float, default=1.0, help="total-degree radius")
    p.add_argument("--r-opt", action="store_true", help="use the optimized radius")
    p.add_argument("--heuristic", action="store_true")
    p.add_argument("--out", help="write roots alongside the system to this file")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("optimize-r", help="best-conditioned total-degree radius")
    add_common(p)
    p.add_argument("--degrees", type=_parse_degrees, required=True)
    p.set_defaults(fn=_cmd_optimize_r)

    p = sub.add_parser("search", help="random start-system search experiment")
    add_common(p)
    p.add_argument("--degrees", type=_parse_degrees, required=True)
    p.add_argument("--mode", choices=("by_condition", "by_avg_steps", "one_root"),
                   default="by_condition")
    p.add_argument("--candidates", type=int, default=2000)
    p.add_argument("--keep", type=int, default=5)
    p.add_argument("--targets", type=int, default=500)
    p.add_argument("--pilot-targets", type=int, default=50)
    p.add_argument("--tracker", choices=("certified", "heuristic", "both"),
                   default="certified")
    p.add_argument("--no-total-r1", action="store_true")
    p.add_argument("--no-total-ropt", action="store_true")
    p.add_argument("--include-good", action="store_true")
    p.add_argument("--include-fekete", action="store_true")
    p.add_argument("--include-random", action="store_true")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock in the JSON report (breaks byte determinism)")
    p.add_argument("--out", default="report", help="output base path")
    p.set_defaults(fn=_cmd_search)

    p = sub.add_parser("oracle", help="independent validation roots")
    add_common(p)
    p.add_argument("--file", required=True)
    p.add_argument("--attempts", type=int, default=None)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("selftest", help="deterministic acceptance subset")
    add_common(p)
    p.set_defaults(fn=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (HomsearchError, np.linalg.LinAlgError, ValueError) as exc:
        line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
        print(line, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
