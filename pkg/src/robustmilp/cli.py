"""Command-line front end.

Subcommands
-----------
``rmax``, ``rs``, ``fmax``, ``bounds``
    Analyse one graph file and print a JSON report.
``gen``
    Write a seeded random graph as a canonical edge list.
``bench``
    Run both methods over a grid of random graphs and write a CSV.

Exit codes
----------
0 success; 2 unreadable input or invalid arguments; 3 a result failed its
exact re-check (internal inconsistency, or methods disagreeing in ``bench``);
4 a time limit stopped a solve before optimality (a partial report is still
printed).

The default per-solve time limit comes from ``ROBUSTMILP_TIME_LIMIT`` when
``--time-limit`` is not given.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, api, oracle
from .generators import Family, GenSpec, generate
from .graph import Digraph
from .graphio import GraphFormatError, graph_digest, read_graph, write_edge_list
from .solver import SolveConfig

SCHEMA_VERSION = 1
BENCH_SCHEMA_VERSION = 1
TIME_LIMIT_ENV = "ROBUSTMILP_TIME_LIMIT"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3
EXIT_TIME_LIMIT = 4

DEFAULT_P = (0.3, 0.5, 0.8)
DEFAULT_K = (3, 4, 5)
BENCH_MAX_N = 12

PARTS = {"rmax": ("rmax",), "rs": ("rs",), "fmax": ("rs", "fmax"), "bounds": ("rmax", "bounds")}


class UsageError(ValueError):
    pass


def _env_time_limit() -> float | None:
    raw = os.environ.get(TIME_LIMIT_ENV)
    if raw is None or not raw.strip():
        return None
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"{TIME_LIMIT_ENV}={raw!r} is not a number") from None
    if value < 0:
        raise UsageError(f"{TIME_LIMIT_ENV} must be nonnegative")
    return value


def _time_limit(args) -> float | None:
    return args.time_limit if args.time_limit is not None else _env_time_limit()


# ---------------------------------------------------------------------------
# analysis commands


def report_to_json(report: api.RobustnessReport, *, command: str, digest: str, seed: int, time_limit) -> dict:
    """The versioned JSON document for one analysis run."""
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "robustmilp",
        "tool_version": __version__,
        "command": command,
        "input_sha256": digest,
        "method": report.method.value,
        "seed": seed,
        "time_limit": time_limit,
        "n": report.n,
        "exact": report.exact,
        "r_max": report.r_max,
        "s_max": report.s_max_at_r_max,
        "f_max": report.f_max,
        "bounds": {"lower": report.lower_bound_r, "upper": report.upper_bound_r},
        "brackets": {
            "r_max": list(report.r_max_bracket) if report.r_max_bracket else None,
            "s_max": list(report.s_max_bracket) if report.s_max_bracket else None,
        },
        "certificates": {k: [sorted(part) for part in v] for k, v in sorted(report.certificates.items())},
        "stages": [s.to_dict() for s in report.stages],
        "notes": list(report.notes),
    }


def _text_summary(doc: dict) -> str:
    lines = [f"n = {doc['n']}  method = {doc['method']}  exact = {doc['exact']}"]
    for key in ("r_max", "s_max", "f_max"):
        if doc[key] is not None:
            lines.append(f"{key} = {doc[key]}")
        elif doc["brackets"].get(key):
            lo, hi = doc["brackets"][key]
            lines.append(f"{key} in [{lo}, {hi}]")
    if doc["bounds"]["lower"] is not None or doc["bounds"]["upper"] is not None:
        lines.append(f"bounds = [{doc['bounds']['lower']}, {doc['bounds']['upper']}]")
    for name, parts in doc["certificates"].items():
        lines.append(f"certificate {name}: " + " | ".join("{" + ", ".join(map(str, p)) + "}" for p in parts))
    lines.extend(f"note: {note}" for note in doc["notes"])
    return "\n".join(lines) + "\n"


def _write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    D, _ = read_graph(args.file, undirected=args.undirected)
    method = api.Method(args.method)
    if args.command == "bounds" and D.n < 2:
        raise UsageError("bounds need a graph with at least two vertices")
    limit = _time_limit(args)
    cfg = SolveConfig(time_limit=limit, rng_seed=args.seed)
    report = api.analyze(D, cfg, method, PARTS[args.command])
    doc = report_to_json(report, command=args.command, digest=graph_digest(D), seed=args.seed, time_limit=limit)
    text = json.dumps(doc, indent=2) + "\n" if args.json else _text_summary(doc)
    _write_output(text, args.out)
    return EXIT_OK if report.exact else EXIT_TIME_LIMIT


# ---------------------------------------------------------------------------
# generator


def cmd_gen(args) -> int:
    try:
        spec = GenSpec(Family(args.family), args.n, p=args.p, k=args.k, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_output(write_edge_list(generate(spec)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# benchmark


BENCH_COLUMNS = [
    "schema_version", "row_type", "problem", "family", "n", "param", "trial", "seed", "method",
    "r", "s", "status", "elapsed_seconds", "max_stage_seconds", "count", "min_seconds",
    "mean_seconds", "max_seconds", "error",
]


@dataclass
class BenchResult:
    rows: list = field(default_factory=list)
    summaries: list = field(default_factory=list)
    disagreements: list = field(default_factory=list)
    compared: int = 0


def trial_seed(base: int, family: Family, n: int, param_index: int, trial: int) -> int:
    """Per-trial 64-bit seed derived from the base seed and the cell coordinates."""
    fam = list(Family).index(family)
    ss = np.random.SeedSequence([base, fam, n, param_index, trial])
    return int(ss.generate_state(1, np.uint64)[0])


def _bench_arms(problem: str):
    if problem == "rs":
        return ("milp", "exhaustive")
    return ("milp", "exhaustive", "lower_bound", "upper_bound")


def _run_arm(D: Digraph, problem: str, arm: str, cfg: SolveConfig) -> dict:
    row = {"r": "", "s": "", "status": "optimal", "error": "", "max_stage_seconds": ""}
    start = time.perf_counter()
    try:
        if arm == "exhaustive":
            if problem == "rs":
                row["r"], row["s"] = oracle.determine_robustness(D)
            else:
                row["r"] = oracle.determine_rmax_exhaustive(D)
            stages = []
        elif arm == "milp":
            report = api.analyze(D, cfg, api.Method.MILP, ("rs",) if problem == "rs" else ("rmax",))
            stages = report.stages
            row["r"] = "" if report.r_max is None else report.r_max
            if problem == "rs":
                row["s"] = "" if report.s_max_at_r_max is None else report.s_max_at_r_max
            if not report.exact:
                row["status"] = "time_limit"
        else:
            bounds = api.r_max_bounds(D, cfg, api.Method.MILP)
            stages = [s for s in bounds.stages if s.name == arm]
            value = bounds.lower if arm == "lower_bound" else bounds.upper
            row["r"] = "" if value is None else value
            if value is None:
                row["status"] = "time_limit"
        row["max_stage_seconds"] = round(max((s.elapsed for s in stages), default=0.0), 6)
    except Exception as exc:  # recorded in-row; the run continues
        row["status"] = "error"
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["elapsed_seconds"] = round(time.perf_counter() - start, 6)
    return row


def run_bench(
    families,
    n_values,
    trials: int,
    *,
    problem: str = "rs",
    p_values=DEFAULT_P,
    k_values=DEFAULT_K,
    time_limit: float | None = 10.0,
    seed: int = 0,
    progress=None,
) -> BenchResult:
    """Run every method on ``trials`` random graphs per (family, n, p or k) cell.

    Rows come back in a fixed order, one per trial and method, followed by
    min/mean/max elapsed-time summaries per cell and method.  A trial is
    compared across methods only when every arm finished optimally.
    """
    if problem not in ("rs", "rmax"):
        raise UsageError("problem must be 'rs' or 'rmax'")
    cfg = SolveConfig(time_limit=time_limit, rng_seed=seed)
    out = BenchResult()
    arms = _bench_arms(problem)
    for family in map(Family, families):
        params = p_values if family in (Family.ER, Family.DIGRAPH) else k_values
        for n in n_values:
            for pi, param in enumerate(params):
                if family in (Family.KOUT, Family.KIN) and param > n - 1:
                    continue
                cell_rows = []
                for trial in range(trials):
                    tseed = trial_seed(seed, family, n, pi, trial)
                    if family in (Family.ER, Family.DIGRAPH):
                        spec = GenSpec(family, n, p=param, seed=tseed)
                    else:
                        spec = GenSpec(family, n, k=param, seed=tseed)
                    D = generate(spec)
                    results = {}
                    for arm in arms:
                        res = _run_arm(D, problem, arm, cfg)
                        results[arm] = res
                        row = {
                            "schema_version": BENCH_SCHEMA_VERSION, "row_type": "trial", "problem": problem,
                            "family": family.value, "n": n, "param": param, "trial": trial, "seed": tseed,
                            "method": arm, **res,
                        }
                        cell_rows.append(row)
                        out.rows.append(row)
                    _compare(problem, family, n, param, trial, results, out)
                    if progress:
                        progress(family.value, n, param, trial)
                for arm in arms:
                    times = [r["elapsed_seconds"] for r in cell_rows if r["method"] == arm]
                    out.summaries.append({
                        "schema_version": BENCH_SCHEMA_VERSION, "row_type": "summary", "problem": problem,
                        "family": family.value, "n": n, "param": param, "method": arm,
                        "count": len(times), "min_seconds": min(times),
                        "mean_seconds": round(statistics.fmean(times), 6), "max_seconds": max(times),
                    })
    return out


def _compare(problem, family, n, param, trial, results, out: BenchResult) -> None:
    if any(r["status"] != "optimal" for r in results.values()):
        return
    out.compared += 1
    milp, ex = results["milp"], results["exhaustive"]
    where = f"{family.value} n={n} param={param} trial={trial}"
    if (milp["r"], milp["s"]) != (ex["r"], ex["s"]):
        out.disagreements.append(f"{where}: milp ({milp['r']}, {milp['s']}) vs exhaustive ({ex['r']}, {ex['s']})")
    if problem == "rmax" and not results["lower_bound"]["r"] <= ex["r"] <= results["upper_bound"]["r"]:
        out.disagreements.append(f"{where}: bounds do not bracket r_max = {ex['r']}")


def write_bench_csv(result: BenchResult, stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=BENCH_COLUMNS, restval="", lineterminator="\n")
    writer.writeheader()
    writer.writerows(result.rows)
    writer.writerows(result.summaries)


def _int_range(text: str) -> list[int]:
    """``7..12``, ``7-12`` or a single integer."""
    for sep in ("..", "-"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _csv_list(convert):
    def parse(text):
        try:
            return [convert(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def cmd_bench(args) -> int:
    try:
        n_values = _int_range(args.n_range)
    except ValueError:
        raise UsageError(f"bad --n-range {args.n_range!r}") from None
    if not n_values or min(n_values) < 2:
        raise UsageError("--n-range must lie at or above 2")
    if max(n_values) > args.max_n:
        raise UsageError(f"--n-range exceeds the exhaustive cap of {args.max_n} (raise it with --max-n)")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    try:
        families = [Family(f) for f in args.families]
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    def progress(fam, n, param, trial):
        if args.verbose:
            print(f"{fam} n={n} param={param} trial={trial}", file=sys.stderr)

    result = run_bench(
        families, n_values, args.trials, problem=args.problem, p_values=args.p_values,
        k_values=args.k_values, time_limit=_time_limit(args), seed=args.seed, progress=progress,
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_bench_csv(result, fh)
    else:
        write_bench_csv(result, sys.stdout)
    print(
        f"compared {result.compared} trials, {len(result.disagreements)} disagreements",
        file=sys.stderr,
    )
    for line in result.disagreements:
        print(f"disagreement: {line}", file=sys.stderr)
    return EXIT_INCONSISTENT if result.disagreements else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustmilp",
        description="r- and (r, s)-robustness of digraphs by MILP or exhaustive search.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    helps = {
        "rmax": "largest r for which the graph is r-robust",
        "rs": "lexicographically largest (r, s) pair",
        "fmax": "largest F with the graph (F+1, F+1)-robust",
        "bounds": "lower and upper bound programs on r_max",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("file", help="edge list (n <count> header, then 'i j' lines) or adjacency .csv")
        p.add_argument("--method", choices=[m.value for m in api.Method], default="milp")
        p.add_argument("--time-limit", type=float, default=None, help=f"seconds per solve (default ${TIME_LIMIT_ENV})")
        p.add_argument("--seed", type=int, default=0, help="solver tie-breaking seed, recorded in the report")
        p.add_argument("--undirected", action="store_true", help="treat every listed edge as both directions")
        p.add_argument("--json", action=argparse.BooleanOptionalAction, default=True, help="JSON report (default) or text")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.set_defaults(handler=cmd_analyze)

    g = sub.add_parser("gen", help="write a seeded random graph")
    g.add_argument("--family", required=True, choices=[f.value for f in Family])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, help="edge probability (er, digraph)")
    g.add_argument("--k", type=int, help="picks per vertex (kout, kin)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path (default stdout)")
    g.set_defaults(handler=cmd_gen)

    b = sub.add_parser("bench", help="compare methods over random graph families, CSV output")
    b.add_argument("--families", type=_csv_list(str), default=[f.value for f in Family], help="comma list")
    b.add_argument("--n-range", default="7..8", help="e.g. 7..12")
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--problem", choices=["rs", "rmax"], default="rs")
    b.add_argument("--p-values", type=_csv_list(float), default=list(DEFAULT_P))
    b.add_argument("--k-values", type=_csv_list(int), default=list(DEFAULT_K))
    b.add_argument("--time-limit", type=float, default=None, help=f"seconds per solve (default ${TIME_LIMIT_ENV}, else 10)")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--max-n", type=int, default=BENCH_MAX_N, help="safety cap for the exhaustive arm")
    b.add_argument("--out", help="CSV path (default stdout)")
    b.add_argument("--verbose", action="store_true", help="progress on stderr")
    b.set_defaults(handler=cmd_bench, bench=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "bench", False) and args.time_limit is None and _env_time_limit() is None:
            args.time_limit = 10.0
        return args.handler(args)
    except (GraphFormatError, UsageError) as exc:
        print(f"robustmilp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except api.InternalInconsistency as exc:
        print(f"robustmilp: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
