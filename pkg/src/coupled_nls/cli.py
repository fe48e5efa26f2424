"""Command-line front end: solve, sweep, thresholds, verify.

Exit status: 0 success, 1 numerical failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .minimizer import GroundStateReport, minimize_ground_state, verify_ground_state
from .model import ProblemParams, validate_params
from .scalar import ConvergenceError
from .thresholds import constant_C, constant_D, d_in_scope, sufficient_bound, threshold_report
from .verification import format_check, run_suite

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2
NA = "n/a"
SWEEP_COLUMNS = ["m", "u_norm_l2", "v_norm_l2", "classification", "I_u0", "I_v0", "C", "D",
                 "trial_energy", "status"]


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def _out_dir(cfg: RunConfig, override: Optional[str]) -> Path:
    path = Path(override if override is not None else cfg.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_profile(report: GroundStateReport, path: Path) -> None:
    s = report.state
    p = report.params
    lines = [
        f"# n={p.n}",
        f"# q={fmt(p.q)}",
        f"# b={fmt(p.b)}",
        f"# omega={fmt(p.omega)}",
        f"# m={fmt(report.m)}",
        f"# tau_residual={fmt(report.tau_residual)}",
        f"# classification={report.classification.value}",
        "r,u,v",
    ]
    for r, u, v in zip(s.grid.nodes, s.u.values, s.v.values):
        lines.append(f"{fmt(r)},{fmt(u)},{fmt(v)}")
    path.write_text("\n".join(lines) + "\n")


def solve_point(p: ProblemParams, cfg: RunConfig) -> GroundStateReport:
    return minimize_ground_state(p, cfg.grid.build(p.n), cfg.minimizer)


def cmd_solve(cfg: RunConfig, out: Optional[str] = None) -> int:
    try:
        report = solve_point(cfg.params, cfg)
    except ConvergenceError as exc:
        print(f"error: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERICAL
    directory = _out_dir(cfg, out)
    stem = cfg.output.prefix
    if cfg.output.write_profile:
        write_profile(report, directory / f"{stem}_profile.csv")
    if cfg.output.write_report:
        data = report.summary()
        checks = verify_ground_state(report, cfg.params)
        data["verification"] = [
            {"name": c.name, "passed": c.passed, "value": c.value, "tolerance": c.tolerance}
            for c in checks.checks
        ]
        (directory / f"{stem}_report.json").write_text(json.dumps(data, indent=2) + "\n")
    print(f"m = {fmt(report.m)}  classification = {report.classification.value}  "
          f"converged = {report.converged}")
    if not report.converged:
        print("error: best restart did not converge: " + report.restarts[report.best_restart].message,
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _d_value(p: ProblemParams):
    return constant_D(p.q, p.omega) if p.n == 1 and d_in_scope(p.q, p.omega) else NA


def sweep_row(p: ProblemParams, cfg: RunConfig) -> List[str]:
    """One sweep row; failures are recorded in the status column."""
    c = constant_C(p)
    d = _d_value(p)
    try:
        rep = solve_point(p, cfg)
    except (ConvergenceError, ValueError) as exc:
        return [NA] * 6 + [fmt(c), fmt(d), NA, f"error: {exc}".replace(",", ";")]
    status = "ok" if rep.converged else "not_converged"
    return [fmt(rep.m), fmt(rep.u_norm), fmt(rep.v_norm), rep.classification.value,
            fmt(rep.semitrivial_u), fmt(rep.semitrivial_v), fmt(c), fmt(d), fmt(rep.trial_energy), status]


def _sweep_task(args):
    p, cfg = args
    return sweep_row(p, cfg)


def cmd_sweep(cfg: RunConfig, out: Optional[str] = None, threads: int = 1) -> int:
    if cfg.sweep is None:
        print("error: configuration has no 'sweep' section", file=sys.stderr)
        return EXIT_CONFIG
    lattice = cfg.lattice()
    axis = cfg.sweep.variable
    tasks = [(p, cfg) for p in lattice]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_task, tasks))   # map keeps lattice order
    else:
        rows = [_sweep_task(t) for t in tasks]
    directory = _out_dir(cfg, out)
    path = directory / f"{cfg.output.prefix}_sweep.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([axis] + SWEEP_COLUMNS)
        for p, row in zip(lattice, rows):
            writer.writerow([fmt(getattr(p, axis))] + row)
    failures = sum(row[-1] != "ok" for row in rows)
    print(f"wrote {len(rows)} rows to {path}; {failures} failed")
    return EXIT_NUMERICAL if failures else EXIT_OK


def threshold_rows(qs: Sequence[float], omegas: Sequence[float], ns: Sequence[int]) -> List[dict]:
    rows = []
    for n in ns:
        for q in qs:
            for om in omegas:
                p = ProblemParams(n, q, 0.0, om)
                check = validate_params(p)
                if not check:
                    rows.append({"n": n, "q": q, "omega": om, "C": NA, "D": NA, "eps_opt": NA,
                                 "b_opt": NA, "trial_bound": NA, "notes": "; ".join(check.reasons)})
                    continue
                rep = threshold_report(q, om, n)
                rows.append({
                    "n": n, "q": q, "omega": om, "C": rep.c_const,
                    "D": NA if rep.d_const is None else rep.d_const,
                    "eps_opt": rep.eps_opt, "b_opt": rep.b_opt,
                    "trial_bound": sufficient_bound(q, om, n, rep.eps_opt),
                    "notes": "; ".join(rep.notes),
                })
    return rows


def cmd_thresholds(qs, omegas, ns, out: Optional[str] = None) -> int:
    rows = threshold_rows(qs, omegas, ns)
    cols = ["n", "q", "omega", "C", "D", "eps_opt", "b_opt", "trial_bound", "notes"]
    print("  ".join(f"{c:>12}" for c in cols[:-1]) + "  notes")
    for row in rows:
        cells = [row[c] if isinstance(row[c], str) else f"{row[c]:12.6g}" for c in cols[:-1]]
        print("  ".join(f"{c:>12}" for c in cells) + "  " + row["notes"])
    if out is not None:
        directory = Path(out)
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / "thresholds.csv").open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(cols)
            for row in rows:
                writer.writerow([row[c] if isinstance(row[c], str) or c == "n" else fmt(row[c]) for c in cols])
    return EXIT_OK


def cmd_verify(level: str, num_points: Optional[int] = None) -> int:
    def show(group, check):
        print(f"[{group}] {format_check(check)}", flush=True)

    results = run_suite(level, num_points, report=show)
    failed = [c.name for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coupled-nls", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="ground state for one parameter point")
    solve.add_argument("--config", required=True, metavar="PATH")
    solve.add_argument("--out", metavar="DIR")

    sweep = sub.add_parser("sweep", help="ground states along one parameter axis")
    sweep.add_argument("--config", required=True, metavar="PATH")
    sweep.add_argument("--out", metavar="DIR")
    sweep.add_argument("--threads", type=int, default=1, metavar="K")

    thr = sub.add_parser("thresholds", help="coupling thresholds and eps optimization")
    thr.add_argument("--q", type=float, nargs="+", required=True)
    thr.add_argument("--omega", type=float, nargs="+", required=True)
    thr.add_argument("--n", type=int, nargs="+", default=[1])
    thr.add_argument("--out", metavar="DIR")

    ver = sub.add_parser("verify", help="run the invariant suite")
    ver.add_argument("--level", choices=("fast", "full"), default="fast")
    ver.add_argument("--num-points", type=int, metavar="N",
                     help="override the grid size of the grid-dependent fast checks")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    np.seterr(all="ignore")
    try:
        if args.command == "solve":
            return cmd_solve(load_config(args.config), args.out)
        if args.command == "sweep":
            if args.threads < 1:
                raise ConfigError("--threads must be at least 1")
            return cmd_sweep(load_config(args.config), args.out, args.threads)
        if args.command == "thresholds":
            return cmd_thresholds(args.q, args.omega, args.n, args.out)
        if args.command == "verify":
            if args.num_points is not None and args.num_points < 16:
                raise ConfigError("--num-points must be at least 16")
            return cmd_verify(args.level, args.num_points)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
