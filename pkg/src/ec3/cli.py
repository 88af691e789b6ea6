"""Command-line interface.

Subcommands: generate, solve, oracle, verify, sweep, trace. Every command
echoes its fully resolved configuration as `c key=value` comment lines so a
result can be reproduced from its own output; machine-readable output is CSV
(trajectories, flow labels, sweeps) or JSON documents carrying a top-level
`schema: 1`. JSON floats are printed with 17 significant digits (enough to
reconstruct the exact double), human-readable text with 9.

Exit codes: 0 = solved / SAT / report written, 1 = not solved within the
run budget or UNSAT, 2 = usage or input error.

The --workers flag only chooses how much hardware to use: solve and sweep
results are contractually identical for every worker count (runs are
scheduled in fixed waves keyed to run indices), so the worker count is not
part of the reproducibility header.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

import numpy as np

from .cost import CostFunction
from .instance import (
    ORACLE_CAP,
    brute_force_oracle,
    check_assignment,
    emit_instance,
    generate_instance,
    parse_assignment,
    parse_instance,
)
from .flows import (
    classify_flows,
    phase_sweep,
    r_star_estimate,
    write_labels_csv,
    write_sweep_csv,
    write_trajectory_csv,
)
from .solver import (
    SolverConfig,
    rerun_with_trajectory,
    solve_with_restarts,
    stopping_rule,
)


def _g17(x) -> str:
    return format(float(x), ".17g")


def _g9(x) -> str:
    return format(float(x), ".9g")


def dumps17(obj, indent: int = 2) -> str:
    """JSON text with every float rendered at 17 significant digits."""

    def render(o, level):
        pad = " " * (indent * level)
        pad_in = " " * (indent * (level + 1))
        if o is None:
            return "null"
        if o is True:
            return "true"
        if o is False:
            return "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _g17(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = ",\n".join(
                f"{pad_in}{json.dumps(str(k))}: {render(v, level + 1)}" for k, v in o.items()
            )
            return "{\n" + items + "\n" + pad + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            seq = list(o)
            if not seq:
                return "[]"
            flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
            if flat:
                return "[" + ", ".join(render(v, level + 1) for v in seq) + "]"
            items = ",\n".join(pad_in + render(v, level + 1) for v in seq)
            return "[\n" + items + "\n" + pad + "]"
        raise TypeError(f"cannot serialize {type(o)!r}")

    return render(obj, 0) + "\n"


def _echo(line: str) -> None:
    print("c " + line)


def _read_instance(path: str):
    with open(path) as fh:
        return parse_instance(fh.read(), label=os.path.basename(path))


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        eta=args.eta,
        start_radius=args.radius,
        max_iters=args.max_iters,
        stop_tol=args.tol,
        seed=args.seed,
        record_every=args.record_every,
    )


def _echo_solver_config(cfg: SolverConfig, restarts: int) -> None:
    _echo(
        f"config: eta={_g9(cfg.eta)} radius={_g9(cfg.start_radius)} "
        f"max-iters={cfg.max_iters} tol={_g9(cfg.stop_tol)} seed={cfg.seed} "
        f"restarts={restarts} record-every={cfg.record_every}"
    )


def _config_dict(cfg: SolverConfig, restarts: int) -> dict:
    return {
        "eta": cfg.eta,
        "start_radius": cfg.start_radius,
        "max_iters": cfg.max_iters,
        "stop_tol": cfg.stop_tol,
        "seed": cfg.seed,
        "restarts": restarts,
        "record_every": cfg.record_every,
    }


def _instance_dict(instance, path=None) -> dict:
    d = {
        "n_vars": instance.n_vars,
        "n_clauses": instance.n_clauses,
        "r": instance.ratio,
    }
    if path is not None:
        d["path"] = path
    return d


def _write_output(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    inst = generate_instance(args.n_vars, args.n_clauses, args.seed)
    text = emit_instance(
        inst,
        comments=[
            f"generated: n={args.n_vars} m={args.n_clauses} seed={args.seed}",
            f"r = {_g9(inst.ratio)}",
        ],
    )
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        _echo(f"wrote {args.output}")
        _echo(f"r = {_g9(inst.ratio)}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args) -> int:
    inst = _read_instance(args.instance)
    cfg = _solver_config(args)
    f = CostFunction.from_instance(inst)
    outcome = solve_with_restarts(f, cfg, args.restarts, workers=args.workers)
    stats = outcome.stats
    any_certificate = any(r.certificate for r in outcome.results)

    machine = args.format == "json" and not args.output
    if not machine:
        _echo(f"instance: {args.instance} n={inst.n_vars} m={inst.n_clauses} r={_g9(inst.ratio)}")
        _echo_solver_config(cfg, args.restarts)
        if outcome.solved:
            w = outcome.winner
            print("Solved")
            print("z: " + " ".join(str(int(b)) for b in w.rounded))
            print(
                f"runs: {stats.runs_attempted}  iterations: {w.iterations}  "
                f"certificate: {str(w.certificate).lower()}  q_hat: {_g9(stats.q_hat)}"
            )
        else:
            print("Failed")
            ns = "n/a" if stats.n_s_hat is None else _g9(stats.n_s_hat)
            sd = "n/a" if stats.sigma_hat is None else _g9(stats.sigma_hat)
            print(
                f"runs: {stats.runs_attempted}  successes: {stats.successes}  "
                f"q_hat: {_g9(stats.q_hat)}  n_s_hat: {ns}  sigma_hat: {sd}"
            )
            rule = stopping_rule(args.assume_q, args.chebyshev_k)
            print(
                f"stopping rule: assuming q >= {_g9(args.assume_q)} (k={_g9(args.chebyshev_k)}), "
                f"{rule.required_runs} runs bound the failure probability by "
                f"{_g9(rule.failure_prob_bound)}; attempted {stats.runs_attempted}"
            )
            if any_certificate:
                print("certificate: an interior iterate had F < 1 — the instance is satisfiable")

    if args.trace:
        index = outcome.winner_index if outcome.solved else 0
        rerun = rerun_with_trajectory(f, cfg, index)
        with open(args.trace, "w") as fh:
            write_trajectory_csv(rerun.trajectory, fh)
        if not machine:
            _echo(f"trace of run {index}: {args.trace}")

    if args.format == "json" or args.output:
        w = outcome.winner
        doc = {
            "schema": 1,
            "command": "solve",
            "instance": _instance_dict(inst, args.instance),
            "config": _config_dict(cfg, args.restarts),
            "result": {
                "solved": outcome.solved,
                "status": w.status if w else None,
                "assignment": [int(b) for b in w.rounded] if w else None,
                "winner_index": outcome.winner_index,
                "iterations": w.iterations if w else None,
                "final_cost": w.final_cost if w else None,
                "vertex_cost": w.vertex_cost if w else None,
                "certificate": any_certificate,
                "stats": {
                    "runs_attempted": stats.runs_attempted,
                    "successes": stats.successes,
                    "q_hat": stats.q_hat,
                    "n_s_hat": stats.n_s_hat,
                    "sigma_hat": stats.sigma_hat,
                },
            },
        }
        _write_output(args, dumps17(doc))
    return 0 if outcome.solved else 1


def cmd_oracle(args) -> int:
    inst = _read_instance(args.instance)
    res = brute_force_oracle(inst, cap=args.cap)
    machine = args.format == "json" and not args.output
    if not machine:
        _echo(f"instance: {args.instance} n={inst.n_vars} m={inst.n_clauses} r={_g9(inst.ratio)}")
        _echo(f"oracle: cap={args.cap} enumerated={2 ** inst.n_vars}")
        if res.satisfiable:
            print("SAT")
            print("z: " + " ".join(str(int(b)) for b in res.witness))
            print(f"solutions: {res.n_solutions}")
        else:
            print("UNSAT")
    if args.format == "json" or args.output:
        doc = {
            "schema": 1,
            "command": "oracle",
            "instance": _instance_dict(inst, args.instance),
            "result": {
                "satisfiable": res.satisfiable,
                "witness": [int(b) for b in res.witness] if res.witness is not None else None,
                "n_solutions": res.n_solutions,
            },
        }
        _write_output(args, dumps17(doc))
    return 0 if res.satisfiable else 1


def cmd_verify(args) -> int:
    inst = _read_instance(args.instance)
    with open(args.assignment) as fh:
        z = parse_assignment(fh.read(), inst.n_vars)
    res = check_assignment(inst, z)
    _echo(f"instance: {args.instance} n={inst.n_vars} m={inst.n_clauses}")
    _echo(f"assignment: {args.assignment}")
    if res.satisfied:
        print("satisfied")
        return 0
    print(f"unsatisfied clauses: {res.unsatisfied_count} of {inst.n_clauses}")
    return 1


def _ratio_grid(r_from: float, r_to: float, step: float):
    if step <= 0:
        raise ValueError("step must be positive")
    if r_to < r_from:
        raise ValueError("empty ratio grid (r-to below r-from)")
    count = math.floor((r_to - r_from) / step + 0.5) + 1
    return [round(r_from + i * step, 10) for i in range(count)]


def cmd_sweep(args) -> int:
    cfg = _solver_config(args)
    grid = _ratio_grid(args.r_from, args.r_to, args.step)
    report = phase_sweep(
        args.n_vars,
        grid,
        args.per_r,
        cfg,
        args.budget,
        args.seed,
        workers=args.workers,
        use_oracle=args.oracle,
        oracle_cap=args.cap,
    )
    machine = args.format == "json" and not args.output
    if not machine:
        _echo(
            f"sweep: n={args.n_vars} r={_g9(args.r_from)}..{_g9(args.r_to)} step={_g9(args.step)} "
            f"per-r={args.per_r} budget={args.budget} oracle={str(args.oracle).lower()}"
        )
        _echo_solver_config(cfg, args.budget)
    rstar = r_star_estimate(report)
    if args.format == "json":
        doc = {
            "schema": 1,
            "command": "sweep",
            "config": {
                "n_vars": args.n_vars,
                "r_grid": grid,
                "instances_per_r": args.per_r,
                "run_budget": args.budget,
                "base_seed": args.seed,
                "oracle": args.oracle,
                "oracle_cap": args.cap,
                **_config_dict(cfg, args.budget),
            },
            "rows": [
                {
                    "r": row.r,
                    "M": row.n_clauses,
                    "N": row.n_vars,
                    "instances": row.instances,
                    "solver_success_frac": row.solver_success_frac,
                    "oracle_sat_frac": row.oracle_sat_frac,
                    "mean_runs_to_success": row.mean_runs_to_success,
                    "flow_counts": row.flow_counts,
                }
                for row in report.rows
            ],
            "r_star": rstar,
        }
        _write_output(args, dumps17(doc))
    else:
        buf = io.StringIO()
        write_sweep_csv(report, buf)
        _write_output(args, buf.getvalue())
    if not machine:
        if args.output:
            _echo(f"wrote {args.output}")
        if rstar is not None:
            _echo(f"r_star = {_g9(rstar)}")
    return 0


def cmd_trace(args) -> int:
    inst = _read_instance(args.instance)
    cfg = _solver_config(args)
    f = CostFunction.from_instance(inst)
    outcome = solve_with_restarts(f, cfg, args.restarts, workers=args.workers)
    index = outcome.winner_index if outcome.solved else 0
    rerun = rerun_with_trajectory(f, cfg, index)
    labels = classify_flows(rerun.trajectory)

    machine = args.format == "json" and not args.output
    if not machine:
        _echo(f"instance: {args.instance} n={inst.n_vars} m={inst.n_clauses} r={_g9(inst.ratio)}")
        _echo_solver_config(cfg, args.restarts)
        _echo(f"traced run: {index} status: {rerun.status} iterations: {rerun.iterations}")
        pops = {}
        for lbl in labels:
            pops[lbl] = pops.get(lbl, 0) + 1
        print("flow families: " + "  ".join(f"{k}={v}" for k, v in sorted(pops.items())))

    if args.format == "json":
        doc = {
            "schema": 1,
            "command": "trace",
            "instance": _instance_dict(inst, args.instance),
            "config": _config_dict(cfg, args.restarts),
            "run": {
                "index": index,
                "status": rerun.status,
                "iterations": rerun.iterations,
                "certificate": rerun.certificate,
                "final_cost": rerun.final_cost,
                "vertex_cost": rerun.vertex_cost,
            },
            "trajectory": {
                "iterations": [int(i) for i in rerun.trajectory.iterations],
                "F": list(rerun.trajectory.costs),
                "snapshots": [list(row) for row in rerun.trajectory.snapshots],
            },
            "labels": [
                {"var": i + 1, "C_k": int(d), "label": str(lbl)}
                for i, (d, lbl) in enumerate(zip(inst.clause_degree, labels))
            ],
        }
        _write_output(args, dumps17(doc))
    else:
        if not args.output:
            raise ValueError("trace in csv format needs --output (two files are written)")
        base = args.output[:-4] if args.output.endswith(".csv") else args.output
        labels_path = base + ".labels.csv"
        with open(args.output, "w") as fh:
            write_trajectory_csv(rerun.trajectory, fh)
        with open(labels_path, "w") as fh:
            write_labels_csv(labels, inst.clause_degree, fh)
        if not machine:
            _echo(f"wrote {args.output} and {labels_path}")
    return 0 if outcome.solved else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ec3",
        description="Solve and study positive 1-in-3 SAT via gradient descent "
        "on a harmonic cost function.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solver_p = argparse.ArgumentParser(add_help=False)
    solver_p.add_argument("--eta", type=float, default=0.005, help="gradient step size")
    solver_p.add_argument("--radius", type=float, default=0.05, help="start sphere radius")
    solver_p.add_argument("--max-iters", type=int, default=1_000_000)
    solver_p.add_argument("--tol", type=float, default=1e-12, help="fixed-point displacement tolerance")
    solver_p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    solver_p.add_argument("--restarts", type=int, default=10, help="maximum runs")
    solver_p.add_argument(
        "--workers",
        type=int,
        default=os.cpu_count() or 1,
        help="worker processes (results are identical for any value)",
    )
    solver_p.add_argument("--record-every", type=int, default=10, help="trajectory stride")

    out_p = argparse.ArgumentParser(add_help=False)
    out_p.add_argument("-o", "--output", help="output file path")

    def add_format(sp, default):
        # per-subparser, NOT on out_p: parents= shares action objects, and
        # set_defaults would overwrite the shared default across commands
        sp.add_argument(
            "--format", choices=("csv", "json"), default=default, help="machine output format"
        )

    g = sub.add_parser("generate", parents=[out_p], help="write a random instance")
    g.add_argument("-n", "--n-vars", type=int, required=True)
    g.add_argument("-m", "--n-clauses", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    add_format(g, "csv")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[solver_p, out_p], help="multi-restart descent")
    s.add_argument("instance")
    s.add_argument("--trace", help="also write the solved run's trajectory CSV here")
    s.add_argument("--assume-q", type=float, default=0.25, help="assumed per-run success probability for the stopping rule")
    s.add_argument("--chebyshev-k", type=float, default=11.0, help="confidence parameter k of the stopping rule")
    add_format(s, "json")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", parents=[out_p], help="exact enumeration (small N)")
    o.add_argument("instance")
    o.add_argument("--cap", type=int, default=ORACLE_CAP, help="largest admissible N")
    add_format(o, "json")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="check an assignment file against an instance")
    v.add_argument("instance")
    v.add_argument("assignment")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", parents=[solver_p, out_p], help="ratio sweep")
    w.add_argument("-n", "--n-vars", type=int, required=True)
    w.add_argument("--r-from", type=float, required=True)
    w.add_argument("--r-to", type=float, required=True)
    w.add_argument("--step", type=float, default=0.05)
    w.add_argument("--per-r", type=int, default=50, help="instances per grid point")
    w.add_argument("--budget", type=int, default=5, help="runs per instance")
    w.add_argument("--oracle", action="store_true", help="record exact satisfiability (N <= cap)")
    w.add_argument("--cap", type=int, default=ORACLE_CAP)
    add_format(w, "csv")
    w.set_defaults(func=cmd_sweep)

    t = sub.add_parser("trace", parents=[solver_p, out_p], help="solve, then record and classify the winning run")
    t.add_argument("instance")
    add_format(t, "csv")
    t.set_defaults(func=cmd_trace)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse handles usage errors (2) and --help (0)
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
