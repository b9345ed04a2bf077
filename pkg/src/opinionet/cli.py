"""Command-line interface.

Subcommands: solve, maximize, compare, sweep, gen, validate. Outputs are
CSV with fixed headers; failures exit nonzero after printing one
machine-readable JSON error line to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .admm import admm_solve, calibrate_lambda
from .allocate import baseline_allocate, benefit, greedy_allocate, rank_nodes
from .confidence import DEFAULT_DAMPING, confidence_fixed, confidence_from_spec
from .dynamics import (OpinionSystem, contribution_index, equilibrium_direct,
                       equilibrium_iterative, friedkin_johnsen_fixed_point,
                       overall_opinion)
from .errors import OpinionetError
from .experiment import (SyntheticSpec, compare_models, load_config,
                         parse_budgets, run_experiment)
from .graph import validate as validate_graph
from .ingest import (EdgeListFormat, gen_synthetic, init_opinions,
                     load_graph_file, write_edge_list)


def _fmt(x):
    return repr(float(x))


def _add_graph_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge-list file path")
    src.add_argument("--synthetic", help="generator spec: n=..,p=..[,nu=..][,seed=..][,dist=..]")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--columns", default="0,1,2",
                   help="column indices src,dst,weight[,timestamp]")
    p.add_argument("--header", action="store_true", help="skip the first data line")
    p.add_argument("--comment", default="#")
    p.add_argument("--normalize", default="identity",
                   help="weight normalization: maxabs | const:<c> | identity")
    p.add_argument("--dedupe", default="keeplast",
                   help="duplicate-pair policy: keeplast | keepfirst | mean")


def _add_model_args(p):
    p.add_argument("--alpha", default="fixed:0.5",
                   help="confidence mode: fixed:<v> or adjusted:<q>")
    p.add_argument("--damping", type=float, default=DEFAULT_DAMPING)
    p.add_argument("--pr-tol", type=float, default=1e-12)
    p.add_argument("--init", default="uniform", help="uniform | normal | degree")
    p.add_argument("--seed", type=int, default=0)


def _load_graph(args):
    if args.synthetic:
        return SyntheticSpec.from_string(args.synthetic).build()
    cols = tuple(int(c) for c in args.columns.split(","))
    fmt = EdgeListFormat(delimiter=args.delimiter, src_col=cols[0], dst_col=cols[1],
                         weight_col=cols[2], timestamp_col=cols[3] if len(cols) > 3 else None,
                         header=args.header, comment=args.comment)
    return load_graph_file(args.graph, fmt, normalize=args.normalize, dedupe=args.dedupe)


def _emit(lines, output):
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args):
    graph = _load_graph(args)
    conf = confidence_from_spec(graph, args.alpha, damping=args.damping, pr_tol=args.pr_tol)
    system = OpinionSystem(graph, conf)
    s = init_opinions(graph, args.init, args.seed)
    if args.solver == "direct":
        result = equilibrium_direct(system, s)
    else:
        result = equilibrium_iterative(system, s, tol=args.tol)
    g = contribution_index(system)

    lines = ["node_label,s,z_star,alpha,g"]
    for i in range(graph.n):
        lines.append(",".join([graph.labels[i], _fmt(s[i]), _fmt(result.z_star[i]),
                               _fmt(conf.alpha[i]), _fmt(g[i])]))
    lines.append(f"# overall_opinion={_fmt(overall_opinion(result.z_star))}"
                 f" residual={_fmt(result.residual)} iterations={result.iterations}")
    _emit(lines, args.output)
    return 0


def cmd_maximize(args):
    graph = _load_graph(args)
    conf = confidence_from_spec(graph, args.alpha, damping=args.damping, pr_tol=args.pr_tol)
    system = OpinionSystem(graph, conf)
    s = init_opinions(graph, args.init, args.seed)
    g = contribution_index(system)
    g_eff = g if args.objective == "max" else -g

    state = None
    lam = None
    if args.method == "greedy":
        plan = greedy_allocate(g, s, args.budget, objective=args.objective)
    elif args.method == "admm":
        if args.admm_lambda is not None:
            plan, state = admm_solve(g_eff, s, args.admm_lambda, rho=args.rho,
                                     tol_abs=args.admm_tol, tol_rel=args.admm_tol,
                                     max_iter=args.admm_max_iter,
                                     trace=args.trace is not None)
            lam = args.admm_lambda
        else:
            if args.budget is None:
                raise OpinionetError("--method admm needs --budget or --lambda")
            lam, plan = calibrate_lambda(g_eff, s, args.budget)
    else:
        if args.budget is None:
            raise OpinionetError(f"--method {args.method} needs --budget")
        direction = 1.0 if args.objective == "max" else -1.0
        ordering = rank_nodes(graph, s, args.method, seed=args.seed)
        plan = baseline_allocate(ordering, s, args.budget, method=args.method,
                                 direction=direction)

    p_before = overall_opinion(equilibrium_direct(system, s).z_star)
    p_after = overall_opinion(equilibrium_direct(system, s + plan.delta_s).z_star)

    lines = ["node_label,delta_s"]
    for i, amount in plan.touched:
        lines.append(f"{graph.labels[i]},{_fmt(amount)}")
    summary = (f"# method={plan.method} objective={args.objective}"
               f" spent={_fmt(plan.spent)} benefit={_fmt(benefit(g, plan))}"
               f" p_before={_fmt(p_before)} p_after={_fmt(p_after)}")
    if lam is not None:
        summary += f" lambda={_fmt(lam)}"
    if state is not None:
        summary += (f" admm_iterations={state.iterations}"
                    f" primal_residual={_fmt(state.primal_residual)}"
                    f" dual_residual={_fmt(state.dual_residual)}")
    lines.append(summary)
    _emit(lines, args.output)

    if args.trace and state is not None:
        trace_lines = ["k,primal_residual,dual_residual,objective"]
        for k in range(state.iterations):
            trace_lines.append(",".join([str(k + 1), _fmt(state.primal_history[k]),
                                         _fmt(state.dual_history[k]),
                                         _fmt(state.objective_history[k])]))
        _emit(trace_lines, args.trace)
    return 0


def cmd_compare(args):
    graph = _load_graph(args)
    s = init_opinions(graph, args.init, args.seed)
    deviation = compare_models(graph, s, alpha0=args.alpha0)
    lines = ["metric,value", f"omstn_deviation,{_fmt(deviation)}"]
    if graph.succ_wt.size == 0 or graph.succ_wt.min() > 0.0:
        system = OpinionSystem(graph, confidence_fixed(graph.n, 0.5))
        z = equilibrium_direct(system, s).z_star
        fj = friedkin_johnsen_fixed_point(graph, s)
        gap = float(np.abs(z - fj).max()) if z.size else 0.0
        lines.append(f"friedkin_johnsen_deviation,{_fmt(gap)}")
    _emit(lines, args.output)
    return 0


def cmd_sweep(args):
    overrides = {}
    if args.methods:
        overrides["methods"] = tuple(m.strip() for m in args.methods.split(","))
    if args.budgets:
        overrides["budgets"] = parse_budgets(args.budgets)
    if args.seeds:
        overrides["seeds"] = tuple(int(v) for v in args.seeds.split(","))
    if args.alpha_modes:
        overrides["alpha_modes"] = tuple(v.strip() for v in args.alpha_modes.split(","))
    if args.init:
        overrides["init"] = args.init
    if args.objective:
        overrides["objective"] = args.objective
    if args.source:
        if args.source.startswith("synthetic:"):
            overrides["graph_path"] = None
            overrides["synthetic"] = SyntheticSpec.from_string(args.source.split(":", 1)[1])
        else:
            overrides["graph_path"] = args.source
            overrides["synthetic"] = None
    for key in ("normalize", "dedupe", "delimiter", "comment"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.columns:
        overrides["columns"] = tuple(int(c) for c in args.columns.split(","))
    if args.header:
        overrides["header"] = True
    if args.damping is not None:
        overrides["damping"] = args.damping
    if args.pr_tol is not None:
        overrides["pr_tol"] = args.pr_tol
    cfg = load_config(args.config, overrides)
    report = run_experiment(cfg)
    report.write_csv(args.output, timing_path=args.timing_output)
    sys.stdout.write(f"fingerprint={report.fingerprint} rows={len(report.rows)} "
                     f"output={args.output}\n")
    return 0


def cmd_gen(args):
    graph = gen_synthetic(args.n, args.p, args.nu, args.weight_dist, args.seed)
    write_edge_list(graph, args.output)
    diag = validate_graph(graph)
    sys.stdout.write(f"nodes={diag.n_nodes} edges={diag.n_edges} output={args.output}\n")
    return 0


def cmd_validate(args):
    graph = _load_graph(args)
    diag = validate_graph(graph)
    lines = ["field,value",
             f"n_nodes,{diag.n_nodes}",
             f"n_edges,{diag.n_edges}",
             f"weight_min,{'' if diag.weight_min is None else _fmt(diag.weight_min)}",
             f"weight_max,{'' if diag.weight_max is None else _fmt(diag.weight_max)}",
             f"n_sinks,{diag.n_sinks}",
             f"n_isolated,{diag.n_isolated}",
             f"dropped_self_loops,{diag.dropped_self_loops}"]
    _emit(lines, args.output)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="opinionet",
        description="Expressed-opinion equilibria and budgeted opinion "
                    "maximization on signed trust networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="equilibrium opinions, overall opinion, contributions")
    _add_graph_args(p)
    _add_model_args(p)
    p.add_argument("--solver", choices=("direct", "sweeps"), default="direct")
    p.add_argument("--tol", type=float, default=1e-12, help="sweep stop tolerance")
    p.add_argument("--output", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("maximize", help="allocate a budget over internal opinions")
    _add_graph_args(p)
    _add_model_args(p)
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--method", choices=("greedy", "rand", "trust", "io", "admm"),
                   default="greedy")
    p.add_argument("--objective", choices=("max", "min"), default="max")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--lambda", dest="admm_lambda", type=float, default=None,
                   help="fixed L1 weight (ADMM only; otherwise calibrated from --budget)")
    p.add_argument("--admm-tol", type=float, default=1e-8)
    p.add_argument("--admm-max-iter", type=int, default=5000)
    p.add_argument("--trace", help="CSV path for the ADMM iteration trace")
    p.add_argument("--output", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("compare", help="gap to the predecessor fixed-point models")
    _add_graph_args(p)
    p.add_argument("--init", default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha0", type=float, default=0.5)
    p.add_argument("--output", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="run an experiment grid from a config file")
    p.add_argument("--config", required=True, help="INI experiment config")
    p.add_argument("--output", required=True, help="report CSV path")
    p.add_argument("--timing-output", default=None,
                   help="timing sidecar path (default: <output>.timing.csv)")
    p.add_argument("--methods", help="override: comma-separated method list")
    p.add_argument("--budgets", help="override: comma list or range:start:stop:step")
    p.add_argument("--seeds", help="override: comma-separated seed list")
    p.add_argument("--alpha-modes", help="override: comma-separated confidence modes")
    p.add_argument("--init", help="override: init scheme")
    p.add_argument("--objective", choices=("max", "min"), help="override objective")
    p.add_argument("--source", help="override: graph file path or synthetic:<spec>")
    p.add_argument("--normalize", help="override: weight normalization scheme")
    p.add_argument("--dedupe", help="override: duplicate-pair policy")
    p.add_argument("--delimiter", help="override: edge-list delimiter")
    p.add_argument("--columns", help="override: column indices")
    p.add_argument("--comment", help="override: comment prefix")
    p.add_argument("--header", action="store_true", help="override: skip header line")
    p.add_argument("--damping", type=float, help="override: PageRank damping")
    p.add_argument("--pr-tol", type=float, help="override: PageRank tolerance")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="generate a synthetic signed edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True, help="edge probability")
    p.add_argument("--nu", type=float, default=0.0, help="negative-sign probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-dist", default="uniform", help="uniform | const:<v>")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="graph diagnostics")
    _add_graph_args(p)
    p.add_argument("--output", help="CSV path (stdout when omitted)")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OpinionetError, OSError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
