#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot loops (equilibrium sweeps, PageRank power iteration,
ADMM) on one synthetic instance per size, best-of-N wall time, and checks
the backends agree on the answers while racing.

Usage:
    python benchmarks/bench_kernels.py [--n 2000] [--density 0.002] [--repeats 5]
"""

import argparse
import time

import numpy as np

from opinionet import OpinionSystem, confidence_fixed, gen_synthetic, init_opinions
from opinionet.kernels import available_backends


def best_of(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def build_cases(n, density, seed=0):
    g = gen_synthetic(n, density, 0.3, seed=seed)
    system = OpinionSystem(g, confidence_fixed(g.n, 0.5))
    s = init_opinions(g, "uniform", seed)

    out_deg = g.out_degrees()
    dangling = np.nonzero(out_deg == 0)[0].astype(np.int64)
    inv_out = (1.0 / out_deg[g.pred_idx].astype(np.float64)
               if g.pred_idx.size else np.zeros(0))
    r0 = np.full(g.n, 1.0 / g.n)

    rng = np.random.default_rng(seed)
    obj = rng.normal(scale=2.0, size=n)
    box_s = rng.uniform(-1, 1, n)

    return {
        "jacobi": lambda impl: impl.jacobi_solve(
            g.succ_ptr, g.succ_idx, system.offdiag_coef, system.diag,
            system.rhs(s), s, 1e-12, 100000),
        "pagerank": lambda impl: impl.pagerank_iterate(
            g.pred_ptr, g.pred_idx, inv_out, dangling, 0.85, r0, 1e-12, 10000),
        "admm": lambda impl: impl.admm_iterate(
            obj, -1.0 - box_s, 1.0 - box_s, float(np.abs(obj).mean()),
            1.0, 1e-10, 1e-10, 5000),
    }, g.n_edges


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=2000, help="node count")
    parser.add_argument("--density", type=float, default=0.002, help="edge probability")
    parser.add_argument("--repeats", type=int, default=5, help="best-of-N timing")
    args = parser.parse_args()

    backends = available_backends()
    cases, n_edges = build_cases(args.n, args.density)
    print(f"n={args.n} edges={n_edges} repeats={args.repeats} "
          f"backends={sorted(backends)}")
    print(f"{'kernel':<10} {'backend':<10} {'seconds':>12} {'speedup':>9} {'max|diff|':>12}")

    for kernel, runner in cases.items():
        results = {}
        times = {}
        for name in sorted(backends):
            impl = backends[name]
            times[name], results[name] = best_of(lambda: runner(impl), args.repeats)
        base = times.get("python")
        for name in sorted(backends):
            speedup = f"{base / times[name]:8.2f}x" if base else "      n/a"
            diff = ""
            if name != "python" and "python" in results:
                mine = np.asarray(results[name][0])
                ref = np.asarray(results["python"][0])
                gap = float(np.abs(mine - ref).max()) if mine.size else 0.0
                diff = f"{gap:12.2e}"
            print(f"{kernel:<10} {name:<10} {times[name]:12.6f} {speedup:>9} {diff:>12}")


if __name__ == "__main__":
    main()
