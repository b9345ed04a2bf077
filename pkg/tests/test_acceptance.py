"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
go by. Criterion 9 is informational only: it reports against the
published reference number when the real dataset is supplied and skips
otherwise.
"""

import os
import time

import numpy as np
import pytest

import opinionet as on


def report(num, name, ok, detail=""):
    line = f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def mixed_graph(n, seed):
    p = {10: 0.3, 100: 0.05, 1000: 0.005}[n]
    return on.gen_synthetic(n, p, 0.3, seed=seed)


def test_criterion_01_equilibrium_correctness():
    alphas = (0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0)
    cases = [(10, s) for s in range(20)] + [(100, s) for s in range(20)] \
        + [(1000, s) for s in range(10)]
    assert len(cases) == 50
    t0 = time.perf_counter()
    worst_gap = 0.0
    worst_resid = 0.0
    for k, (n, seed) in enumerate(cases):
        g = mixed_graph(n, seed)
        system = on.OpinionSystem(g, on.confidence_fixed(g.n, alphas[k % 4]))
        s = on.init_opinions(g, "uniform", seed)
        direct = on.equilibrium_direct(system, s)
        sweeps = on.equilibrium_iterative(system, s, tol=1e-12)
        worst_gap = max(worst_gap, float(np.abs(direct.z_star - sweeps.z_star).max()))
        worst_resid = max(worst_resid, direct.residual, sweeps.residual)
    elapsed = time.perf_counter() - t0
    ok = worst_gap <= 1e-8 and worst_resid <= 1e-10 and elapsed < 5.0
    report(1, "equilibrium correctness", ok,
           f"gap={worst_gap:.2e} resid={worst_resid:.2e} time={elapsed:.2f}s")


def test_criterion_02_nash_property():
    worst_drop = 0.0
    for seed in range(20):
        g = on.gen_synthetic(40, 0.12, 0.4, seed=seed)
        system = on.OpinionSystem(g, on.confidence_fixed(g.n, 0.5))
        s = on.init_opinions(g, "uniform", seed)
        z = on.equilibrium_direct(system, s).z_star
        for i in range(g.n):
            base = on.node_cost(i, z, s, system)
            for delta in (1e-4, -1e-4):
                zp = z.copy()
                zp[i] += delta
                worst_drop = max(worst_drop, base - on.node_cost(i, zp, s, system))
    ok = worst_drop <= 1e-8
    report(2, "Nash property under unilateral perturbation", ok,
           f"worst cost drop={worst_drop:.2e}")


def test_criterion_03_contribution_identity():
    worst = 0.0
    specs = [(50, 0.1, "fixed:0.5"), (100, 0.05, "fixed:0.25"),
             (100, 0.05, "adjusted:0.5"), (200, 0.03, "fixed:0.6666666666666666"),
             (200, 0.03, "adjusted:0.5")]
    for k, (n, p, mode) in enumerate(specs):
        g = on.gen_synthetic(n, p, 0.4, seed=300 + k)
        conf = on.confidence_from_spec(g, mode)
        system = on.OpinionSystem(g, conf)
        gvec = on.contribution_index(system)
        rng = np.random.default_rng(300 + k)
        for _ in range(100):
            s = rng.uniform(-1, 1, g.n)
            p_star = on.overall_opinion(on.equilibrium_direct(system, s).z_star)
            worst = max(worst, abs(float(gvec @ s) - p_star))
    ok = worst <= 1e-10
    report(3, "contribution identity g.s == p(z*)", ok, f"worst gap={worst:.2e}")


def test_criterion_04_greedy_optimality():
    rng = np.random.default_rng(4)
    worst_gap = 0.0
    search_margin = -np.inf
    for _ in range(200):
        n = int(rng.integers(2, 9))
        g = on.gen_synthetic(n, 0.5, 0.5, seed=int(rng.integers(1 << 30)))
        system = on.OpinionSystem(g, on.confidence_fixed(g.n, 0.5))
        gvec = on.contribution_index(system)
        s = rng.uniform(-1, 1, n)
        mu = float(rng.uniform(0.0, 2.0 * n))

        best = on.benefit(gvec, on.greedy_allocate(gvec, s, mu))
        _, lam_plan = on.calibrate_lambda(gvec, s, mu)
        worst_gap = max(worst_gap, abs(best - on.benefit(gvec, lam_plan)))

        lower, upper = -1.0 - s, 1.0 - s
        draws = rng.uniform(lower, upper, size=(100000, n))
        l1 = np.abs(draws).sum(axis=1)
        draws *= np.minimum(1.0, mu / np.maximum(l1, 1e-300))[:, None]
        sampled = float((draws @ gvec).max())
        search_margin = max(search_margin, sampled - best)
    ok = worst_gap <= 1e-9 and search_margin <= 1e-9
    report(4, "greedy optimality vs lambda-path and random search", ok,
           f"path gap={worst_gap:.2e} best sample excess={search_margin:.2e}")


def lambda_in_widest_gap(gvec):
    """Penalty weight well separated from every |g_i|: the midpoint of the
    widest gap in the sorted magnitudes. At |g_i| == lam the solution set
    is flat and any first-order method crawls, so tie-adjacent weights
    are excluded by construction."""
    mags = np.unique(np.concatenate(([0.0], np.abs(gvec))))
    gaps = np.diff(mags)
    k = int(np.argmax(gaps))
    return float(0.5 * (mags[k] + mags[k + 1]))


def test_criterion_05_admm_equivalence():
    sizes = (20, 50, 100, 200)
    rng = np.random.default_rng(5)
    worst_rel = 0.0
    worst_obj = 0.0
    worst_resid = 0.0
    max_iters = 0
    for k in range(50):
        n = sizes[k % 4]
        g = on.gen_synthetic(n, min(0.5, 8.0 / n), 0.4, seed=500 + k)
        system = on.OpinionSystem(g, on.confidence_fixed(g.n, 0.5))
        gvec = on.contribution_index(system)
        s = on.init_opinions(g, "uniform", k)
        mu = float(rng.uniform(0.5, n / 4.0))

        greedy_benefit = on.benefit(gvec, on.greedy_allocate(gvec, s, mu))
        _, plan = on.calibrate_lambda(gvec, s, mu)
        rel = abs(on.benefit(gvec, plan) - greedy_benefit) / max(1.0, abs(greedy_benefit))
        worst_rel = max(worst_rel, rel)

        lam = lambda_in_widest_gap(gvec)
        admm_plan, state = on.admm_solve(gvec, s, lam, rho=1.0, max_iter=5000)
        obj_gap = abs(on.objective_value(gvec, lam, admm_plan.delta_s)
                      - on.objective_value(gvec, lam, on.coordinate_oracle(gvec, s, lam)))
        worst_obj = max(worst_obj, obj_gap)
        worst_resid = max(worst_resid, state.primal_residual, state.dual_residual)
        max_iters = max(max_iters, state.iterations)
    ok = worst_rel <= 1e-6 and worst_obj <= 1e-6 and worst_resid < 1e-6 and max_iters <= 5000
    report(5, "ADMM equivalence (calibrated and fixed-lambda)", ok,
           f"rel={worst_rel:.2e} obj gap={worst_obj:.2e} resid={worst_resid:.2e} "
           f"iters<={max_iters}")


def test_criterion_06_model_reduction():
    worst_omstn = 0.0
    worst_fj = 0.0
    for seed in range(6):
        g = on.gen_synthetic(80, 0.08, 0.5, seed=600 + seed)
        s = on.init_opinions(g, "uniform", seed)
        worst_omstn = max(worst_omstn, on.compare_models(g, s, alpha0=0.5))
    for seed in range(6):
        g = on.gen_synthetic(80, 0.08, 0.0, seed=650 + seed)
        s = on.init_opinions(g, "uniform", seed)
        worst_omstn = max(worst_omstn, on.compare_models(g, s, alpha0=0.5))
        system = on.OpinionSystem(g, on.confidence_fixed(g.n, 0.5))
        z = on.equilibrium_direct(system, s).z_star
        fj = on.friedkin_johnsen_fixed_point(g, s, tol=1e-13)
        worst_fj = max(worst_fj, float(np.abs(z - fj).max()))
    ok = worst_omstn <= 1e-8 and worst_fj <= 1e-8
    report(6, "reduction to predecessor fixed points at alpha=1/2", ok,
           f"omstn gap={worst_omstn:.2e} fj gap={worst_fj:.2e}")


def test_criterion_07_fixed_alpha_sweep_direction():
    n, mu = 500, 50.0
    violations = []
    for gseed in range(20):
        g = on.gen_synthetic(n, 0.02, 0.0, seed=700 + gseed)
        means = []
        for a0 in (2.0 / 3.0, 0.5, 1.0 / 3.0):
            system = on.OpinionSystem(g, on.confidence_fixed(g.n, a0))
            gvec = on.contribution_index(system)
            bens = [on.benefit(gvec, on.greedy_allocate(gvec, on.init_opinions(g, "uniform", s), mu))
                    for s in range(10)]
            means.append(float(np.mean(bens)))
        if not (means[0] < means[1] < means[2]):
            violations.append((gseed, means))
    ok = not violations
    report(7, "benefit strictly grows as fixed alpha drops (2/3 -> 1/3)", ok,
           f"violations={len(violations)}/20 graphs")


def test_criterion_08_greedy_dominates_every_cell():
    violations = 0
    cells = 0
    for gseed in range(5):
        cfg = on.ExperimentConfig(
            synthetic=on.SyntheticSpec(n=60, p=0.08, nu=0.3, seed=800 + gseed),
            seeds=tuple(range(5)),
            alpha_modes=("fixed:0.5",) if gseed % 2 else ("adjusted:0.5",),
            methods=("greedy", "rand", "trust", "io"),
            budgets=(1.0, 5.0, 15.0),
        )
        report_ = on.run_experiment(cfg)
        by_cell = {(r.seed, r.method, r.budget): r.benefit for r in report_.rows}
        for seed in range(5):
            for mu in (1.0, 5.0, 15.0):
                for baseline in ("rand", "trust", "io"):
                    cells += 1
                    if by_cell[(seed, "greedy", mu)] < by_cell[(seed, baseline, mu)] - 1e-9:
                        violations += 1
    ok = violations == 0
    report(8, "greedy dominates every baseline cell", ok,
           f"{violations} violations over {cells} cells")


def test_criterion_09_reference_dataset_reproduction():
    path = os.environ.get("OPINIONET_ALPHA_CSV", "data/soc-sign-bitcoinalpha.csv")
    if not os.path.exists(path):
        print("[criterion 09] reference-dataset reproduction: SKIP "
              "(dataset not supplied; set OPINIONET_ALPHA_CSV)")
        pytest.skip("reference dataset not supplied")
    fmt = on.EdgeListFormat(timestamp_col=3)
    graph = on.load_graph_file(path, fmt, normalize="const:10", dedupe="keeplast")
    conf = on.confidence_from_spec(graph, "adjusted:0.5")
    system = on.OpinionSystem(graph, conf)
    gvec = on.contribution_index(system)
    benefits = []
    for seed in range(10):
        s = on.init_opinions(graph, "uniform", seed)
        benefits.append(on.benefit(gvec, on.greedy_allocate(gvec, s, 200.0)))
    mean = float(np.mean(benefits))
    reference = 463.0
    within = abs(mean - reference) <= 0.2 * reference
    # informational: deviations are logged, never failed (unpublished
    # seeds and dataset snapshot make exact reproduction impossible)
    print(f"[criterion 09] reference-dataset reproduction: INFO "
          f"(mean benefit={mean:.1f}, reference={reference}, "
          f"within +/-20%: {within})")


def test_criterion_10_determinism(tmp_path):
    cfg = on.ExperimentConfig(
        synthetic=on.SyntheticSpec(n=50, p=0.1, nu=0.3, seed=10),
        seeds=(0, 1, 2),
        alpha_modes=("fixed:0.5", "adjusted:0.5"),
        methods=("greedy", "rand", "admm"),
        budgets=(1.0, 3.0),
    )
    p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    on.run_experiment(cfg).write_csv(p1)
    on.run_experiment(cfg).write_csv(p2)
    ok = p1.read_bytes() == p2.read_bytes()
    report(10, "experiment rerun emits byte-identical CSV", ok,
           f"{p1.stat().st_size} bytes compared")
