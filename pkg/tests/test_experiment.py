import numpy as np
import pytest

from opinionet import (ConfigError, ExperimentConfig, SyntheticSpec,
                       compare_models, config_fingerprint, gen_synthetic,
                       init_opinions, load_config, run_experiment, sweep_budget)
from opinionet.experiment import parse_budgets


def small_config(**kw):
    defaults = dict(
        synthetic=SyntheticSpec(n=40, p=0.12, nu=0.3, seed=5),
        seeds=(0, 1, 2),
        alpha_modes=("fixed:0.5",),
        methods=("greedy", "rand"),
        budgets=(2.0,),
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


def test_config_requires_one_source():
    with pytest.raises(ConfigError):
        ExperimentConfig(graph_path=None, synthetic=None)
    with pytest.raises(ConfigError):
        ExperimentConfig(graph_path="x.csv", synthetic=SyntheticSpec(n=5, p=0.5))


def test_config_validation():
    with pytest.raises(ConfigError):
        small_config(methods=())
    with pytest.raises(ConfigError):
        small_config(methods=("gradient",))
    with pytest.raises(ConfigError):
        small_config(budgets=(-1.0,))
    with pytest.raises(ConfigError):
        small_config(seeds=())


def test_synthetic_spec_from_string():
    spec = SyntheticSpec.from_string("n=50,p=0.1,nu=0.2,seed=9")
    assert spec == SyntheticSpec(n=50, p=0.1, nu=0.2, seed=9)
    with pytest.raises(ConfigError):
        SyntheticSpec.from_string("p=0.1")


def test_fingerprint_stable_and_sensitive():
    a = small_config()
    b = small_config()
    c = small_config(budgets=(3.0,))
    assert config_fingerprint(a) == config_fingerprint(b)
    assert config_fingerprint(a) != config_fingerprint(c)
    assert len(config_fingerprint(a)) == 12


def test_parse_budgets():
    assert parse_budgets("1,2,4") == (1.0, 2.0, 4.0)
    assert parse_budgets("range:0:10:5") == (0.0, 5.0, 10.0)
    with pytest.raises(ConfigError):
        parse_budgets("range:0:10:0")


def test_run_experiment_rows_and_dominance():
    report = run_experiment(small_config(methods=("greedy", "rand", "trust", "io"),
                                         budgets=(1.0, 4.0)))
    # 3 seeds x 4 methods x 2 budgets
    assert len(report.rows) == 24
    by_cell = {(r.seed, r.method, r.budget): r.benefit for r in report.rows}
    for seed in (0, 1, 2):
        for mu in (1.0, 4.0):
            for baseline in ("rand", "trust", "io"):
                assert by_cell[(seed, "greedy", mu)] >= by_cell[(seed, baseline, mu)] - 1e-9


def test_run_experiment_benefit_consistency():
    report = run_experiment(small_config())
    for row in report.rows:
        assert row.benefit == pytest.approx(row.p_after - row.p_before, abs=1e-12)
        if row.budget > 0:
            assert row.unit_benefit == pytest.approx(row.benefit / row.budget)


def test_run_experiment_admm_matches_greedy():
    report = run_experiment(small_config(methods=("greedy", "admm"), seeds=(0, 1)))
    by_cell = {(r.seed, r.method): r.benefit for r in report.rows}
    for seed in (0, 1):
        assert by_cell[(seed, "admm")] == pytest.approx(by_cell[(seed, "greedy")], abs=1e-6)


def test_report_csv_deterministic(tmp_path):
    cfg = small_config()
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run_experiment(cfg).write_csv(p1)
    run_experiment(cfg).write_csv(p2)
    assert p1.read_bytes() == p2.read_bytes()
    # timing sidecars exist but are not part of the determinism contract
    assert (tmp_path / "a.csv.timing.csv").exists()


def test_report_aggregates_recomputable(tmp_path):
    report = run_experiment(small_config())
    for (alpha, method, budget), mean, std in report.aggregates():
        rows = [r for r in report.rows
                if (r.alpha, r.method, r.budget) == (alpha, method, budget)]
        vals = np.array([r.benefit for r in rows])
        assert mean["benefit"] == pytest.approx(vals.mean())
        assert std["benefit"] == pytest.approx(vals.std())


def test_sweep_budget_monotone_overall_opinion():
    cfg = small_config(methods=("greedy",), budgets=(1.0, 2.0, 4.0, 8.0), seeds=(0,))
    report = sweep_budget(cfg)
    p_after = [r.p_after for r in sorted(report.rows, key=lambda r: r.budget)]
    assert all(b >= a - 1e-9 for a, b in zip(p_after, p_after[1:]))
    unit = [r.unit_benefit for r in sorted(report.rows, key=lambda r: r.budget)]
    assert all(b <= a + 1e-9 for a, b in zip(unit, unit[1:]))


def test_sweep_budget_requires_increasing_grid():
    with pytest.raises(ConfigError):
        sweep_budget(small_config(budgets=(4.0, 1.0)))


def test_sweep_single_zero_budget():
    report = run_experiment(small_config(budgets=(0.0,), methods=("greedy",), seeds=(0,)))
    assert report.rows[0].benefit == pytest.approx(0.0, abs=1e-12)
    assert report.rows[0].unit_benefit == 0.0


def test_compare_models_consistency():
    for seed in range(3):
        g = gen_synthetic(50, 0.1, 0.4, seed=seed)
        s = init_opinions(g, "uniform", seed)
        assert compare_models(g, s) <= 1e-8


def test_compare_models_edgeless():
    from opinionet import build_graph
    g = build_graph([("a", "a", 1.0)])
    assert compare_models(g, np.array([0.3])) == pytest.approx(0.0, abs=1e-15)


def test_fixed_alpha_sweep_direction():
    # all-positive graph: lower confidence spreads influence further, so
    # the same budget buys more benefit
    cfg_base = dict(
        synthetic=SyntheticSpec(n=120, p=0.06, nu=0.0, seed=31),
        seeds=tuple(range(5)),
        methods=("greedy",),
        budgets=(12.0,),
    )
    means = []
    for mode in ("fixed:0.6666666666666666", "fixed:0.5", "fixed:0.3333333333333333"):
        report = run_experiment(ExperimentConfig(alpha_modes=(mode,), **cfg_base))
        means.append(report.mean_benefit())
    assert means[0] < means[1] < means[2]


def test_load_config_roundtrip(tmp_path):
    ini = tmp_path / "exp.ini"
    ini.write_text(
        "[graph]\n"
        "source = synthetic:n=40,p=0.12,nu=0.3,seed=5\n"
        "[init]\n"
        "scheme = uniform\n"
        "seeds = 0,1,2\n"
        "[alpha]\n"
        "modes = fixed:0.5\n"
        "[run]\n"
        "methods = greedy, rand\n"
        "budgets = 2\n"
    )
    cfg = load_config(ini)
    assert cfg == small_config()
    # CLI-style overrides replace fields
    cfg2 = load_config(ini, {"budgets": (3.0,)})
    assert cfg2.budgets == (3.0,)
    with pytest.raises(ConfigError):
        load_config(ini, {"nonsense": 1})


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


def test_ratings_file_pipeline(tmp_path):
    # raw -10..10 ratings with timestamps and repeated pairs, like the
    # real trust datasets this harness targets
    rng = np.random.default_rng(99)
    path = tmp_path / "ratings.csv"
    with open(path, "w") as fh:
        for k in range(400):
            src, dst = rng.integers(0, 40, size=2)
            if src == dst:
                continue
            rating = rng.integers(-10, 11)
            fh.write(f"u{src},u{dst},{rating},{1000 + k}\n")
    cfg = ExperimentConfig(
        graph_path=str(path),
        columns=(0, 1, 2, 3),
        normalize="const:10",
        dedupe="keeplast",
        seeds=(0, 1),
        alpha_modes=("adjusted:0.5",),
        methods=("greedy", "trust"),
        budgets=(5.0,),
    )
    report = run_experiment(cfg)
    assert len(report.rows) == 4
    by_cell = {(r.seed, r.method): r.benefit for r in report.rows}
    for seed in (0, 1):
        assert by_cell[(seed, "greedy")] >= by_cell[(seed, "trust")] - 1e-9
