import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opinionet import (ConfigError, admm_solve, benefit, calibrate_lambda,
                       coordinate_oracle, greedy_allocate, objective_value,
                       soft_threshold)

finite = st.floats(min_value=-100, max_value=100, allow_nan=False)


def test_soft_threshold_examples():
    assert soft_threshold(1.0, 0.3) == pytest.approx(0.7)
    assert soft_threshold(0.2, 0.3) == 0.0
    assert soft_threshold(-1.0, 0.3) == pytest.approx(-0.7)


def test_soft_threshold_rejects_negative_kappa():
    with pytest.raises(ConfigError):
        soft_threshold(1.0, -0.1)


@given(finite, finite, st.floats(min_value=0, max_value=50))
@settings(max_examples=100, deadline=None)
def test_soft_threshold_nonexpansive_and_odd(v1, v2, kappa):
    assert abs(soft_threshold(v1, kappa) - soft_threshold(v2, kappa)) <= abs(v1 - v2) + 1e-12
    assert soft_threshold(-v1, kappa) == pytest.approx(-soft_threshold(v1, kappa), abs=1e-12)


def test_coordinate_oracle_cases():
    g = np.array([2.0, -2.0, 0.5, 1.0])
    s = np.array([0.0, 0.0, 0.0, 1.0])
    delta = coordinate_oracle(g, s, 1.0)
    np.testing.assert_allclose(delta, [1.0, -1.0, 0.0, 0.0])
    # g_i == lam exactly -> dead zone
    np.testing.assert_allclose(coordinate_oracle(np.array([1.0]), np.zeros(1), 1.0), [0.0])
    # saturated node: s_i = 1 leaves zero headroom upward
    np.testing.assert_allclose(coordinate_oracle(np.array([5.0]), np.ones(1), 1.0), [0.0])


def random_instance(seed, n=30):
    rng = np.random.default_rng(seed)
    g = rng.normal(scale=2.0, size=n)
    s = rng.uniform(-1, 1, n)
    return g, s


def test_admm_matches_oracle_objective():
    for seed in range(20):
        g, s = random_instance(seed)
        lam = float(np.abs(g).mean())
        plan, state = admm_solve(g, s, lam)
        obj_admm = objective_value(g, lam, plan.delta_s)
        obj_oracle = objective_value(g, lam, coordinate_oracle(g, s, lam))
        assert abs(obj_admm - obj_oracle) <= 1e-6 * (1 + abs(obj_oracle))
        assert state.iterations < 5000


def test_admm_supports_match_away_from_ties():
    for seed in range(10):
        g, s = random_instance(seed + 100)
        lam = float(np.abs(g).mean())
        plan, _ = admm_solve(g, s, lam)
        oracle = coordinate_oracle(g, s, lam)
        near_tie = np.abs(np.abs(g) - lam) <= 1e-6
        mine = np.abs(plan.delta_s) > 1e-9
        theirs = np.abs(oracle) > 1e-9
        assert np.all((mine == theirs) | near_tie)


def test_admm_lambda_above_max_g_gives_zero():
    g, s = random_instance(7)
    lam = float(np.abs(g).max()) + 0.1
    plan, _ = admm_solve(g, s, lam)
    np.testing.assert_allclose(plan.delta_s, np.zeros_like(g), atol=1e-9)


def test_admm_lambda_zero_all_positive_saturates():
    rng = np.random.default_rng(3)
    g = rng.uniform(0.5, 2.0, 20)
    s = rng.uniform(-1, 1, 20)
    plan, _ = admm_solve(g, s, 0.0)
    np.testing.assert_allclose(plan.delta_s, 1.0 - s, atol=1e-7)


def test_admm_two_node_example():
    plan, _ = admm_solve(np.array([0.5, 1.5]), np.zeros(2), 1.0)
    np.testing.assert_allclose(plan.delta_s, [0.0, 1.0], atol=1e-8)


def test_admm_iterates_stay_in_box():
    g, s = random_instance(11)
    plan, state = admm_solve(g, s, 0.3)
    assert np.all(state.x >= -1 - s - 1e-12)
    assert np.all(state.x <= 1 - s + 1e-12)


def test_admm_residual_convergence_within_budget():
    for seed in (0, 1):
        g, s = random_instance(seed, n=500)
        _, state = admm_solve(g, s, float(np.abs(g).mean()), rho=1.0,
                              tol_abs=1e-10, tol_rel=0.0, max_iter=5000)
        assert state.primal_residual < 1e-6
        assert state.dual_residual < 1e-6
        assert state.iterations <= 5000


def test_admm_trace_histories():
    g, s = random_instance(13)
    plan, state = admm_solve(g, s, 0.5, trace=True)
    assert state.primal_history.shape == (state.iterations,)
    assert state.dual_history.shape == (state.iterations,)
    assert state.objective_history.shape == (state.iterations,)
    # final history entries match the reported residuals
    assert state.primal_history[-1] == pytest.approx(state.primal_residual)
    assert state.objective_history[-1] == pytest.approx(
        objective_value(g, 0.5, plan.delta_s), abs=1e-12)


def test_admm_max_iter_error():
    from opinionet import ConvergenceError
    g, s = random_instance(17)
    with pytest.raises(ConvergenceError):
        admm_solve(g, s, 0.5, max_iter=1, tol_abs=0.0, tol_rel=0.0)


def test_admm_validates_parameters():
    g, s = random_instance(19)
    with pytest.raises(ConfigError):
        admm_solve(g, s, -1.0)
    with pytest.raises(ConfigError):
        admm_solve(g, s, 1.0, rho=0.0)


def test_calibrate_budget_slack_saturates():
    g = np.array([1.0, -2.0, 0.0])
    s = np.zeros(3)
    lam, plan = calibrate_lambda(g, s, 10.0)
    assert lam == 0.0
    np.testing.assert_allclose(plan.delta_s, [1.0, -1.0, 0.0])
    greedy = greedy_allocate(g, s, 10.0)
    np.testing.assert_allclose(plan.delta_s, greedy.delta_s)


def test_calibrate_zero_budget():
    g, s = random_instance(23)
    _, plan = calibrate_lambda(g, s, 0.0)
    np.testing.assert_array_equal(plan.delta_s, np.zeros_like(g))


def test_calibrate_matches_greedy_benefit():
    for seed in range(15):
        g, s = random_instance(seed, n=50)
        mu = float(np.random.default_rng(seed).uniform(0.0, 20.0))
        _, plan = calibrate_lambda(g, s, mu)
        best = benefit(g, greedy_allocate(g, s, mu))
        assert benefit(g, plan) == pytest.approx(best, abs=1e-9)
        plan.validate(s, mu)


def test_calibrate_handles_ties():
    g = np.array([1.0, 1.0])
    s = np.zeros(2)
    lam, plan = calibrate_lambda(g, s, 1.5)
    assert benefit(g, plan) == pytest.approx(1.5)
    assert np.abs(plan.delta_s).sum() == pytest.approx(1.5)
