"""ADMM route to the budgeted allocation problem.

The problem min -g.x + lam*|x|_1 over the per-node box splits into a
box-projected x-block and a soft-thresholded z-block with a scaled dual;
because the objective is coordinate-separable it also has a closed-form
solution (the coordinate oracle), which makes every ADMM run
independently checkable. A bisection on lam converts an L1 budget into
the penalty weight, giving a second, optimization-based solver for the
same plans the greedy allocator produces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .allocate import AllocationPlan, _check_feasible
from .errors import ConfigError, ConvergenceError, OpinionetError

DEFAULT_RHO = 1.0
DEFAULT_TOL_ABS = 1e-8
DEFAULT_TOL_REL = 1e-8
DEFAULT_MAX_ITER = 5000


@dataclass
class AdmmState:
    """Final iterates and residuals of one ADMM run."""

    x: np.ndarray
    z: np.ndarray
    u: np.ndarray
    rho: float
    lam: float
    iterations: int
    primal_residual: float
    dual_residual: float
    primal_history: np.ndarray | None = None
    dual_history: np.ndarray | None = None
    objective_history: np.ndarray | None = None


def soft_threshold(v, kappa):
    """Shrink v toward zero by kappa, zeroing the dead zone |v| <= kappa."""
    if kappa < 0:
        raise ConfigError("threshold must be nonnegative")
    out = np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)
    return float(out) if np.isscalar(v) else out


def objective_value(g, lam, x):
    """Penalized objective -g.x + lam * |x|_1 (lower is better)."""
    x = np.asarray(x, dtype=np.float64)
    return float(-np.dot(g, x) + lam * np.abs(x).sum())


def admm_solve(g, s, lam, rho=DEFAULT_RHO, tol_abs=DEFAULT_TOL_ABS,
               tol_rel=DEFAULT_TOL_REL, max_iter=DEFAULT_MAX_ITER, trace=False):
    """Run scaled-dual ADMM at a fixed L1 weight lam.

    Returns (plan, state): the plan's delta_s is the z-block (exactly
    sparse); the state carries x, u and the residuals, plus per-iteration
    histories when trace is set.
    """
    if rho <= 0:
        raise ConfigError("rho must be positive")
    if lam < 0:
        raise ConfigError("lambda must be nonnegative")
    s = _check_feasible(s)
    g = np.asarray(g, dtype=np.float64)
    lower = -1.0 - s
    upper = 1.0 - s

    x, z, u, iters, r_norm, s_norm, r_hist, s_hist, o_hist = kernels.admm_iterate(
        g, lower, upper, lam, rho, tol_abs, tol_rel, max_iter
    )
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(z)) or np.any(~np.isfinite(u)):
        raise OpinionetError("ADMM produced non-finite iterates")

    sqrt_n = np.sqrt(g.shape[0])
    eps_pri = sqrt_n * tol_abs + tol_rel * max(float(np.linalg.norm(x)),
                                               float(np.linalg.norm(z)))
    eps_dual = sqrt_n * tol_abs + tol_rel * rho * float(np.linalg.norm(u))
    if r_norm > eps_pri or s_norm > eps_dual:
        raise ConvergenceError(
            f"ADMM did not converge in {max_iter} iterations "
            f"(primal {r_norm:.3e} vs {eps_pri:.3e}, dual {s_norm:.3e} vs {eps_dual:.3e})",
            residual=max(r_norm, s_norm), iterations=iters,
        )

    state = AdmmState(
        x=x, z=z, u=u, rho=rho, lam=lam, iterations=iters,
        primal_residual=r_norm, dual_residual=s_norm,
        primal_history=r_hist if trace else None,
        dual_history=s_hist if trace else None,
        objective_history=o_hist if trace else None,
    )
    touched = [(int(i), float(z[i])) for i in np.nonzero(z)[0]]
    plan = AllocationPlan(delta_s=z, spent=float(np.abs(z).sum()),
                          touched=touched, method="admm")
    return plan, state


def coordinate_oracle(g, s, lam):
    """Exact minimizer of -g.x + lam*|x|_1 over the box, per coordinate.

    Saturates up where g_i > lam, down where g_i < -lam, leaves the dead
    zone (boundary included) at zero.
    """
    if lam < 0:
        raise ConfigError("lambda must be nonnegative")
    s = _check_feasible(s)
    g = np.asarray(g, dtype=np.float64)
    lower = -1.0 - s
    upper = 1.0 - s
    return np.where(g > lam, upper, np.where(g < -lam, lower, 0.0))


def calibrate_lambda(g, s, budget, tol_budget=1e-12):
    """Map an L1 budget onto the penalty path.

    Bisects lam over [0, max|g_i|] against the coordinate oracle's spend
    (a nonincreasing step function of lam) to the smallest lam whose
    allocation fits the budget, then spends the leftover on the
    not-yet-allocated nodes in decreasing |g_i| order, mirroring the
    greedy allocator's partial step. Returns (lam, plan).
    """
    if budget < 0:
        raise ConfigError("budget must be nonnegative")
    s = _check_feasible(s)
    g = np.asarray(g, dtype=np.float64)

    def spend(lam):
        return float(np.abs(coordinate_oracle(g, s, lam)).sum())

    hi = float(np.abs(g).max()) if g.size else 0.0
    if spend(0.0) <= budget:
        lam = 0.0
    else:
        lo = 0.0
        scale = max(1.0, hi)
        for _ in range(200):
            if hi - lo <= tol_budget * scale:
                break
            mid = 0.5 * (lo + hi)
            if spend(mid) <= budget:
                hi = mid
            else:
                lo = mid
        lam = hi

    delta = coordinate_oracle(g, s, lam)
    touched = [(int(i), float(delta[i])) for i in np.argsort(-np.abs(g), kind="stable")
               if delta[i] != 0.0]
    remaining = float(budget) - float(np.abs(delta).sum())

    # Partial step: same spending walk as greedy, restricted to nodes the
    # oracle left in the dead zone.
    if remaining > 0.0:
        order = np.argsort(-np.abs(g), kind="stable")
        for i in order:
            if remaining <= 0.0:
                break
            if g[i] == 0.0:
                break
            if delta[i] != 0.0:
                continue
            sign = 1.0 if g[i] > 0.0 else -1.0
            cost = 1.0 - sign * s[i]
            if cost <= 0.0:
                continue
            amount = sign * min(cost, remaining)
            delta[i] = amount
            touched.append((int(i), float(amount)))
            remaining -= abs(amount)

    plan = AllocationPlan(delta_s=delta, spent=float(np.abs(delta).sum()),
                          touched=touched, method="admm")
    return lam, plan
