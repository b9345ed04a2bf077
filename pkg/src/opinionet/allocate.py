"""Budgeted internal-opinion allocation: exact greedy plus baseline heuristics.

The objective is linear in the modification (benefit = g . delta_s with g
the contribution index), the feasible set is a box intersected with an L1
budget ball, so spending the budget on coordinates in decreasing |g_i|
order is exactly optimal. Baselines reuse the same spending mechanics
with heuristic node orderings and a fixed push direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .graph import SignedDigraph

FEAS_TOL = 1e-12


@dataclass
class AllocationPlan:
    """A modification vector plus how it was spent.

    touched lists (node, amount) in allocation order; amounts are nonzero
    and their absolute values sum to spent.
    """

    delta_s: np.ndarray
    spent: float
    touched: list[tuple[int, float]] = field(default_factory=list)
    method: str = ""

    def validate(self, s, budget=None, tol=FEAS_TOL):
        """Raise ConfigError if the plan violates feasibility."""
        moved = s + self.delta_s
        if moved.size and (moved.min() < -1.0 - tol or moved.max() > 1.0 + tol):
            raise ConfigError("plan pushes an opinion outside [-1, 1]")
        l1 = float(np.abs(self.delta_s).sum())
        if budget is not None and l1 > budget + max(tol, 1e-12):
            raise ConfigError(f"plan spends {l1} over budget {budget}")
        if abs(l1 - self.spent) > 1e-9:
            raise ConfigError("spent does not match |delta_s|_1")
        if any(amount == 0.0 for _, amount in self.touched):
            raise ConfigError("touched amounts must be nonzero")
        touched_l1 = sum(abs(amount) for _, amount in self.touched)
        if abs(touched_l1 - self.spent) > 1e-9:
            raise ConfigError("touched amounts do not sum to spent")
        return self


def _check_feasible(s):
    s = np.asarray(s, dtype=np.float64)
    if s.size and (s.min() < -1.0 - FEAS_TOL or s.max() > 1.0 + FEAS_TOL):
        raise ConfigError("internal opinions must lie in [-1, 1]")
    return s


def greedy_allocate(g, s, budget, objective="max"):
    """Optimal allocation of an L1 budget across internal opinions.

    Visits nodes in strictly decreasing |g_i| (ties broken toward the
    lower index), pushes each toward sign(g_i) * 1 at cost
    1 - sign(g_i) * s_i, and spends whatever budget remains as a partial
    push on the first node it cannot saturate. Zero-contribution nodes
    are never touched; minimizing negates g and proceeds identically.
    """
    if budget < 0:
        raise ConfigError("budget must be nonnegative")
    if objective not in ("max", "min"):
        raise ConfigError(f"objective must be 'max' or 'min', got {objective!r}")
    s = _check_feasible(s)
    g = np.asarray(g, dtype=np.float64)
    if objective == "min":
        g = -g

    n = g.shape[0]
    delta = np.zeros(n)
    touched = []
    remaining = float(budget)
    order = np.argsort(-np.abs(g), kind="stable")
    for i in order:
        if remaining <= 0.0:
            break
        gi = g[i]
        if gi == 0.0:
            break  # sorted by |g|, so everything after is zero too
        sign = 1.0 if gi > 0.0 else -1.0
        cost = 1.0 - sign * s[i]
        if cost <= 0.0:
            continue  # already saturated in the useful direction
        amount = sign * min(cost, remaining)
        delta[i] = amount
        touched.append((int(i), float(amount)))
        remaining -= abs(amount)

    return AllocationPlan(delta_s=delta, spent=float(np.abs(delta).sum()),
                          touched=touched, method="greedy")


def benefit(g, plan: AllocationPlan):
    """Objective gain of a plan: g . delta_s."""
    return float(np.dot(np.asarray(g, dtype=np.float64), plan.delta_s))


def rank_nodes(graph: SignedDigraph, s, method, seed=0):
    """Baseline node orderings.

    'rand' is a seeded permutation; 'trust' sorts by descending signed
    in-trust column sum; 'io' sorts by ascending internal opinion. Ties
    keep the lower index first.
    """
    n = graph.n
    if method == "rand":
        return np.random.default_rng(seed).permutation(n).astype(np.int64)
    if method == "trust":
        return np.argsort(-graph.in_trust_sums(absolute=False), kind="stable").astype(np.int64)
    if method == "io":
        return np.argsort(np.asarray(s, dtype=np.float64), kind="stable").astype(np.int64)
    raise ConfigError(f"unknown ranking method {method!r}")


def baseline_allocate(ordering, s, budget, method="baseline", direction=1.0):
    """Walk an ordering spending the budget pushing opinions toward +1.

    Same spending mechanics as the greedy allocator with the sign fixed;
    direction=-1.0 targets -1 instead (used when minimizing).
    """
    if budget < 0:
        raise ConfigError("budget must be nonnegative")
    if direction not in (1.0, -1.0):
        raise ConfigError("direction must be +1.0 or -1.0")
    s = _check_feasible(s)
    ordering = np.asarray(ordering, dtype=np.int64)
    n = s.shape[0]
    if ordering.size != n or (ordering.size and np.unique(ordering).size != n):
        raise ConfigError("ordering must be a permutation of all nodes")

    delta = np.zeros(n)
    touched = []
    remaining = float(budget)
    for i in ordering:
        if remaining <= 0.0:
            break
        cost = 1.0 - direction * s[i]
        if cost <= 0.0:
            continue
        amount = direction * min(cost, remaining)
        delta[i] = amount
        touched.append((int(i), float(amount)))
        remaining -= abs(amount)

    return AllocationPlan(delta_s=delta, spent=float(np.abs(delta).sum()),
                          touched=touched, method=method)
