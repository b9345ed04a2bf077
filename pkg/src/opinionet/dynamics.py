"""Equilibrium opinion dynamics on signed trust graphs.

Each node i holds a fixed internal opinion s_i and plays a quadratic
consensus game in its expressed opinion z_i, weighing self-anchoring by
its confidence alpha_i against agreement with trusted (and disagreement
with distrusted) successors. The simultaneous best responses form the
linear system

    M z = diag(alpha) s,   M = diag(alpha) + diag(1 - alpha) L,

whose rows are strictly diagonally dominant for alpha_i > 0, so the Nash
equilibrium exists, is unique, and is reachable both by a sparse direct
solve and by synchronous best-response sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from . import kernels
from .confidence import ConfidenceVector
from .errors import ConfigError, ConvergenceError
from .graph import SignedDigraph

DEFAULT_RESIDUAL_TOL = 1e-10
DENSE_THRESHOLD = 500


@dataclass(frozen=True)
class EquilibriumResult:
    """Expressed opinions at equilibrium plus solve telemetry."""

    z_star: np.ndarray
    iterations: int  # 0 for the direct solver
    residual: float  # max-norm of M z* - diag(alpha) s


class OpinionSystem:
    """The equilibrium operator M for one (graph, confidence) pair.

    Rows are never materialized densely above `dense_threshold` nodes;
    sparse structures and O(out-degree) row access cover everything the
    solvers need. Instances are immutable and cache their sparse matrix
    and LU factorizations, so repeated solves against many right-hand
    sides are cheap. Safe for concurrent reads.
    """

    def __init__(self, graph: SignedDigraph, alpha, dense_threshold=DENSE_THRESHOLD):
        if isinstance(alpha, ConfidenceVector):
            alpha = alpha.alpha
        alpha = np.asarray(alpha, dtype=np.float64)
        if alpha.shape != (graph.n,):
            raise ConfigError(f"alpha must have length {graph.n}, got shape {alpha.shape}")
        if graph.n and (alpha.min() <= 0.0 or alpha.max() >= 1.0):
            raise ConfigError("confidence values must lie strictly in (0, 1)")

        self.graph = graph
        self.alpha = alpha
        self.dense_threshold = int(dense_threshold)
        self.out_strength = graph.out_strengths()
        self.diag = alpha + (1.0 - alpha) * self.out_strength

        rows = np.repeat(np.arange(graph.n), np.diff(graph.succ_ptr))
        self.offdiag_coef = (1.0 - alpha[rows]) * graph.succ_wt  # +coef on the sweep side

        # Strict row dominance: |M_ii| - sum_j |M_ij| = alpha_i > 0.
        dominance = self.diag - (1.0 - alpha) * self.out_strength
        if graph.n and dominance.min() <= 0.0:
            raise ConfigError("system rows are not strictly diagonally dominant")

        self._matrix = None
        self._lu = None
        self._lu_t = None

    @property
    def n(self):
        return self.graph.n

    def row(self, i):
        """(column ids, values) of row i of M, diagonal entry first."""
        cols, wts = self.graph.successors(i)
        lo, hi = self.graph.succ_ptr[i], self.graph.succ_ptr[i + 1]
        out_cols = np.concatenate(([i], cols))
        out_vals = np.concatenate(([self.diag[i]], -self.offdiag_coef[lo:hi]))
        return out_cols, out_vals

    def matrix(self):
        """M as a scipy CSR matrix (cached)."""
        if self._matrix is None:
            g = self.graph
            rows = np.repeat(np.arange(g.n), np.diff(g.succ_ptr))
            m = sparse.csr_matrix(
                (np.concatenate([self.diag, -self.offdiag_coef]),
                 (np.concatenate([np.arange(g.n), rows]),
                  np.concatenate([np.arange(g.n), g.succ_idx]))),
                shape=(g.n, g.n),
            )
            m.sum_duplicates()
            self._matrix = m
        return self._matrix

    def dense(self):
        if self.n > self.dense_threshold:
            raise ConfigError(
                f"refusing to densify a {self.n}-node system "
                f"(threshold {self.dense_threshold})"
            )
        return self.matrix().toarray()

    def rhs(self, s):
        """Right-hand side diag(alpha) s."""
        return self.alpha * np.asarray(s, dtype=np.float64)

    def _factor(self):
        if self._lu is None:
            self._lu = spla.splu(self.matrix().tocsc())
        return self._lu

    def _factor_t(self):
        if self._lu_t is None:
            self._lu_t = spla.splu(self.matrix().T.tocsc())
        return self._lu_t


def equilibrium_direct(system: OpinionSystem, s, rtol=DEFAULT_RESIDUAL_TOL):
    """Sparse LU solve of M z = diag(alpha) s, refined until the residual
    max-norm is within rtol * max(1, |rhs|_inf)."""
    if system.n == 0:
        return EquilibriumResult(np.zeros(0), 0, 0.0)
    b = system.rhs(s)
    m = system.matrix()
    lu = system._factor()
    z = lu.solve(b)
    bound = rtol * max(1.0, float(np.abs(b).max()))
    residual = float(np.abs(m.dot(z) - b).max())
    for _ in range(3):  # iterative refinement; one pass normally suffices
        if residual <= bound:
            break
        z = z + lu.solve(b - m.dot(z))
        residual = float(np.abs(m.dot(z) - b).max())
    if not residual <= bound:  # NaN-safe
        raise ConvergenceError(
            f"direct solve residual {residual:.3e} above {bound:.3e}", residual=residual
        )
    return EquilibriumResult(z, 0, residual)


def equilibrium_iterative(system: OpinionSystem, s, tol=1e-12, max_iter=100000):
    """Synchronous best-response sweeps from z = s.

    Each sweep applies z_i <- (alpha_i s_i + (1-alpha_i) sum_j w_ij z_j)
    / (alpha_i + (1-alpha_i) sum_j |w_ij|) to every node at once, so the
    result is order-independent. The internal stop threshold is scaled
    so the returned iterate's residual is below tol as well.
    """
    if tol <= 0:
        raise ConfigError("tolerance must be positive")
    if system.n == 0:
        return EquilibriumResult(np.zeros(0), 0, 0.0)
    s = np.asarray(s, dtype=np.float64)
    b = system.rhs(s)
    stop = tol / max(1.0, float(system.diag.max()))
    z, sweeps, diff = kernels.jacobi_solve(
        system.graph.succ_ptr, system.graph.succ_idx, system.offdiag_coef,
        system.diag, b, s, stop, max_iter,
    )
    if not diff < stop:  # NaN-safe
        raise ConvergenceError(
            f"fixed-point sweeps did not converge in {max_iter} iterations "
            f"(last change {diff:.3e})",
            residual=diff, iterations=sweeps,
        )
    residual = float(np.abs(system.matrix().dot(z) - b).max())
    return EquilibriumResult(z, sweeps, residual)


def node_cost(i, z, s, system: OpinionSystem):
    """Quadratic consensus cost of node i at expressed profile z."""
    alpha_i = system.alpha[i]
    cols, wts = system.graph.successors(i)
    own = alpha_i * (z[i] - s[i]) ** 2
    if cols.size == 0:
        return float(own)
    social = np.abs(wts) * (z[i] - np.sign(wts) * z[cols]) ** 2
    return float(own + (1.0 - alpha_i) * social.sum())


def overall_opinion(z):
    """Sum of expressed opinions; the quantity interventions maximize."""
    return float(np.sum(z))


def contribution_index(system: OpinionSystem, rtol=DEFAULT_RESIDUAL_TOL):
    """Vector g with g . s == overall opinion of the equilibrium for every s.

    Computed from one transpose solve M^T y = 1 followed by g = alpha * y,
    so it costs a single factorization however many allocations reuse it.
    """
    if system.n == 0:
        return np.zeros(0)
    ones = np.ones(system.n)
    mt = system.matrix().T.tocsr()
    lu = system._factor_t()
    y = lu.solve(ones)
    residual = float(np.abs(mt.dot(y) - ones).max())
    for _ in range(3):
        if residual <= rtol:
            break
        y = y + lu.solve(ones - mt.dot(y))
        residual = float(np.abs(mt.dot(y) - ones).max())
    if not residual <= rtol:  # NaN-safe
        raise ConvergenceError(
            f"transpose solve residual {residual:.3e} above {rtol:.3e}", residual=residual
        )
    return system.alpha * y


def omstn_fixed_point(graph: SignedDigraph, s, tol=1e-12, max_iter=100000):
    """Fixed point of z_i = (s_i + sum_j w_ij z_j) / (1 + sum_j |w_ij|).

    The predecessor model this package generalizes; the alpha = 1/2
    special case reduces to it exactly. Kept as an independent update
    rule (no confidence machinery) for cross-model checks.
    """
    s = np.asarray(s, dtype=np.float64)
    diag = 1.0 + graph.out_strengths()
    stop = tol / max(1.0, float(diag.max()))
    z, sweeps, diff = kernels.jacobi_solve(
        graph.succ_ptr, graph.succ_idx, graph.succ_wt, diag, s, s, stop, max_iter
    )
    if not diff < stop:  # NaN-safe
        raise ConvergenceError(
            f"fixed-point sweeps did not converge in {max_iter} iterations",
            residual=diff, iterations=sweeps,
        )
    return z


def friedkin_johnsen_fixed_point(graph: SignedDigraph, s, tol=1e-12, max_iter=100000):
    """Fixed point of z_i = (s_i + sum_j w_ij z_j) / (1 + sum_j w_ij).

    Only defined on all-positive-weight graphs, where the update is a
    convex combination; the signed denominator can vanish otherwise.
    """
    if graph.succ_wt.size and graph.succ_wt.min() <= 0.0:
        raise ConfigError("the positive-weight update needs an all-positive graph")
    s = np.asarray(s, dtype=np.float64)
    rows = np.repeat(np.arange(graph.n), np.diff(graph.succ_ptr))
    signed_sum = np.zeros(graph.n)
    np.add.at(signed_sum, rows, graph.succ_wt)
    diag = 1.0 + signed_sum
    stop = tol / max(1.0, float(diag.max()))
    z, sweeps, diff = kernels.jacobi_solve(
        graph.succ_ptr, graph.succ_idx, graph.succ_wt, diag, s, s, stop, max_iter
    )
    if not diff < stop:  # NaN-safe
        raise ConvergenceError(
            f"fixed-point sweeps did not converge in {max_iter} iterations",
            residual=diff, iterations=sweeps,
        )
    return z
