"""Per-node confidence indices.

A node's confidence weighs its own internal opinion against the
expressed opinions around it. It is either fixed network-wide or
adjusted per node from two signals: the node's PageRank (social status)
and the mean evaluation its raters give it. Values are clamped to
[eps, 1 - eps]; strict interiority is what keeps the equilibrium system
matrix strictly diagonally dominant even for sink rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, ConvergenceError
from .graph import SignedDigraph

DEFAULT_DAMPING = 0.85
DEFAULT_EPS = 1e-6


@dataclass(frozen=True)
class ConfidenceVector:
    """Confidence indices plus how they were produced.

    mean_eval / rank hold the (m, r) signals when mode is adjusted, for
    reporting; they are None in fixed mode.
    """

    alpha: np.ndarray
    mode: str
    eps: float
    mean_eval: np.ndarray | None = None
    rank: np.ndarray | None = None

    def __post_init__(self):
        if not 0.0 < self.eps < 0.5:
            raise ConfigError("clamp eps must lie in (0, 1/2)")
        a = self.alpha
        if a.size and (a.min() < self.eps - 1e-15 or a.max() > 1.0 - self.eps + 1e-15):
            raise ConfigError("confidence values escaped the [eps, 1-eps] clamp")


def pagerank(g: SignedDigraph, damping=DEFAULT_DAMPING, tol=1e-12, max_iter=1000):
    """Max-normalized PageRank on the unweighted, sign-ignored structure.

    Uniform teleport mass (1-damping)/n; dangling nodes spread their rank
    uniformly. Iterates until the L1 change drops below tol, then divides
    by the maximum, so max(r) == 1 and every entry is positive.
    """
    if g.n < 1:
        raise ConfigError("pagerank needs at least one node")
    if not 0.0 < damping < 1.0:
        raise ConfigError("damping must lie in (0, 1)")

    out_deg = g.out_degrees()
    dangling = np.nonzero(out_deg == 0)[0].astype(np.int64)
    # Predecessor edge e contributes r[src_e] / out_degree(src_e).
    inv_out = np.zeros(g.pred_idx.size)
    if inv_out.size:
        inv_out = 1.0 / out_deg[g.pred_idx].astype(np.float64)
    r0 = np.full(g.n, 1.0 / g.n)

    r, iters, change = kernels.pagerank_iterate(
        g.pred_ptr, g.pred_idx, inv_out, dangling, damping, r0, tol, max_iter
    )
    if not change < tol:  # NaN-safe
        raise ConvergenceError(
            f"pagerank did not converge in {max_iter} iterations (last L1 change {change:.3e})",
            residual=change, iterations=iters,
        )
    return r / r.max()


def mean_evaluation(g: SignedDigraph):
    """Average incoming edge weight per node; 0 where a node has no raters."""
    counts = np.diff(g.pred_ptr).astype(np.float64)
    sums = np.zeros(g.n)
    np.add.at(sums, np.repeat(np.arange(g.n), np.diff(g.pred_ptr)), g.pred_wt)
    return np.divide(sums, counts, out=np.zeros(g.n), where=counts > 0)


def confidence_adjusted(g: SignedDigraph, q=0.5, damping=DEFAULT_DAMPING,
                        eps=DEFAULT_EPS, pr_tol=1e-12, pr_max_iter=1000):
    """alpha_i = clamp(relu(q * m_i + (1-q) * r_i), eps, 1-eps)."""
    if not 0.0 <= q <= 1.0:
        raise ConfigError("mixing weight q must lie in [0, 1]")
    m = mean_evaluation(g)
    r = pagerank(g, damping=damping, tol=pr_tol, max_iter=pr_max_iter)
    raw = np.maximum(0.0, q * m + (1.0 - q) * r)
    alpha = np.clip(raw, eps, 1.0 - eps)
    return ConfidenceVector(alpha=alpha, mode=f"adjusted:{q}", eps=eps,
                            mean_eval=m, rank=r)


def confidence_fixed(n, alpha0, eps=DEFAULT_EPS):
    """All nodes share alpha0; must be strictly inside (0, 1)."""
    if not 0.0 < alpha0 < 1.0:
        raise ConfigError(f"fixed confidence must lie strictly in (0, 1), got {alpha0}")
    value = min(max(alpha0, eps), 1.0 - eps)
    return ConfidenceVector(alpha=np.full(n, value), mode=f"fixed:{alpha0}", eps=eps)


def confidence_from_spec(g: SignedDigraph, spec: str, damping=DEFAULT_DAMPING,
                         eps=DEFAULT_EPS, pr_tol=1e-12, pr_max_iter=1000):
    """Parse 'fixed:<v>' or 'adjusted:<q>' into a ConfidenceVector."""
    if spec.startswith("fixed:"):
        return confidence_fixed(g.n, _parse_value(spec), eps=eps)
    if spec.startswith("adjusted:"):
        return confidence_adjusted(g, q=_parse_value(spec), damping=damping,
                                   eps=eps, pr_tol=pr_tol, pr_max_iter=pr_max_iter)
    raise ConfigError(f"unknown confidence mode {spec!r}; use fixed:<v> or adjusted:<q>")


def _parse_value(spec):
    text = spec.split(":", 1)[1]
    try:
        if "/" in text:  # allow 2/3-style fractions from the CLI
            num, den = text.split("/", 1)
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad confidence value in {spec!r}") from None
