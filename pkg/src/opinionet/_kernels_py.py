"""Vectorized numpy/scipy implementations of the hot-loop kernels.

These are the fallback for :mod:`opinionet._kernels` (the compiled
extension) and the reference its tests compare against. Both backends
share signatures and iteration order exactly; only rounding inside
reductions may differ.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sparse

BACKEND = "python"


def jacobi_solve(indptr, cols, coef, diag, rhs, z0, tol, max_iter):
    """Synchronous fixed-point sweeps z[i] <- (rhs[i] + sum_e coef[e] * z[cols[e]]) / diag[i].

    Stops when the max-norm change between sweeps drops below tol.
    Returns (z, sweeps_used, last_change); the caller decides whether a
    non-converged result is an error.
    """
    n = diag.shape[0]
    z = np.array(z0, dtype=np.float64, copy=True)
    if n == 0 or max_iter <= 0:
        return z, 0, 0.0
    mat = sparse.csr_matrix((coef, cols, indptr), shape=(n, n))
    diff = np.inf
    for sweep in range(1, max_iter + 1):
        z_new = (rhs + mat.dot(z)) / diag
        diff = float(np.max(np.abs(z_new - z)))
        z = z_new
        if diff < tol:
            return z, sweep, diff
    return z, max_iter, diff


def pagerank_iterate(indptr, src, inv_out, dangling, damping, r0, tol, max_iter):
    """Power iteration with uniform teleport and uniform dangling redistribution.

    r_new[i] = (1-d)/n + d * (sum_e r[src[e]] * inv_out[e] + dangling_mass / n)

    where the edge arrays are the predecessor index of the graph and
    inv_out[e] is 1 / out-degree of the edge's source. Returns
    (r, iterations_used, last_l1_change).
    """
    n = r0.shape[0]
    r = np.array(r0, dtype=np.float64, copy=True)
    if n == 0 or max_iter <= 0:
        return r, 0, 0.0
    mat = sparse.csr_matrix((inv_out, src, indptr), shape=(n, n))
    teleport = (1.0 - damping) / n
    change = np.inf
    for it in range(1, max_iter + 1):
        dangling_mass = float(r[dangling].sum()) if dangling.size else 0.0
        r_new = teleport + damping * (mat.dot(r) + dangling_mass / n)
        change = float(np.abs(r_new - r).sum())
        r = r_new
        if change < tol:
            return r, it, change
    return r, max_iter, change


def admm_iterate(obj_coef, lower, upper, lam, rho, tol_abs, tol_rel, max_iter):
    """Scaled-dual ADMM for min -obj_coef.x + lam*|x|_1 over the box [lower, upper].

    x-update clips z - u + obj_coef/rho into the box, z-update
    soft-thresholds x + u by lam/rho, u accumulates x - z. Stops when
    both residuals fall below sqrt(n)*tol_abs + tol_rel*scale.

    Returns (x, z, u, iterations, primal_res, dual_res,
    primal_history, dual_history, objective_history).
    """
    n = obj_coef.shape[0]
    x = np.zeros(n)
    z = np.zeros(n)
    u = np.zeros(n)
    shift = obj_coef / rho
    kappa = lam / rho
    sqrt_n = np.sqrt(n)

    r_hist = np.zeros(max_iter)
    s_hist = np.zeros(max_iter)
    obj_hist = np.zeros(max_iter)

    iters = 0
    r_norm = 0.0
    s_norm = 0.0
    for k in range(max_iter):
        x = np.clip(z - u + shift, lower, upper)
        z_old = z
        v = x + u
        z = np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)
        u = u + x - z

        r_norm = float(np.linalg.norm(x - z))
        s_norm = rho * float(np.linalg.norm(z - z_old))
        iters = k + 1
        r_hist[k] = r_norm
        s_hist[k] = s_norm
        obj_hist[k] = float(-obj_coef @ z + lam * np.abs(z).sum())

        eps_pri = sqrt_n * tol_abs + tol_rel * max(float(np.linalg.norm(x)),
                                                   float(np.linalg.norm(z)))
        eps_dual = sqrt_n * tol_abs + tol_rel * rho * float(np.linalg.norm(u))
        if r_norm <= eps_pri and s_norm <= eps_dual:
            break

    return x, z, u, iters, r_norm, s_norm, r_hist[:iters], s_hist[:iters], obj_hist[:iters]
