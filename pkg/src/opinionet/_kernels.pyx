# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels: fixed-point sweeps, PageRank power steps,
and the ADMM coordinate loop. Mirrors `_kernels_py` exactly."""

from libc.math cimport fabs, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def jacobi_solve(indptr, cols, coef, diag, rhs, z0, double tol, long max_iter):
    """See `opinionet._kernels_py.jacobi_solve`."""
    cdef const cnp.int64_t[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] idx = np.ascontiguousarray(cols, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const double[::1] dv = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(rhs, dtype=np.float64)

    z_arr = np.array(z0, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = z_arr.shape[0]
    if n == 0 or max_iter <= 0:
        return z_arr, 0, 0.0
    buf_arr = np.empty(n, dtype=np.float64)

    cdef double[::1] z = z_arr
    cdef double[::1] buf = buf_arr
    cdef double[::1] tmp
    cdef double acc, d, diff = 0.0
    cdef Py_ssize_t i, e
    cdef long sweep = 0

    for sweep in range(1, max_iter + 1):
        diff = 0.0
        for i in range(n):
            acc = b[i]
            for e in range(ptr[i], ptr[i + 1]):
                acc += w[e] * z[idx[e]]
            acc /= dv[i]
            d = fabs(acc - z[i])
            if d > diff:
                diff = d
            buf[i] = acc
        tmp = z
        z = buf
        buf = tmp
        if diff < tol:
            break

    out = np.asarray(z).copy()
    return out, sweep, diff


def pagerank_iterate(indptr, src, inv_out, dangling, double damping,
                     r0, double tol, long max_iter):
    """See `opinionet._kernels_py.pagerank_iterate`."""
    cdef const cnp.int64_t[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] srcv = np.ascontiguousarray(src, dtype=np.int64)
    cdef const double[::1] inv = np.ascontiguousarray(inv_out, dtype=np.float64)
    cdef const cnp.int64_t[::1] dang = np.ascontiguousarray(dangling, dtype=np.int64)

    r_arr = np.array(r0, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = r_arr.shape[0]
    if n == 0 or max_iter <= 0:
        return r_arr, 0, 0.0
    buf_arr = np.empty(n, dtype=np.float64)

    cdef double[::1] r = r_arr
    cdef double[::1] buf = buf_arr
    cdef double[::1] tmp
    cdef double teleport = (1.0 - damping) / n
    cdef double mass, acc, change = 0.0
    cdef Py_ssize_t i, e
    cdef long it = 0

    for it in range(1, max_iter + 1):
        mass = 0.0
        for i in range(dang.shape[0]):
            mass += r[dang[i]]
        mass /= n
        change = 0.0
        for i in range(n):
            acc = 0.0
            for e in range(ptr[i], ptr[i + 1]):
                acc += r[srcv[e]] * inv[e]
            acc = teleport + damping * (acc + mass)
            change += fabs(acc - r[i])
            buf[i] = acc
        tmp = r
        r = buf
        buf = tmp
        if change < tol:
            break

    out = np.asarray(r).copy()
    return out, it, change


def admm_iterate(obj_coef, lower, upper, double lam, double rho,
                 double tol_abs, double tol_rel, long max_iter):
    """See `opinionet._kernels_py.admm_iterate`."""
    cdef const double[::1] g = np.ascontiguousarray(obj_coef, dtype=np.float64)
    cdef const double[::1] a = np.ascontiguousarray(lower, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(upper, dtype=np.float64)

    cdef Py_ssize_t n = g.shape[0]
    x_arr = np.zeros(n, dtype=np.float64)
    z_arr = np.zeros(n, dtype=np.float64)
    u_arr = np.zeros(n, dtype=np.float64)
    r_hist_arr = np.zeros(max_iter if max_iter > 0 else 0, dtype=np.float64)
    s_hist_arr = np.zeros(max_iter if max_iter > 0 else 0, dtype=np.float64)
    o_hist_arr = np.zeros(max_iter if max_iter > 0 else 0, dtype=np.float64)

    cdef double[::1] x = x_arr
    cdef double[::1] z = z_arr
    cdef double[::1] u = u_arr
    cdef double[::1] r_hist = r_hist_arr
    cdef double[::1] s_hist = s_hist_arr
    cdef double[::1] o_hist = o_hist_arr

    cdef double kappa = lam / rho
    cdef double sqrt_n = sqrt(<double> n)
    cdef double xi, v, zi, dz, ri
    cdef double r_norm = 0.0, s_norm = 0.0
    cdef double x_nrm, z_nrm, u_nrm, obj, eps_pri, eps_dual
    cdef Py_ssize_t i
    cdef long k, iters = 0

    for k in range(max_iter):
        r_norm = 0.0
        s_norm = 0.0
        x_nrm = 0.0
        z_nrm = 0.0
        u_nrm = 0.0
        obj = 0.0
        for i in range(n):
            xi = z[i] - u[i] + g[i] / rho
            if xi < a[i]:
                xi = a[i]
            elif xi > b[i]:
                xi = b[i]
            v = xi + u[i]
            if v > kappa:
                zi = v - kappa
            elif v < -kappa:
                zi = v + kappa
            else:
                zi = 0.0
            dz = zi - z[i]
            s_norm += dz * dz
            u[i] += xi - zi
            ri = xi - zi
            r_norm += ri * ri
            x[i] = xi
            z[i] = zi
            x_nrm += xi * xi
            z_nrm += zi * zi
            u_nrm += u[i] * u[i]
            obj += -g[i] * zi + lam * fabs(zi)

        r_norm = sqrt(r_norm)
        s_norm = rho * sqrt(s_norm)
        iters = k + 1
        r_hist[k] = r_norm
        s_hist[k] = s_norm
        o_hist[k] = obj

        x_nrm = sqrt(x_nrm)
        z_nrm = sqrt(z_nrm)
        eps_pri = sqrt_n * tol_abs + tol_rel * (x_nrm if x_nrm > z_nrm else z_nrm)
        eps_dual = sqrt_n * tol_abs + tol_rel * rho * sqrt(u_nrm)
        if r_norm <= eps_pri and s_norm <= eps_dual:
            break

    return (x_arr, z_arr, u_arr, iters, r_norm, s_norm,
            r_hist_arr[:iters].copy(), s_hist_arr[:iters].copy(), o_hist_arr[:iters].copy())
