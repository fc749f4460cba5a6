# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the per-link SINR/rate math and the power-control
surrogate.  Semantics match ``_numpy`` exactly; see that module for the
formula documentation."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, log2

cnp.import_array()


def sinr_matrix(double[:, ::1] gains, double[::1] p, double noise):
    cdef Py_ssize_t n_ue = gains.shape[0]
    cdef Py_ssize_t n_bs = gains.shape[1]
    out_arr = np.empty((n_ue, n_bs), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t n, k
    cdef double tot, s
    for n in range(n_ue):
        tot = 0.0
        for k in range(n_bs):
            tot += gains[n, k] * p[k]
        for k in range(n_bs):
            s = gains[n, k] * p[k]
            out[n, k] = s / (noise + tot - s)
    return out_arr


def rate_matrix(double[:, ::1] gains, double[::1] p, double noise,
                double rate_scale):
    cdef Py_ssize_t n_ue = gains.shape[0]
    cdef Py_ssize_t n_bs = gains.shape[1]
    out_arr = np.empty((n_ue, n_bs), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t n, k
    cdef double tot, s
    for n in range(n_ue):
        tot = 0.0
        for k in range(n_bs):
            tot += gains[n, k] * p[k]
        for k in range(n_bs):
            s = gains[n, k] * p[k]
            out[n, k] = rate_scale * log2(1.0 + s / (noise + tot - s))
    return out_arr


def surrogate_value(double[::1] rho, double[:, ::1] gains, double noise,
                    double[:, ::1] aw, double bw_sum, double[::1] pow_cost):
    cdef Py_ssize_t n_ue = gains.shape[0]
    cdef Py_ssize_t n_bs = gains.shape[1]
    cdef double[::1] p = np.empty(n_bs, dtype=np.float64)
    cdef Py_ssize_t n, k
    cdef double tot, s, a, value = 0.0
    for k in range(n_bs):
        p[k] = exp(rho[k])
        value -= pow_cost[k] * p[k]
    for n in range(n_ue):
        tot = 0.0
        for k in range(n_bs):
            tot += gains[n, k] * p[k]
        for k in range(n_bs):
            a = aw[n, k]
            if a != 0.0:
                s = gains[n, k] * p[k]
                value += a * (log(s) - log(noise + tot - s))
    return value + bw_sum


def surrogate_value_grad(double[::1] rho, double[:, ::1] gains, double noise,
                         double[:, ::1] aw, double bw_sum,
                         double[::1] pow_cost):
    cdef Py_ssize_t n_ue = gains.shape[0]
    cdef Py_ssize_t n_bs = gains.shape[1]
    grad_arr = np.zeros(n_bs, dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double[::1] p = np.empty(n_bs, dtype=np.float64)
    cdef double[::1] ratio = np.empty(n_bs, dtype=np.float64)
    cdef Py_ssize_t n, k
    cdef double tot, s, a, srow, interf, value = 0.0
    for k in range(n_bs):
        p[k] = exp(rho[k])
        value -= pow_cost[k] * p[k]
    for n in range(n_ue):
        tot = 0.0
        for k in range(n_bs):
            tot += gains[n, k] * p[k]
        srow = 0.0
        for k in range(n_bs):
            a = aw[n, k]
            s = gains[n, k] * p[k]
            interf = noise + tot - s
            if a != 0.0:
                value += a * (log(s) - log(interf))
                ratio[k] = a / interf
            else:
                ratio[k] = 0.0
            srow += ratio[k]
        for k in range(n_bs):
            grad[k] += aw[n, k] - (srow - ratio[k]) * gains[n, k] * p[k]
    for k in range(n_bs):
        grad[k] -= pow_cost[k] * p[k]
    return value + bw_sum, grad_arr
