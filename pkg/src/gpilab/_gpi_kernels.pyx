# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: fused loops for the numpy versions in _kernels_py.

Semantics must match gpilab._kernels_py exactly; parity is enforced by tests.
"""

import numpy as np

from libc.math cimport pow as cpow

from .errors import SpecFunctionError

# codes mirrored from _kernels_py
DEF W_ONE = 0
DEF W_POWER = 1
DEF D_POWER = 0
DEF D_COMPLEMENT_POWER = 1
DEF A_COUNT = 0
DEF A_SCALED_COUNT = 1


cdef inline double _fastpow(double base, double p) noexcept nogil:
    # preset exponents are small integers almost always
    if p == 1.0:
        return base
    if p == 0.0:
        return 1.0
    if p == 2.0:
        return base * base
    if p == 3.0:
        return base * base * base
    return cpow(base, p)


def coded_gpi_value(double[::1] sorted_vals, double z, Py_ssize_t q,
                    long mu1, long mu2, long mu3, long mu4,
                    int w_kind, double w_param,
                    int d_kind, double d_param, int a_kind):
    """Weighted deprivation L-statistic over the q smallest order statistics."""
    cdef Py_ssize_t n = sorted_vals.shape[0]
    cdef Py_ssize_t j
    cdef double arg, w, u, d, acc = 0.0, b = 0.0, a
    if q == 0:
        return 0.0
    if w_kind == W_ONE:
        b = <double> q
    else:
        for j in range(1, q + 1):
            b += _fastpow(<double> j, w_param)
    for j in range(1, q + 1):
        if w_kind == W_ONE:
            w = 1.0
        else:
            arg = <double> (mu1 * n + mu2 * q - mu3 * j + mu4)
            if arg <= 0.0:
                raise SpecFunctionError(
                    f"weight argument {arg} <= 0 for mu="
                    f"({mu1},{mu2},{mu3},{mu4}) at n={n}, q={q}"
                )
            w = _fastpow(arg, w_param)
        u = (z - sorted_vals[j - 1]) / z
        if d_kind == D_POWER:
            d = _fastpow(u, d_param)
        else:
            d = 1.0 - _fastpow(1.0 - u, d_param)
        acc += w * d
    if a_kind == A_COUNT:
        a = <double> q
    else:
        a = q * (q + 1.0) / (n + 1.0)
    return a / (n * b) * acc


def stable_ranks(double[::1] values):
    """Ranks 1..n with ties broken by original position (stable)."""
    cdef Py_ssize_t n = values.shape[0]
    order_arr = np.argsort(np.asarray(values), kind="stable")
    ranks_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] order = order_arr
    cdef long long[::1] ranks = ranks_arr
    cdef Py_ssize_t i
    for i in range(n):
        ranks[order[i]] = i + 1
    return ranks_arr


def rank_gap_weighted_sum(long long[::1] ranks, double[::1] true_cdf,
                          double[::1] nu_vals):
    """sum_j (ranks[j]/n - true_cdf[j]) * nu_vals[j] (unnormalized)."""
    cdef Py_ssize_t n = ranks.shape[0]
    cdef Py_ssize_t j
    cdef double inv_n = 1.0 / n
    cdef double acc = 0.0
    for j in range(n):
        acc += (ranks[j] * inv_n - true_cdf[j]) * nu_vals[j]
    return acc
