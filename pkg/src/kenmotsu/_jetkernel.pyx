# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled truncated-Taylor kernels.

Coefficient arrays are laid out as ``(n_monomials, n_columns)``; every
column is an independent jet. ``ia``, ``ib``, ``ic`` enumerate the monomial
pairs ``(alpha, beta)`` with ``alpha + beta = gamma`` inside the truncation.
"""
import numpy as np


def mul(const double[:, ::1] a, const double[:, ::1] b,
        const Py_ssize_t[::1] ia, const Py_ssize_t[::1] ib,
        const Py_ssize_t[::1] ic, Py_ssize_t m_out):
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t nt = ia.shape[0]
    cdef Py_ssize_t t, j, ra, rb, rc
    out = np.zeros((m_out, n))
    cdef double[:, ::1] o = out
    for t in range(nt):
        ra = ia[t]
        rb = ib[t]
        rc = ic[t]
        for j in range(n):
            o[rc, j] += a[ra, j] * b[rb, j]
    return out


def compose(const double[:, ::1] a, const double[:, ::1] taylor,
            const Py_ssize_t[::1] ia, const Py_ssize_t[::1] ib,
            const Py_ssize_t[::1] ic):
    """Evaluate sum_k taylor[k] * (a - a0)^k by Horner's rule.

    ``taylor`` has shape ``(order + 1, n_columns)``.
    """
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t nk = taylor.shape[0]
    cdef Py_ssize_t nt = ia.shape[0]
    cdef Py_ssize_t k, t, j, ra, rb, rc
    acc_arr = np.zeros((m, n))
    tmp_arr = np.zeros((m, n))
    cdef double[:, ::1] acc = acc_arr
    cdef double[:, ::1] tmp = tmp_arr
    for j in range(n):
        acc[0, j] = taylor[nk - 1, j]
    for k in range(nk - 2, -1, -1):
        tmp[:, :] = 0.0
        for t in range(nt):
            ra = ia[t]
            rb = ib[t]
            rc = ic[t]
            # the constant term of the perturbation is zero
            if rb == 0:
                continue
            for j in range(n):
                tmp[rc, j] += acc[ra, j] * a[rb, j]
        for j in range(n):
            tmp[0, j] += taylor[k, j]
        acc[:, :] = tmp
    return acc_arr
