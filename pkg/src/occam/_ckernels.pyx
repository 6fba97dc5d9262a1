# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""
from libc.math cimport sqrt

import numpy as np


def biased_offspring(const double[::1] xstar_sub, const double[::1] x_sub,
                     const double[::1] z, double mu, double[::1] out):
    cdef Py_ssize_t i, n = out.shape[0]
    cdef double d, c, cand_sq = 0.0, inc_sq = 0.0
    for i in range(n):
        d = x_sub[i] - xstar_sub[i]
        inc_sq += d * d
        c = (mu * d + xstar_sub[i]) + z[i]
        if c > 1.0:
            c = 1.0
        elif c < -1.0:
            c = -1.0
        out[i] = c
        d = c - x_sub[i]
        cand_sq += d * d
    return cand_sq, inc_sq


def evolution_update(double[::1] path, double[::1] cov, const double[::1] z,
                     double sigma, double c_c, double c_cov):
    cdef Py_ssize_t i, n = path.shape[0]
    cdef double keep_p = 1.0 - c_c, keep_c = 1.0 - c_cov
    cdef double gain = sqrt(c_c * (2.0 - c_c))
    for i in range(n):
        path[i] = path[i] * keep_p + gain * (z[i] / sigma)
        cov[i] = cov[i] * keep_c + c_cov * path[i] * path[i]


def gather(const double[::1] src, const Py_ssize_t[::1] idx, double[::1] out):
    cdef Py_ssize_t i
    for i in range(idx.shape[0]):
        out[i] = src[idx[i]]


def scatter(double[::1] dst, const Py_ssize_t[::1] idx, const double[::1] vals):
    cdef Py_ssize_t i
    for i in range(idx.shape[0]):
        dst[idx[i]] = vals[i]
