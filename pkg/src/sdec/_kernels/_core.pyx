# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: SeLU elementwise ops, pairwise distances,
Student's-t soft assignment, and Lloyd accumulation.

Mirrors sdec._kernels._numpy_impl; the package selects between the two
at import time.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, pow

cnp.import_array()

cdef double SELU_LAMBDA = 1.0507009873554804934193349852946
cdef double SELU_ALPHA = 1.6732632423543772848170429916717


def selu(x):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(np.atleast_2d(x), dtype=np.float64)
    cdef Py_ssize_t i, j, n = a.shape[0], m = a.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, m), dtype=np.float64)
    cdef double v
    for i in range(n):
        for j in range(m):
            v = a[i, j]
            if v > 0.0:
                out[i, j] = SELU_LAMBDA * v
            else:
                out[i, j] = SELU_LAMBDA * SELU_ALPHA * expm1(v)
    return out.reshape(np.shape(x))


def selu_grad(x):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(np.atleast_2d(x), dtype=np.float64)
    cdef Py_ssize_t i, j, n = a.shape[0], m = a.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, m), dtype=np.float64)
    cdef double v
    for i in range(n):
        for j in range(m):
            v = a[i, j]
            if v > 0.0:
                out[i, j] = SELU_LAMBDA
            else:
                out[i, j] = SELU_LAMBDA * SELU_ALPHA * exp(v)
    return out.reshape(np.shape(x))


def pairwise_sqdist(x, centroids):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] b = np.ascontiguousarray(centroids, dtype=np.float64)
    cdef Py_ssize_t i, j, t, n = a.shape[0], k = b.shape[0], d = a.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, k), dtype=np.float64)
    cdef double acc, diff
    for i in range(n):
        for j in range(k):
            acc = 0.0
            for t in range(d):
                diff = a[i, t] - b[j, t]
                acc += diff * diff
            out[i, j] = acc
    return out


def student_t_q(z, centroids, double alpha):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(z, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] b = np.ascontiguousarray(centroids, dtype=np.float64)
    cdef Py_ssize_t i, j, t, n = a.shape[0], k = b.shape[0], d = a.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] q = np.empty((n, k), dtype=np.float64)
    cdef double acc, diff, rowsum, expo = -(alpha + 1.0) / 2.0
    for i in range(n):
        rowsum = 0.0
        for j in range(k):
            acc = 0.0
            for t in range(d):
                diff = a[i, t] - b[j, t]
                acc += diff * diff
            if alpha == 1.0:
                acc = 1.0 / (1.0 + acc)
            else:
                acc = pow(1.0 + acc / alpha, expo)
            q[i, j] = acc
            rowsum += acc
        for j in range(k):
            q[i, j] /= rowsum
    return q


def nearest_centroid(x, centroids):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] b = np.ascontiguousarray(centroids, dtype=np.float64)
    cdef Py_ssize_t i, j, t, n = a.shape[0], k = b.shape[0], d = a.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels = np.empty(n, dtype=np.int64)
    cdef double acc, diff, best, inertia = 0.0
    cdef Py_ssize_t best_j
    for i in range(n):
        best = -1.0
        best_j = 0
        for j in range(k):
            acc = 0.0
            for t in range(d):
                diff = a[i, t] - b[j, t]
                acc += diff * diff
            if best < 0.0 or acc < best:
                best = acc
                best_j = j
        labels[i] = best_j
        inertia += best
    return labels, inertia


def label_sums(x, labels, Py_ssize_t k):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lab = np.ascontiguousarray(labels, dtype=np.int64)
    cdef Py_ssize_t i, t, n = a.shape[0], d = a.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] sums = np.zeros((k, d), dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(k, dtype=np.int64)
    cdef Py_ssize_t c
    for i in range(n):
        c = lab[i]
        counts[c] += 1
        for t in range(d):
            sums[c, t] += a[i, t]
    return sums, counts
