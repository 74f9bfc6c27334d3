# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops (recurrences, continued fractions,
tridiagonal determinants).  Mirrors _kernels_py exactly."""

import numpy as np
cimport numpy as cnp

cdef extern from "complex.h":
    double cabs(double complex)

cdef double _BIG = 1e250


def legendre_backward(nu, double x, Py_ssize_t n, Py_ssize_t extra):
    cdef double complex cnu = complex(nu)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n + 1, dtype=complex)
    cdef double complex f_next = 0, f = 1e-300, fm, al
    cdef Py_ssize_t j, k
    for j in range(n + extra, -1, -1):
        if j <= n:
            out[j] = f
        if j == 0:
            break  # Q_{nu-1} is not needed, and nu = 0 would divide by zero
        al = cnu + j
        fm = ((2 * al + 1) * x * f - (al + 1) * f_next) / al
        f_next = f
        f = fm
        if cabs(f) > _BIG:
            f_next /= _BIG
            f /= _BIG
            if j <= n:
                for k in range(j, n + 1):
                    out[k] /= _BIG
    return out


def bessel_backward(alpha0, double y, Py_ssize_t n, Py_ssize_t extra):
    cdef double complex a0 = complex(alpha0)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n + 1, dtype=complex)
    cdef double complex f_next = 0, f = 1e-300, fm, al
    cdef Py_ssize_t j, k
    for j in range(n + extra, -1, -1):
        if j <= n:
            out[j] = f
        al = a0 + j
        fm = (2 * al / y) * f + f_next
        f_next = f
        f = fm
        if cabs(f) > _BIG:
            f_next /= _BIG
            f /= _BIG
            if j <= n:
                for k in range(j, n + 1):
                    out[k] /= _BIG
    return out


def cf_function(lam, cnp.complex128_t[:] A, cnp.complex128_t[:] B,
                cnp.complex128_t[:] C, Py_ssize_t i0):
    cdef double complex l = complex(lam)
    cdef Py_ssize_t n = B.shape[0], i
    cdef double complex R = 0, L = 0
    for i in range(n - 1, i0, -1):
        R = -A[i] / (B[i] - l + C[i] * R)
    for i in range(0, i0):
        L = -C[i] / (B[i] - l + A[i] * L)
    return complex(B[i0] - l + A[i0] * L + C[i0] * R)


def minimal_solution(lam, cnp.complex128_t[:] A, cnp.complex128_t[:] B,
                     cnp.complex128_t[:] C, Py_ssize_t i0):
    cdef double complex l = complex(lam)
    cdef Py_ssize_t n = B.shape[0], i
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] ratio = np.zeros(n, dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] a = np.zeros(n, dtype=complex)
    cdef double complex R = 0, L = 0, resid
    for i in range(n - 1, i0, -1):
        R = -A[i] / (B[i] - l + C[i] * R)
        ratio[i] = R
    for i in range(0, i0):
        L = -C[i] / (B[i] - l + A[i] * L)
        ratio[i] = L
    a[i0] = 1.0
    for i in range(i0 + 1, n):
        a[i] = a[i - 1] * ratio[i]
    for i in range(i0 - 1, -1, -1):
        a[i] = a[i + 1] * ratio[i]
    resid = B[i0] - l
    if i0 > 0:
        resid += A[i0] * ratio[i0 - 1]
    if i0 + 1 < n:
        resid += C[i0] * ratio[i0 + 1]
    return a, complex(resid)


def hill_determinant(lam, cnp.complex128_t[:] A, cnp.complex128_t[:] B,
                     cnp.complex128_t[:] C, cnp.complex128_t[:] w):
    cdef double complex l = complex(lam)
    cdef Py_ssize_t n = B.shape[0], i
    cdef double complex d2 = 1.0, d1, d
    d1 = (B[0] - l) / w[0]
    for i in range(1, n):
        d = (B[i] - l) / w[i] * d1 - A[i] * C[i - 1] / (w[i] * w[i - 1]) * d2
        d2 = d1
        d1 = d
    return complex(d1)
