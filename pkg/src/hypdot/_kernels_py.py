"""Pure-Python versions of the hot loops.  Same signatures as _kernels.pyx."""

import numpy as np

_BIG = 1e250


def legendre_backward(nu, x, n, extra):
    """Unnormalised Q_{nu+j}(x), j = 0..n, by backward recurrence in degree."""
    nu = complex(nu)
    out = np.empty(n + 1, dtype=complex)
    f_next = 0j
    f = 1e-300 + 0j
    for j in range(n + extra, -1, -1):
        if j <= n:
            out[j] = f
        if j == 0:
            break  # Q_{nu-1} is not needed, and nu = 0 would divide by zero
        al = nu + j
        # (al+1) Q_{al+1} = (2al+1) x Q_al - al Q_{al-1}
        fm = ((2 * al + 1) * x * f - (al + 1) * f_next) / al
        f_next, f = f, fm
        if abs(f) > _BIG:
            f_next /= _BIG
            f /= _BIG
            if j <= n:
                out[j:] /= _BIG
    return out


def bessel_backward(alpha0, y, n, extra):
    """Unnormalised I_{alpha0+j}(y), j = 0..n, by backward recurrence in order."""
    alpha0 = complex(alpha0)
    out = np.empty(n + 1, dtype=complex)
    f_next = 0j
    f = 1e-300 + 0j
    for j in range(n + extra, -1, -1):
        if j <= n:
            out[j] = f
        al = alpha0 + j
        fm = (2 * al / y) * f + f_next
        f_next, f = f, fm
        if abs(f) > _BIG:
            f_next /= _BIG
            f /= _BIG
            if j <= n:
                out[j:] /= _BIG
    return out


def cf_function(lam, A, B, C, i0):
    """B[i0]-lam + A[i0] L + C[i0] R with L, R the two continued-fraction tails."""
    lam = complex(lam)
    n = len(B)
    R = 0j
    for i in range(n - 1, i0, -1):
        R = -A[i] / (B[i] - lam + C[i] * R)
    L = 0j
    for i in range(0, i0):
        L = -C[i] / (B[i] - lam + A[i] * L)
    return B[i0] - lam + A[i0] * L + C[i0] * R


def minimal_solution(lam, A, B, C, i0):
    """Two-sided minimal solution with a[i0] = 1, plus the residual at i0."""
    lam = complex(lam)
    n = len(B)
    ratio = np.zeros(n, dtype=complex)
    R = 0j
    for i in range(n - 1, i0, -1):
        R = -A[i] / (B[i] - lam + C[i] * R)
        ratio[i] = R
    L = 0j
    for i in range(0, i0):
        L = -C[i] / (B[i] - lam + A[i] * L)
        ratio[i] = L
    a = np.zeros(n, dtype=complex)
    a[i0] = 1.0
    for i in range(i0 + 1, n):
        a[i] = a[i - 1] * ratio[i]
    for i in range(i0 - 1, -1, -1):
        a[i] = a[i + 1] * ratio[i]
    resid = B[i0] - lam + A[i0] * (ratio[i0 - 1] if i0 > 0 else 0) + C[i0] * (
        ratio[i0 + 1] if i0 + 1 < n else 0
    )
    return a, resid


def hill_determinant(lam, A, B, C, w):
    """Determinant of the tridiagonal matrix (M - lam)/w, by the row recurrence."""
    lam = complex(lam)
    n = len(B)
    d_prev2 = 1.0 + 0j
    d_prev = (B[0] - lam) / w[0]
    for i in range(1, n):
        d = (B[i] - lam) / w[i] * d_prev - A[i] * C[i - 1] / (w[i] * w[i - 1]) * d_prev2
        d_prev2, d_prev = d_prev, d
    return d_prev
