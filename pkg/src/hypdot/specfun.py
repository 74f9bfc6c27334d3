"""Classical special functions used by the spheroidal and Krein code.

Digamma is evaluated by pushing the argument up with the recurrence
Psi(x+1) = Psi(x) + 1/x and then summing the asymptotic series.  Log-gamma
is taken from scipy.  Legendre functions of the second kind use the
Hobson convention on the cut x > 1:

    Q^mu_nu(x) ~ (-1)^mu 2^(mu/2-1) Gamma(mu) (x-1)^(-mu/2),  x -> 1+.
"""

from __future__ import annotations

import cmath
import math
from numbers import Number

import numpy as np
from scipy.special import loggamma as _sp_loggamma

from . import _core

__all__ = [
    "PoleError",
    "DegenerateDegreeError",
    "digamma",
    "loggamma",
    "legendre_q",
    "legendre_q_degrees",
    "legendre_p_near_one",
    "kummer_1f1_poly",
]

EULER_GAMMA = 0.57721566490153286061


class PoleError(ValueError):
    """Argument sits on a pole of the function."""


class DegenerateDegreeError(ValueError):
    """Degree/order combination makes the Legendre representation singular."""


# Bernoulli numbers B_2k / (2k) for the digamma asymptotic series
_PSI_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)


def _is_nonpositive_integer(x: complex, tol: float = 0.0) -> bool:
    x = complex(x)
    if abs(x.imag) > tol:
        return False
    r = round(x.real)
    return r <= 0 and abs(x.real - r) <= tol


def digamma(x):
    """Psi(x) for real or complex x.

    Real input gives a float, complex input a complex.  Uses the reflection
    formula for Re x < 1/2 and the recurrence + asymptotic series otherwise.
    """
    is_real = isinstance(x, (int, float, np.floating, np.integer))
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("digamma of non-finite argument")
    if _is_nonpositive_integer(z):
        raise PoleError(f"digamma pole at {x}")
    if z.real < 0.5:
        # Psi(1-z) - Psi(z) = pi cot(pi z)
        # cot has period 1; reducing first keeps pi*z rounding away from the pole
        v = _digamma_right(1.0 - z) - math.pi / cmath.tan(math.pi * (z - round(z.real)))
    else:
        v = _digamma_right(z)
    return v.real if is_real else v


def _digamma_right(z: complex) -> complex:
    acc = 0j
    while abs(z) < 10.0 or z.real < 10.0:
        acc -= 1.0 / z
        z += 1.0
    w = 1.0 / (z * z)
    tail = 0j
    for c in reversed(_PSI_TAIL):
        tail = (tail + c) * w
    return acc + cmath.log(z) - 0.5 / z - tail


def loggamma(x):
    """Principal-branch log Gamma; real for positive real input."""
    if isinstance(x, (int, float, np.floating, np.integer)) and x > 0:
        return float(_sp_loggamma(float(x)))
    z = complex(x)
    if _is_nonpositive_integer(z):
        raise PoleError(f"log-gamma pole at {x}")
    return complex(_sp_loggamma(z))


def _q0_direct(alpha: complex, x: float) -> complex:
    """Q_alpha(x) of order zero, x > 1, complex degree."""
    if _is_nonpositive_integer(alpha + 1.0, 1e-13):
        raise DegenerateDegreeError(f"Q_nu undefined for nu = {alpha}")
    a = alpha / 2 + 1.0
    b = alpha / 2 + 0.5
    if x * x < 2.0:
        # logarithmic case of the hypergeometric series in 1 - 1/x^2
        w = 1.0 - 1.0 / (x * x)
        lw = math.log(w)
        term = 1.0 + 0j
        total = 0j
        ps1 = -EULER_GAMMA
        pa = complex(digamma(complex(a)))
        pb = complex(digamma(complex(b)))
        k = 0
        while True:
            piece = term * (2.0 * ps1 - pa - pb - lw)
            total += piece
            if k > 5 and abs(piece) < 1e-17 * abs(total) and abs(term) < 1e-17 * abs(total):
                break
            term *= (a + k) * (b + k) / ((k + 1) ** 2) * w
            ps1 += 1.0 / (k + 1)
            pa += 1.0 / (a + k)
            pb += 1.0 / (b + k)
            k += 1
            if k > 20000:
                raise ArithmeticError("Legendre log series did not converge")
        return 0.5 * cmath.exp((-alpha - 1.0) * math.log(x)) * total
    z = 1.0 / (x * x)
    c = alpha + 1.5
    term = 1.0 + 0j
    total = 0j
    k = 0
    while True:
        total += term
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        k += 1
        if abs(term) < 1e-17 * abs(total):
            break
        if k > 20000:
            raise ArithmeticError("Legendre series did not converge")
    lp = (
        0.5 * math.log(math.pi)
        + complex(_sp_loggamma(alpha + 1.0))
        - (alpha + 1.0) * math.log(2.0)
        - complex(_sp_loggamma(alpha + 1.5))
        - (alpha + 1.0) * math.log(x)
    )
    return cmath.exp(lp) * total


def legendre_q_degrees(nu: complex, mu: int, x: float, jlo: int, jhi: int) -> np.ndarray:
    """Q^mu_{nu+j}(x) for j = jlo..jhi as a complex array.

    Degrees above nu come from Miller's backward recurrence (Q is minimal as
    the degree grows), degrees below by direct downward recurrence.
    """
    if not x > 1.0:
        raise ValueError("legendre_q needs x > 1")
    if mu < 0:
        raise ValueError("order must be non-negative")
    nu = complex(nu)
    lo = min(jlo, 0) - mu - 1
    hi = max(jhi, 0)
    for j in range(lo, hi + 1):
        if _is_nonpositive_integer(nu + j + 1.0, 1e-13):
            raise DegenerateDegreeError(f"degree {nu + j} hits a Legendre singularity")
    n_up = hi
    # the minimal/dominant ratio shrinks by exp(-2 acosh x) per step, so the
    # start must move far up when x is close to 1
    extra = 60 + n_up // 2 + int(20.0 / math.acosh(x))
    up = _core.legendre_backward(nu, x, n_up, extra)
    q0 = _q0_direct(nu, x)
    vals = np.empty(hi - lo + 1, dtype=complex)
    vals[-lo: -lo + n_up + 1] = up * (q0 / up[0])
    vals[-lo - 1] = _q0_direct(nu - 1.0, x)
    for j in range(-1, lo, -1):
        al = nu + j
        vals[j - 1 - lo] = ((2 * al + 1) * x * vals[j - lo] - (al + 1) * vals[j + 1 - lo]) / al
    if mu > 0:
        al = nu + np.arange(lo, hi + 1)
        sq = math.sqrt(x * x - 1.0)
        prev = vals
        cur = np.empty_like(vals)
        cur[0] = np.nan
        cur[1:] = al[1:] * (x * vals[1:] - vals[:-1]) / sq
        for k in range(mu - 1):
            nxt = -2.0 * (k + 1) * x / sq * cur + (al - k) * (al + k + 1) * prev
            prev, cur = cur, nxt
        vals = cur
    return vals[jlo - lo: jhi - lo + 1]


def legendre_q(mu: int, nu, x: float) -> complex:
    """Q^mu_nu(x) for x > 1, integer mu >= 0, complex nu (Hobson convention)."""
    if not x > 1.0:
        raise ValueError("legendre_q needs x > 1")
    if mu < 0 or int(mu) != mu:
        raise ValueError("order must be a non-negative integer")
    nu = complex(nu)
    if _is_nonpositive_integer(nu + mu + 1.0, 1e-13) or _is_nonpositive_integer(nu + 1.0, 1e-13):
        raise DegenerateDegreeError(f"Q^{mu}_{nu} is singular in this representation")
    if mu == 0:
        return _q0_direct(nu, x)
    return complex(legendre_q_degrees(nu, int(mu), x, 0, 0)[0])


def legendre_p_near_one(mu: int, nu, x: float, tol: float = 1e-16, maxterms: int = 2000,
                        xm1: float | None = None) -> complex:
    """P^mu_nu(x) for 1 < x <= 2 by the hypergeometric series in (1-x)/2.

    P^mu_nu(x) = (x^2-1)^(mu/2) (nu-mu+1)_(2mu) / (2^mu mu!)
                 * 2F1(mu-nu, mu+nu+1; mu+1; (1-x)/2)
    Regular at x = 1, where the Q-based forms cancel badly.  Pass xm1 = x - 1
    when it is known more accurately than x itself.
    """
    if xm1 is None:
        xm1 = x - 1.0
    if not 0.0 < xm1 <= 1.0:
        raise ValueError("legendre_p_near_one needs 1 < x <= 2")
    if mu < 0 or int(mu) != mu:
        raise ValueError("order must be a non-negative integer")
    mu = int(mu)
    nu = complex(nu)
    z = -0.5 * xm1
    term = 1.0 + 0j
    total = term
    for k in range(maxterms):
        term *= ((mu + k) - nu) * (nu + (mu + 1 + k)) / ((mu + 1 + k) * (k + 1)) * z
        total += term
        if abs(term) <= tol * max(abs(total), 1e-300) and k > abs(nu):
            break
    else:
        raise ArithmeticError("P series did not converge")
    pre = 1.0 + 0j
    for k in range(2 * mu):
        pre *= nu + (k + 1 - mu)  # integer part first, or a small nu is lost
    pre /= 2.0**mu * math.factorial(mu)
    return pre * (xm1 * (2.0 + xm1)) ** (0.5 * mu) * total


def kummer_1f1_poly(n: int, m: int, t):
    """1F1(-n; 1+m; t) as a finite sum, by Horner on the term ratios.

    Works for float or Fraction t; Fraction input stays exact.
    """
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    acc = 1
    for k in range(n - 1, -1, -1):
        # ratio of term k+1 to term k
        acc = 1 + acc * t * (k - n) / ((1 + m + k) * (k + 1))
    return acc if not isinstance(acc, int) else acc
