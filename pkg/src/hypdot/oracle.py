"""Brute-force radial solvers, used to validate the spheroidal machinery.

Everything here works directly with the radial operator on (0, inf)

    H_m = -d^2/drho^2 + (m^2 - 1/4) / (a^2 sinh^2(rho/a)) + (a^2 w^2 / 4) sinh^2(rho/a).

Two tools:

* direct_eigenvalues: finite volumes for g = u / sqrt(sinh(rho/a)), the
  function on the hyperbolic plane.  In that variable the Friedrichs
  solution at m = 0 is the bounded one and a zero-flux condition at the
  origin picks it at second order.  Richardson over N and 2N.
* inward_solution: the solution decaying at infinity, integrated inward in
  t = log(rho); its coefficients at the origin give eigenvalue conditions
  and the Krein Q-function independently of any spheroidal function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

__all__ = [
    "DiscretizationConfig",
    "OracleError",
    "potential",
    "direct_eigenvalues",
    "potential_expansion_check",
    "inward_solution",
    "ode_eigenvalues",
    "ode_krein_q",
    "radial_eigenfunction",
]


class OracleError(ArithmeticError):
    """Extrapolation or integration did not converge."""


@dataclass(frozen=True)
class DiscretizationConfig:
    R: float | None = None  # None: chosen from the turning point
    N: int = 2000
    boundary: str = "dirichlet-at-R"
    origin: str = "friedrichs"

    def __post_init__(self):
        if self.N < 10:
            raise ValueError("N too small")
        if self.R is not None and not self.R > 0:
            raise ValueError("R must be positive")


def _sh(rho, a):
    return np.sinh(rho / a) * a if math.isfinite(a) else rho


def potential(m: int, a: float, omega: float, rho):
    """V_m(a, rho)."""
    rho = np.asarray(rho, dtype=float)
    s = _sh(rho, a)
    return (m * m - 0.25) / s**2 + omega**2 * s**2 / 4.0


def _radius(m, a, omega, e_max):
    """Smallest R with V_m(R) >= 3 e_max, plus a margin for the decay."""
    target = 3.0 * max(e_max, 1.0)
    lo, hi = 1e-3, 1.0
    while potential(m, a, omega, hi) < target:
        hi *= 2.0
    R = brentq(lambda r: potential(m, a, omega, r) - target, lo, hi) if potential(m, a, omega, lo) < target else hi
    # a few decay lengths past the turning point
    return R + 6.0 / math.sqrt(target)


def _fv_levels(m, a, omega, count, R, N):
    h = R / N
    rc = (np.arange(N) + 0.5) * h
    rf = np.arange(N + 1) * h
    w = _sh(rc, a)
    wf = _sh(rf, a)
    shift = 0.25 / a**2 if math.isfinite(a) else 0.0
    V = omega**2 * w**2 / 4.0 + m * m / w**2 - shift
    diag = (wf[:-1] + wf[1:]) / h**2
    diag[-1] += wf[-1] / h**2  # ghost point: g(R) = 0
    diag = diag / w + V
    off = -wf[1:-1] / h**2 / np.sqrt(w[:-1] * w[1:])
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))[0]


def direct_eigenvalues(m: int, a: float, omega: float, count: int,
                       config: DiscretizationConfig | None = None, e_max: float | None = None):
    """Lowest `count` eigenvalues of H_m, Richardson-extrapolated over N and 2N."""
    config = config or DiscretizationConfig()
    if count < 1:
        raise ValueError("count must be >= 1")
    mu = abs(int(m))
    if e_max is None:
        e_max = (2 * count + mu + 1) * omega + (2 * count * (count + mu + 1) + mu + 1) / a**2 * 4
    R = config.R if config.R is not None else _radius(mu, a, omega, e_max)
    e1 = _fv_levels(mu, a, omega, count, R, config.N)
    e2 = _fv_levels(mu, a, omega, count, R, 2 * config.N)
    ext = (4.0 * e2 - e1) / 3.0
    if np.any(np.abs(e2 - e1) > 0.01 * np.abs(ext)):
        raise OracleError("finite-volume levels moved by more than 1% between N and 2N")
    return ext


def potential_expansion_check(m: int, a: float, rho: float, omega: float = 1.0):
    """(V_m(a, rho), its expansion through 1/a^2)."""
    if rho == 0:
        raise ValueError("rho must be nonzero")
    exact = float(potential(m, a, omega, rho))
    flat = (m * m - 0.25) / rho**2 + omega**2 * rho**2 / 4.0
    if not math.isfinite(a):
        return exact, flat
    return exact, flat + (0.25 - m * m) / (3.0 * a**2) + omega**2 * rho**4 / (12.0 * a**2)


# ---------------------------------------------------------------- shooting


def _rhs(m, a, omega, z):
    shift = 0.25 / a**2 if math.isfinite(a) else 0.0

    def f(t, y):
        rho = math.exp(t)
        if math.isfinite(a):
            x = rho / a
            s = a * math.sinh(x)
            damp = 1.0 - (x / math.tanh(x) if x > 1e-8 else 1.0 + x * x / 3.0)
        else:
            s = rho
            damp = 0.0
        k = z + shift - omega**2 * s**2 / 4.0 - m * m / s**2
        g, p = y
        return [p, p * damp - rho * rho * k * g]

    return f


def _outer_radius(m, a, omega, z, depth=40.0):
    """Radius beyond the turning point where the WKB exponent reaches `depth`."""
    shift = 0.25 / a**2 if math.isfinite(a) else 0.0

    def W(r):
        s = _sh(r, a)
        return omega**2 * s**2 / 4.0 + m * m / s**2 - shift - z

    r = 0.5
    while W(r) <= 0:
        r *= 1.5
    acc = 0.0
    step = 0.01 * r
    while acc < depth:
        acc += math.sqrt(max(W(r), 0.0)) * step
        r += step
        step = min(step * 1.05, 0.05 * r)
    return r


def inward_solution(z: float, m: int, a: float, omega: float = 1.0,
                    rho0: float = 1e-6, rho_max: float | None = None):
    """Coefficients (A, B) at the origin of the solution decaying at infinity.

    m = 0:   g ~ A log(rho) + B
    m >= 1:  g ~ A rho^{-m} + B rho^{m}
    The overall scale is arbitrary (fixed by the start at rho_max).
    """
    mu = abs(int(m))
    R = rho_max or _outer_radius(mu, a, omega, z)
    shift = 0.25 / a**2 if math.isfinite(a) else 0.0
    s = _sh(R, a)
    kappa = math.sqrt(max(omega**2 * s**2 / 4.0 + mu * mu / s**2 - shift - z, 1e-12))
    y0 = [1e-30, -R * kappa * 1e-30]
    sol = solve_ivp(_rhs(mu, a, omega, z), (math.log(R), math.log(rho0)), y0,
                    method="DOP853", rtol=1e-12, atol=1e-300)
    if not sol.success:
        raise OracleError(sol.message)
    g, p = sol.y[0, -1], sol.y[1, -1]
    t0 = math.log(rho0)
    if mu == 0:
        A = p
        B = g - A * t0
    else:
        A = rho0**mu * (mu * g - p) / (2.0 * mu)
        B = rho0 ** (-mu) * (mu * g + p) / (2.0 * mu)
    scale = math.hypot(A, B)
    return A / scale, B / scale


def ode_eigenvalues(m: int, a: float, omega: float, count: int, guesses=None):
    """Eigenvalues as zeros of the origin coefficient A(z), seeded by finite volumes."""
    if guesses is None:
        guesses = direct_eigenvalues(m, a, omega, count)
    out = []
    for e in guesses:
        half = 0.01 * max(1.0, abs(e))
        R = _outer_radius(abs(m), a, omega, e + half)

        def F(z):
            return inward_solution(z, m, a, omega, rho_max=R)[0]

        lo, hi = e - half, e + half
        flo, fhi = F(lo), F(hi)
        k = 0
        while flo * fhi > 0 and k < 6:
            half *= 0.5
            lo, hi = e - half, e + half
            flo, fhi = F(lo), F(hi)
            k += 1
        if flo * fhi > 0:
            raise OracleError(f"no sign change of the origin coefficient near {e}")
        out.append(brentq(F, lo, hi, xtol=1e-13, rtol=1e-14))
    return np.array(out)


def ode_krein_q(z: float, a: float, omega: float = 1.0) -> float:
    """Krein Q-function of the Friedrichs extension from the Green function constant.

    G(x, 0) = -(1/2pi) log(rho) + Q + o(1) as rho -> 0.
    """
    A, B = inward_solution(z, 0, a, omega)
    return -B / (2.0 * math.pi * A)


def _turning_point(m, a, omega, z):
    shift = 0.25 / a**2 if math.isfinite(a) else 0.0

    def W(r):
        s = _sh(r, a)
        return omega**2 * s**2 / 4.0 + m * m / s**2 - shift - z

    if m:
        # start from the bottom of the well, where s(r)^4 = 4 m^2 / omega^2
        s_min = math.sqrt(2.0 * m / omega)
        top = 1.0
        while _sh(top, a) < s_min:
            top *= 2.0
        lo = brentq(lambda r: _sh(r, a) - s_min, 1e-12, top)
    else:
        lo = 1e-3
    hi = max(1.0, 2.0 * lo)
    while W(hi) < 0:
        hi *= 2.0
    return brentq(W, lo, hi)


def radial_eigenfunction(e: float, m: int, a: float, omega: float = 1.0, rho0: float = 1e-6):
    """u(rho) at an eigenvalue e, normalised in L2(0, inf; drho), positive near 0.

    Outward from rho0 with the regular behaviour g ~ rho^m and inward from the
    decaying end, joined at the outer turning point.  Returns (u, rho_max):
    u is vectorised and vanishes beyond rho_max.
    """
    mu = abs(int(m))
    f = _rhs(mu, a, omega, e)
    R = _outer_radius(mu, a, omega, e, depth=40.0)
    rt = _turning_point(mu, a, omega, e)
    tm = math.log(rt)
    out = solve_ivp(f, (math.log(rho0), tm), [rho0**mu, mu * rho0**mu], method="DOP853",
                    rtol=1e-11, atol=1e-300, dense_output=True, first_step=1e-3)
    shift = 0.25 / a**2 if math.isfinite(a) else 0.0
    s = _sh(R, a)
    kappa = math.sqrt(max(omega**2 * s**2 / 4.0 + mu * mu / s**2 - shift - e, 1e-12))
    inn = solve_ivp(f, (math.log(R), tm), [1e-30, -R * kappa * 1e-30], method="DOP853",
                    rtol=1e-11, atol=1e-300, dense_output=True, first_step=1e-3)
    if not (out.success and inn.success):
        raise OracleError("eigenfunction integration failed")
    scale = out.y[0, -1] / inn.y[0, -1]

    def g(r):
        t = math.log(r)
        if r <= rho0:
            return rho0**mu * (r / rho0) ** mu
        if t <= tm:
            return float(out.sol(t)[0])
        if r >= R:
            return 0.0
        return float(inn.sol(t)[0]) * scale

    def u_raw(r):
        return g(r) * math.sqrt(_sh(r, a))

    pts = np.concatenate([np.geomspace(rho0, rt, 6)[:-1], np.linspace(rt, R, 5)])
    norm2 = sum(quad(lambda r: u_raw(r) ** 2, lo, hi, limit=200, epsabs=0.0, epsrel=1e-10)[0]
                for lo, hi in zip(pts[:-1], pts[1:]))
    c = 1.0 / math.sqrt(norm2)

    def u(rho):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        return np.array([c * u_raw(r) if r > 0 else 0.0 for r in rho])

    return u, R


def flat_eigenfunction_norm(n: int, m: int, omega: float) -> float:
    """Squared L2 norm of rho^{|m|+1/2} e^{-w rho^2/4} 1F1(-n,|m|+1,w rho^2/2) by quadrature."""
    from .specfun import kummer_1f1_poly

    mu = abs(m)

    def f(r):
        return (r ** (mu + 0.5) * math.exp(-omega * r * r / 4) * kummer_1f1_poly(n, mu, omega * r * r / 2)) ** 2

    return quad(f, 0, np.inf, limit=200, epsabs=0, epsrel=1e-12)[0]
