"""Spheroidal functions of general characteristic exponent.

Coefficients a_r of the Bessel expansion satisfy the Meixner-Schaefke
three-term recurrence

    A_r a_{r-1} + (B_r - lam) a_r + C_r a_{r+1} = 0,   gamma^2 = 4 theta,

with n = nu + 2r and

    A_r = -g2 (nu-m+2r-1)(nu-m+2r) / ((2nu+4r-3)(2nu+4r-1))
    B_r = n(n+1) - 2 g2 (n(n+1) - 1 + m^2) / ((2nu+4r-1)(2nu+4r+3))
    C_r = -g2 (nu+m+2r+1)(nu+m+2r+2) / ((2nu+4r+3)(2nu+4r+5)).

Tables are normalised by a_0 = 1.  The table of -nu-1 is the reversed
table of nu, so both families share one normalisation.

Two directions are supported: lam from nu (homotopy in theta, as in the
classical definition) and nu from lam (closed form for cos(pi(nu+1/2))
through a Hill determinant, then Newton on the continued fraction).  The
spectrum and Krein code work with the second, because the spectral
parameter fixes lam directly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import mpmath
import numpy as np
from scipy.special import kve

from . import _core
from .specfun import (
    DegenerateDegreeError,
    PoleError,
    digamma,
    legendre_p_near_one,
    legendre_q_degrees,
)

__all__ = [
    "NuFamily",
    "NuPoint",
    "SpheroidalParams",
    "CoefficientTable",
    "SpheroidalError",
    "LatticeError",
    "BranchTrackingError",
    "ComplexEigenvalueError",
    "VanishingSumError",
    "recurrence_coefficients",
    "lambda_eig",
    "lambda_eig_complex",
    "characteristic_exponent",
    "coefficient_table",
    "s_sum",
    "psi_s_sum",
    "log_joining_factors",
    "joining_factor",
    "qs_series",
    "radial_s1",
    "radial_s3",
    "leading_coefficient",
    "alpha_log_coefficient",
]

LATTICE_TOL = 1e-6


class SpheroidalError(ArithmeticError):
    """Base class for failures of the spheroidal engine."""


class LatticeError(SpheroidalError):
    """nu within LATTICE_TOL of the half-integer lattice -1/2 + k."""


class BranchTrackingError(SpheroidalError):
    """Homotopy in theta could not follow a single eigenvalue branch."""


class ComplexEigenvalueError(SpheroidalError):
    """lam came out with an imaginary part above tolerance."""

    def __init__(self, value: complex, msg: str = ""):
        super().__init__(msg or f"eigenvalue {value} is not real")
        self.value = value


class VanishingSumError(SpheroidalError):
    """sum (-1)^r a_r is numerically zero."""


class NuFamily(str, Enum):
    REAL = "real"  # nu = p
    CRITICAL = "critical"  # nu = -1/2 + i p
    SHIFTED = "shifted"  # nu = 1/2 + i p


@dataclass(frozen=True)
class NuPoint:
    family: NuFamily
    parameter: float

    def __post_init__(self):
        object.__setattr__(self, "family", NuFamily(self.family))
        if not math.isfinite(self.parameter):
            raise ValueError("nu parameter must be finite")
        if self.family is NuFamily.REAL:
            k = round(self.parameter + 0.5)
            if abs(self.parameter - (k - 0.5)) < LATTICE_TOL:
                raise LatticeError(f"nu = {self.parameter} is on the half-integer lattice")
        elif self.parameter < 0:
            raise ValueError("line parameter must be >= 0")

    @property
    def value(self) -> complex:
        if self.family is NuFamily.REAL:
            return complex(self.parameter, 0.0)
        if self.family is NuFamily.CRITICAL:
            return complex(-0.5, self.parameter)
        return complex(0.5, self.parameter)

    @classmethod
    def from_complex(cls, nu: complex, tol: float = 1e-7) -> "NuPoint":
        """Classify nu onto a family, folding by nu -> nu + 2 and nu -> -nu-1."""
        nu = complex(nu)
        if abs(nu.imag) <= tol:
            return cls(NuFamily.REAL, nu.real)
        t = abs(nu.imag)
        # nu ~ nu + 2 and nu ~ -nu - 1: fold the real part into [-1/2, 1/2]
        re = (nu.real + 0.5) % 2.0 - 0.5
        if re > 0.5:
            re = 1.0 - re
        if abs(re + 0.5) <= tol:
            return cls(NuFamily.CRITICAL, t)
        if abs(re - 0.5) <= tol:
            return cls(NuFamily.SHIFTED, t)
        raise SpheroidalError(f"nu = {nu} lies on no real-eigenvalue family")


@dataclass(frozen=True)
class SpheroidalParams:
    m: int
    theta: float
    nu: NuPoint

    def __post_init__(self):
        if int(self.m) != self.m:
            raise ValueError("m must be an integer")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")

    @property
    def mu(self) -> int:
        return abs(int(self.m))


@dataclass(frozen=True)
class CoefficientTable:
    params: SpheroidalParams
    nu: complex
    lam: complex
    r_min: int
    r_max: int
    values: np.ndarray = field(repr=False)
    tail_estimate: float
    residual: float

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.r_min, self.r_max + 1)

    @property
    def signs(self) -> np.ndarray:
        return np.where(self.r % 2 == 0, 1.0, -1.0)

    def reflected(self) -> "CoefficientTable":
        """Table of -nu-1 for the same lam: a_{-nu-1,r} = a_{nu,-r}."""
        return CoefficientTable(
            params=self.params,
            nu=-self.nu - 1.0,
            lam=self.lam,
            r_min=-self.r_max,
            r_max=-self.r_min,
            values=self.values[::-1].copy(),
            tail_estimate=self.tail_estimate,
            residual=self.residual,
        )

    def scaled(self, factor: complex) -> "CoefficientTable":
        return CoefficientTable(
            self.params, self.nu, self.lam, self.r_min, self.r_max,
            self.values * factor, self.tail_estimate, self.residual,
        )


def recurrence_coefficients(nu, mu: int, theta: float, r_min: int, r_max: int):
    """Arrays A, B, C of the three-term recurrence for r = r_min..r_max."""
    g2 = 4.0 * theta
    nu = complex(nu)
    k = np.arange(r_min, r_max + 1, dtype=float)
    n = nu + 2 * k
    A = -g2 * (nu + (2 * k - 1 - mu)) * (nu + (2 * k - mu)) / ((2 * nu + 4 * k - 3) * (2 * nu + 4 * k - 1))
    B = n * (n + 1) - 2 * g2 * (n * (n + 1) - 1 + mu * mu) / ((2 * nu + 4 * k - 1) * (2 * nu + 4 * k + 3))
    C = -g2 * (nu + mu + 2 * k + 1) * (nu + mu + 2 * k + 2) / ((2 * nu + 4 * k + 3) * (2 * nu + 4 * k + 5))
    return A.astype(complex), B.astype(complex), C.astype(complex)


def _pivot(A, B, C, lam) -> int:
    """Index of the peak coefficient, where the two continued fractions meet.

    First guess: smallest |B_r - lam|.  Near integer nu the recurrence almost
    decouples and the peak can sit one block over, so one pass of the
    minimal solution decides.
    """
    i0 = int(np.argmin(np.abs(B - lam)))
    a, _ = _core.minimal_solution(complex(lam), A, B, C, i0)
    return int(np.argmax(np.abs(a)))


def _cf(lam, nu, mu, theta, hw, pivot=None):
    """Continued-fraction function, centred on `pivot` (an r value) or the peak."""
    hw = _half_width_for(lam, hw)
    A, B, C = recurrence_coefficients(nu, mu, theta, -hw, hw)
    i0 = _pivot(A, B, C, lam) if pivot is None else pivot + hw
    return _core.cf_function(complex(lam), A, B, C, i0)


def _cf_pivot(lam, nu, mu, theta, hw) -> int:
    hw = _half_width_for(lam, hw)
    A, B, C = recurrence_coefficients(nu, mu, theta, -hw, hw)
    return _pivot(A, B, C, lam) - hw


def _default_half_width(theta: float) -> int:
    c = 2.0 * math.sqrt(abs(theta))
    return int(40 + 2 * math.ceil(c))


def _half_width_for(lam, hw: int) -> int:
    """Widen the table so the peak near r ~ sqrt|lam|/2 sits well inside."""
    return int(math.sqrt(abs(lam)) / 2.0) + hw


# ---------------------------------------------------------------- lam(nu)


def _newton_lam(lam, nu, mu, theta, hw, maxit=40):
    for _ in range(maxit):
        h = 1e-6 * max(1.0, abs(lam))
        r0 = _cf_pivot(lam, nu, mu, theta, hw)
        f = _cf(lam, nu, mu, theta, hw, r0)
        d = (_cf(lam + h, nu, mu, theta, hw, r0) - _cf(lam - h, nu, mu, theta, hw, r0)) / (2 * h)
        if d == 0 or not cmath.isfinite(d):
            return lam, False
        step = f / d
        lam -= step
        if abs(step) < 1e-14 * max(1.0, abs(lam)):
            return lam, True
    return lam, False


def lambda_eig_complex(nu, m: int, theta: float, half_width: int | None = None,
                       max_half_width: int = 640, min_step: float = 1e-7) -> complex:
    """Eigenvalue branch continued from lam(0) = nu(nu+1), without a reality check.

    Homotopy in theta with linear prediction and Newton correction on the
    centred continued fraction; steps are halved when the correction
    strays from the prediction.
    """
    nu = complex(nu)
    mu = abs(int(m))
    lam0 = nu * (nu + 1.0)
    if theta == 0.0:
        return lam0
    hw = half_width or _default_half_width(theta)
    lam_prev, lam = lam0, lam0
    th = 0.0
    step = theta / 16.0
    while th != theta:
        nxt = th + step
        if (step < 0 and nxt < theta) or (step > 0 and nxt > theta):
            nxt = theta
        ds = nxt - th
        slope = (lam - lam_prev) / prev_ds if th != 0.0 else 0.0
        pred = lam + slope * ds
        new, ok = _newton_lam(pred, nu, mu, nxt, hw)
        if ok and abs(new - pred) <= 0.05 * (1.0 + abs(new)):
            lam_prev, lam, th, prev_ds = lam, new, nxt, ds
            step *= 1.5
        else:
            step /= 2.0
            if abs(step) < min_step * max(1.0, abs(theta)):
                raise BranchTrackingError(f"homotopy stalled at theta={th} for nu={nu}, m={m}")
    # truncation refinement
    while True:
        hw2 = 2 * hw
        new, ok = _newton_lam(lam, nu, mu, theta, hw2)
        if ok and abs(new - lam) < 1e-12 * max(1.0, abs(lam)):
            return new
        if hw2 > max_half_width:
            raise SpheroidalError("lambda_eig: no convergence at maximum truncation")
        lam, hw = new, hw2


def lambda_eig(params: SpheroidalParams, half_width: int | None = None,
               imag_tol: float = 1e-10) -> float:
    """Real spheroidal eigenvalue; raises ComplexEigenvalueError when Im lam > imag_tol."""
    lam = lambda_eig_complex(params.nu.value, params.m, params.theta, half_width)
    if abs(lam.imag) > imag_tol:
        raise ComplexEigenvalueError(lam)
    return lam.real


# ---------------------------------------------------------------- nu(lam)


def _hill_sigma(lam: float, mu: int, theta: float, K: int) -> complex:
    """cos(pi(nu+1/2)) from the normalised Hill determinant at nu0 = -1/2 + 1.3i."""
    kappa = cmath.sqrt(lam + 0.25 + 2.0 * theta)
    ck = cmath.cos(math.pi * kappa)
    t0 = 1.3
    s0 = math.cosh(math.pi * t0)
    nu0 = complex(-0.5, t0)
    ks = np.arange(-K - 1, K + 1)
    A, B, C = recurrence_coefficients(nu0, mu, theta, -K - 1, K)
    w = ((nu0 + 0.5 + 2 * ks) ** 2 - kappa**2).astype(complex)
    D = _core.hill_determinant(complex(lam), A, B, C, w)
    return ck - (D - 1.0) * (s0 - ck)


def hill_sigma(lam: float, m: int, theta: float, K: int | None = None) -> float:
    """Richardson-extrapolated cos(pi(nu+1/2)); truncation error is O(K^-3)."""
    mu = abs(int(m))
    K = K or (80 + 2 * int(math.ceil(2.0 * math.sqrt(abs(theta)))))
    s1 = _hill_sigma(lam, mu, theta, K)
    s2 = _hill_sigma(lam, mu, theta, 2 * K)
    return ((8.0 * s2 - s1) / 7.0).real


def _refine_nu(lam, nu, mu, theta, hw, maxit=30, max_shift=1e-4):
    """Newton polish of the Hill estimate; the polish may not move nu far,
    since near integer nu the recurrence decouples and the continued
    fraction has spurious nearby roots."""
    nu0 = nu
    r0 = _cf_pivot(lam, nu, mu, theta, hw)
    f_old = abs(_cf(lam, nu, mu, theta, hw, r0))
    for _ in range(maxit):
        h = 1e-7
        f = _cf(lam, nu, mu, theta, hw, r0)
        d = (_cf(lam, nu + h, mu, theta, hw, r0) - _cf(lam, nu - h, mu, theta, hw, r0)) / (2 * h)
        if d == 0 or not cmath.isfinite(d):
            break
        step = f / d
        trial = nu - step
        if abs(trial - nu0) > max_shift * (1.0 + abs(nu0)):
            return nu0
        f_new = abs(_cf(lam, trial, mu, theta, hw, r0))
        if not f_new <= max(f_old, 1e-300) * 1.5:
            break
        nu, f_old = trial, f_new
        if abs(step) < 1e-15 * max(1.0, abs(nu)):
            break
    return nu


def characteristic_exponent(lam: float, m: int, theta: float) -> NuPoint:
    """A characteristic exponent nu with lam^m_nu(theta) = lam, on one of the families.

    nu is returned in the canonical strip: REAL in [-1/2, 1/2], CRITICAL and
    SHIFTED with parameter >= 0.
    """
    mu = abs(int(m))
    sigma = hill_sigma(lam, mu, theta)
    if not math.isfinite(sigma):
        raise SpheroidalError("characteristic exponent overflow (|theta| or |lam| too large)")
    u = cmath.acos(sigma) / math.pi
    nu = complex(u.real - 0.5, abs(u.imag))
    hw = _default_half_width(theta)
    if abs(1.0 - abs(sigma)) > 1e-8:
        nu = _refine_nu(lam, nu, mu, theta, hw)
    if abs(sigma) <= 1.0:
        nu = complex(min(max(nu.real, -0.5), 0.5), 0.0)
        return NuPoint(NuFamily.REAL, nu.real)
    fam = NuFamily.CRITICAL if sigma > 0 else NuFamily.SHIFTED
    return NuPoint(fam, abs(nu.imag))


# ---------------------------------------------------------------- tables


def coefficient_table(params: SpheroidalParams, lam: complex | None = None,
                      half_width: int | None = None, max_half_width: int = 1280) -> CoefficientTable:
    """Minimal two-sided solution of the recurrence, a_0 = 1."""
    nu = params.nu.value
    mu = params.mu
    if lam is None:
        lam = lambda_eig_complex(nu, params.m, params.theta)
    lam = complex(lam)
    hw = half_width or _half_width_for(lam, _default_half_width(params.theta))
    while True:
        A, B, C = recurrence_coefficients(nu, mu, params.theta, -hw, hw)
        a, resid0 = _core.minimal_solution(lam, A, B, C, _pivot(A, B, C, lam))
        if a[hw] == 0:
            raise SpheroidalError("a_0 underflows relative to the peak coefficient")
        with np.errstate(over="ignore"):
            a = a / a[hw]
        if not np.all(np.isfinite(a)):
            raise SpheroidalError("a_0 underflows relative to the peak coefficient")
        amax = float(np.max(np.abs(a)))
        tail = float(max(abs(a[0]), abs(a[-1]))) / amax
        if tail < 1e-14 or 2 * hw > max_half_width:
            break
        hw *= 2
    if tail >= 1e-14:
        raise SpheroidalError(f"coefficient table tail {tail:.2e} did not decay")
    # relative residual of the recurrence at every interior r
    terms = np.abs(A[1:-1] * a[:-2]) + np.abs((B[1:-1] - lam) * a[1:-1]) + np.abs(C[1:-1] * a[2:])
    res = np.abs(A[1:-1] * a[:-2] + (B[1:-1] - lam) * a[1:-1] + C[1:-1] * a[2:])
    scale = np.maximum(terms, 1e-300 * amax)
    rel = float(np.max(res / scale))
    return CoefficientTable(params, nu, lam, -hw, hw, a, tail, rel)


def _alt_sum(table: CoefficientTable) -> complex:
    return complex(np.sum(table.signs * table.values))


def s_sum(table: CoefficientTable) -> complex:
    """s^m_nu(theta) = 1 / sum (-1)^r a_r."""
    total = _alt_sum(table)
    if abs(total) < 1e-13 * float(np.max(np.abs(table.values))):
        raise VanishingSumError("sum (-1)^r a_r vanishes")
    return 1.0 / total


def psi_s_sum(table: CoefficientTable) -> complex:
    """sum (-1)^r a_r Psi(nu + 1 + 2r), m = 0 only."""
    if table.params.mu != 0:
        raise ValueError("psi_s_sum is defined for m = 0")
    total = 0j
    for r, sg, a in zip(table.r, table.signs, table.values):
        total += sg * a * digamma(table.nu + 1.0 + 2.0 * r)
    return total


# ---------------------------------------------------------------- functions of xi


def _log_sin_pi(nu: complex) -> complex:
    """log sin(pi nu), safe for large |Im nu|."""
    z = math.pi * nu
    if abs(z.imag) < 30.0:
        return cmath.log(cmath.sin(z))
    # sin z = (e^{iz} - e^{-iz}) / 2i ; keep the dominant exponential outside
    if z.imag > 0:
        return -1j * z + cmath.log((cmath.exp(2j * z) - 1.0) / (2j))
    return 1j * z + cmath.log((1.0 - cmath.exp(-2j * z)) / (2j))


def _log_cos_pi(nu: complex) -> complex:
    return _log_sin_pi(nu + 0.5)


def _log_tan_pi(nu: complex) -> complex:
    return _log_sin_pi(nu) - _log_cos_pi(nu)


def _log_qs(table: CoefficientTable, xi: float) -> complex:
    """log Qs^m_nu(xi), summed with the table scaled to its peak."""
    if not xi > 1.0:
        raise ValueError("qs_series needs xi > 1")
    mu = table.params.mu
    q = legendre_q_degrees(table.nu, mu, xi, 2 * table.r_min, 2 * table.r_max)[::2]
    scale = float(np.max(np.abs(table.values)))
    with np.errstate(over="ignore", invalid="ignore"):
        terms = table.signs * (table.values / scale) * q
    if not np.all(np.isfinite(terms)):
        raise SpheroidalError("Qs series overflow")
    return cmath.log(complex(np.sum(terms))) + math.log(scale)


def qs_series(table: CoefficientTable, xi: float) -> complex:
    """Qs^m_nu(xi, theta) = sum (-1)^r a_r Q^m_{nu+2r}(xi)."""
    return cmath.exp(_log_qs(table, xi))


def ps_series(table: CoefficientTable, xi: float, xim1: float | None = None) -> complex:
    """Ps^m_nu(xi, theta) = sum (-1)^r a_r P^m_{nu+2r}(xi), for 1 < xi <= 2.

    The regular solution at xi = 1.  At an eigenvalue S3 is a multiple of it.
    """
    mu = table.params.mu
    total = 0j
    for r, s, a in zip(table.r, table.signs, table.values):
        if a != 0:
            total += s * a * legendre_p_near_one(mu, table.nu + 2 * r, xi, xm1=xim1)
    return total


def _check_lattice(nu: complex):
    if abs(nu.imag) < LATTICE_TOL:
        k = round(nu.real + 0.5)
        if abs(nu.real - (k - 0.5)) < LATTICE_TOL:
            raise LatticeError(f"nu = {nu} on the half-integer lattice")


def _c_of(theta: float) -> float:
    return 2.0 * math.sqrt(-theta)


def _log_bessel_i_scaled(alpha0: complex, y: float, n_pos: int, n_neg: int) -> np.ndarray:
    """log(I_{alpha0+j}(y) e^{-y}) for j = -n_neg..n_pos.

    Upward in order I is minimal, so j >= 0 comes from Miller's algorithm
    normalised at j = 0.  Below alpha0 neither direction is stable for I
    itself, so those orders use I_{-b} = I_b + (2/pi) sin(pi b) K_b with
    b = -alpha0 + N: I_b again by Miller, K_b by upward recurrence (K is
    dominant upward), all in logs because K_b ~ Gamma(N) (2/y)^N.
    """
    out = np.empty(n_pos + n_neg + 1, dtype=complex)
    with np.errstate(divide="ignore"):
        base = complex(mpmath.besseli(alpha0, y) * mpmath.exp(-y))
        up = _core.bessel_backward(alpha0, y, n_pos, 80 + n_pos // 2)
        out[n_neg:] = np.log(up * (base / up[0]))
        if n_neg == 0:
            return out
        b0 = -alpha0
        ib = complex(mpmath.besseli(b0, y) * mpmath.exp(-y))
        iv = _core.bessel_backward(b0, y, n_neg, 80 + n_neg // 2)
        log_i = np.log(iv * (ib / iv[0]))
    k0 = mpmath.besselk(b0, y) * mpmath.exp(y)
    k1 = mpmath.besselk(b0 + 1, y) * mpmath.exp(y)
    log_k = np.empty(n_neg + 1, dtype=complex)
    log_k[0] = complex(mpmath.log(k0))
    ratio = complex(k1 / k0)
    for N in range(1, n_neg + 1):
        if N > 1:
            ratio = 1.0 / ratio + 2.0 * (b0 + N - 1) / y
        log_k[N] = log_k[N - 1] + cmath.log(ratio)
    log_sin = _log_sin_pi(alpha0) + math.log(2.0 / math.pi)
    for N in range(1, n_neg + 1):
        lb = log_sin + 1j * math.pi * (N + 1) + log_k[N] - 2.0 * y
        la = log_i[N]
        if not np.isfinite(la.real):
            out[n_neg - N] = lb
            continue
        hi, lo = (la, lb) if la.real >= lb.real else (lb, la)
        out[n_neg - N] = hi + cmath.log(1.0 + cmath.exp(lo - hi))
    return out


def _log_s1_scaled(table: CoefficientTable, xi: float) -> complex:
    """log S^(1)_nu(xi) from the I-Bessel series; c xi is included."""
    theta = table.params.theta
    c = _c_of(theta)
    y = c * xi
    mu = table.params.mu
    nu = table.nu
    s = s_sum(table)
    log_i = _log_bessel_i_scaled(nu + 0.5, y, 2 * table.r_max, -2 * table.r_min)[::2]
    with np.errstate(divide="ignore"):
        log_t = np.log(table.signs * table.values + 0j) + log_i
    keep = np.isfinite(log_t.real)
    M = float(np.max(log_t.real[keep]))
    series = complex(np.sum(np.exp(log_t[keep] - M)))
    log_pref = (
        -0.5 * mu * math.log(1.0 - xi**-2)
        + cmath.log(s)
        + 0.5 * cmath.log(math.pi / (2j * c * xi))
        + 1j * (nu + 0.5) * math.pi / 2.0
    )
    return log_pref + cmath.log(series) + M + y


def radial_s1(table: CoefficientTable, xi: float) -> complex:
    """Radial spheroidal function of the first kind (I-Bessel series)."""
    return cmath.exp(_log_s1_scaled(table, xi))


def log_joining_factors(table: CoefficientTable, xi0: float = 1.5):
    """(log K_nu, log K_{-nu-1}) from matching S^(1) to its Qs representation at xi0.

    The relation S1_nu = -(sin(nu pi)/pi) e^{-i nu pi} K_nu Qs_{-nu-1} fixes K_nu
    once both sides are evaluated; xi0 is arbitrary (the ratio is constant).
    """
    _check_lattice(table.nu)
    refl = table.reflected()
    out = []
    for tab, other in ((table, refl), (refl, table)):
        nu = tab.nu
        ls1 = _log_s1_scaled(tab, xi0)
        log_den = math.log(1.0 / math.pi) + _log_sin_pi(nu) - 1j * nu * math.pi + _log_qs(other, xi0) + 1j * math.pi
        out.append(ls1 - log_den)
    return out[0], out[1]


def joining_factor(table: CoefficientTable, xi0: float = 1.5) -> complex:
    """K^m_nu(theta) under the a_0 = 1 convention."""
    lk, _ = log_joining_factors(table, xi0)
    if lk.real > 700:
        raise OverflowError("joining factor exceeds double range; use log_joining_factors")
    return cmath.exp(lk)


def radial_s3(table: CoefficientTable, xi: float, log_k=None) -> complex:
    """S^(3)_nu(xi, theta) from the Qs/K combination."""
    _check_lattice(table.nu)
    nu = table.nu
    lkn, lkm = log_k if log_k is not None else log_joining_factors(table)
    qn = qs_series(table, xi)
    qm = qs_series(table.reflected(), xi)
    log_pref = cmath.log(1j) + _log_tan_pi(nu) - math.log(math.pi) + 1j * (nu + 1.0) * math.pi
    t1 = cmath.exp(log_pref + lkm) * qn
    t2 = cmath.exp(log_pref + lkn - 1j * (3 * nu + 0.5) * math.pi) * qm
    return t1 + t2


def _kve(alpha: complex, y: float) -> complex:
    """e^y K_alpha(y) for complex alpha.

    Trapezoid rule on e^y K = int_0^inf exp(-y (cosh t - 1)) cosh(alpha t) dt,
    exponentially accurate since the integrand is entire.  Falls back to
    mpmath when the integrand cancels (large imaginary order, small y).
    """
    if alpha.imag == 0.0:
        return complex(kve(alpha.real, y))
    ar = abs(alpha.real)
    t_max = 1.0
    while y * (math.cosh(t_max) - 1.0) - ar * t_max < 45.0:
        t_max *= 1.25
    t = np.linspace(0.0, t_max, int(t_max / 0.04) + 2)
    f = np.exp(-y * (np.cosh(t) - 1.0)) * np.cosh(alpha * t)
    h = t[1] - t[0]
    val = h * (np.sum(f) - 0.5 * f[0] - 0.5 * f[-1])
    if np.sum(np.abs(f)) * h > 1e4 * abs(val):
        return complex(mpmath.besselk(alpha, y) * mpmath.exp(y))
    return complex(val)


def radial_s3_kseries(table: CoefficientTable, xi: float) -> complex:
    """S^(3)_nu(xi, theta) from its K-Bessel series (decaying, good for large xi).

    Returned without the factor e^{-c xi}: the true value is this times exp(-c xi).
    """
    theta = table.params.theta
    c = _c_of(theta)
    y = c * xi
    mu = table.params.mu
    nu = table.nu
    s = s_sum(table)
    # K by forward recurrence in both directions from two mpmath seeds at r = 0
    i0 = -table.r_min
    n = len(table.r)
    kv = np.empty(2 * n + 1, dtype=complex)  # unit-step orders nu+1/2 + j, j = 2 r_min .. 2 r_max
    j0 = 2 * i0
    a0 = nu + 0.5
    kv[j0] = _kve(a0, y)
    kv[j0 + 1] = _kve(a0 + 1, y)
    for j in range(j0 + 1, 2 * n - 2):
        al = a0 + (j - j0)
        kv[j + 1] = kv[j - 1] + (2 * al / y) * kv[j]
    for j in range(j0, 0, -1):
        al = a0 + (j - j0)
        kv[j - 1] = kv[j + 1] - (2 * al / y) * kv[j]
    series = complex(np.sum(table.signs * table.values * kv[0: 2 * n - 1: 2]))
    pref = (
        -1j * (2.0 / math.pi) * cmath.exp(-1j * (nu + 0.5) * math.pi / 2.0)
        * (1.0 - xi**-2) ** (-0.5 * mu) * s * cmath.sqrt(math.pi / (2j * c * xi))
    )
    return pref * series


def leading_coefficient(table: CoefficientTable, log_k=None) -> complex:
    """Coefficient of (xi-1)^{-m/2} in S^(3) as xi -> 1+, m >= 1."""
    mu = table.params.mu
    if mu < 1:
        raise ValueError("leading_coefficient needs m >= 1; use alpha_log_coefficient")
    nu = table.nu
    lkn, lkm = log_k if log_k is not None else log_joining_factors(table)
    s = s_sum(table)
    lead = (-1) ** mu * 2.0 ** (mu / 2.0 - 1.0) * math.gamma(mu)
    log_pref = _log_tan_pi(nu) - math.log(math.pi) - cmath.log(s) + 1j * (nu + 1.5) * math.pi
    comb = cmath.exp(log_pref + lkm) + cmath.exp(log_pref + lkn - 1j * (3 * nu + 0.5) * math.pi)
    return lead * comb


def alpha_log_coefficient(table: CoefficientTable, log_k=None) -> complex:
    """m = 0 coefficient of log(xi - 1) in S^(3)."""
    if table.params.mu != 0:
        raise ValueError("alpha_log_coefficient is for m = 0")
    nu = table.nu
    if abs(nu.imag) < 1e-14 and abs(nu.real - round(nu.real)) < 1e-12:
        raise PoleError("tan(nu pi) pole at integer nu (removable-limit case)")
    lkn, lkm = log_k if log_k is not None else log_joining_factors(table)
    s = s_sum(table)
    log_pref = (
        cmath.log(1j) + _log_tan_pi(nu) - 1j * (2 * nu + 0.5) * math.pi
        - math.log(2 * math.pi) - cmath.log(s)
    )
    return cmath.exp(log_pref + lkm + 1j * (3 * nu + 0.5) * math.pi) + cmath.exp(log_pref + lkn)


def eigencondition_terms(table: CoefficientTable, xi0: float = 1.5):
    """(log of e^{i(3nu+1/2)pi} K_{-nu-1}, log of K_nu)."""
    lkn, lkm = log_joining_factors(table, xi0)
    return lkm + 1j * (3 * table.nu + 0.5) * math.pi, lkn


__all__ += ["hill_sigma", "radial_s3_kseries", "eigencondition_terms", "DegenerateDegreeError", "ps_series"]
