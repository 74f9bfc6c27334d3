"""Eigenvalues and eigenfunctions of the partial Hamiltonians H_m.

The spectral parameter z of H_m and the spheroidal eigenvalue are tied by
lam = -a^2 z - 1/4 with theta = -a^4 w^2 / 16.  For a given z the
characteristic exponent nu is recovered from lam (see
spheroidal.characteristic_exponent), and z is an eigenvalue when

    E(nu) = e^{i(3nu+1/2)pi} K_{-nu-1} + K_nu = 0.

For the root search E is multiplied by the phase and scale that make it
real on every family:

    G = i e^{i(nu+1)pi/2} tan(nu pi) e^{i(nu+3/2)pi} e^{-i(3nu+1/2)pi} E / s,

normalised by the larger of the two terms, so G stays in [-2, 2].
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from . import oracle
from .specfun import kummer_1f1_poly
from .spheroidal import (
    CoefficientTable,
    LatticeError,
    NuPoint,
    SpheroidalError,
    SpheroidalParams,
    _log_tan_pi,
    characteristic_exponent,
    coefficient_table,
    eigencondition_terms,
    lambda_eig,
    log_joining_factors,
    ps_series,
    radial_s3,
    radial_s3_kseries,
    s_sum,
)

__all__ = [
    "ModelParams",
    "SpectrumEntry",
    "CurveSample",
    "ConditionSample",
    "OracleMismatchWarning",
    "BracketMissError",
    "SPHEROIDAL_A2_MAX",
    "z_from_nu",
    "condition_at_z",
    "eigencondition",
    "partial_wave_eigenvalues",
    "eigenfunction",
    "flat_energy",
    "asymptotic_energy",
    "perturbation_coefficient",
    "kummer_integral",
    "flat_limit_residual",
    "s3_imag_residual",
]

# Above this a^2 the double-precision spheroidal route loses accuracy: on the
# critical line t grows like a^2/3 and the condition terms carry e^{pi t}
# factors that cancel.  Against the radial ODE, Q agrees to 1e-10 at a^2=50,
# 2e-8 at 75 and 1e-6 at 100.  Beyond the cap the ODE takes over.
SPHEROIDAL_A2_MAX = 64.0


class OracleMismatchWarning(UserWarning):
    pass


class BracketMissError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ModelParams:
    a: float
    omega: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError("omega must be positive")

    @classmethod
    def from_a2(cls, a2: float, omega: float = 1.0) -> "ModelParams":
        return cls(math.sqrt(a2) if math.isfinite(a2) else math.inf, omega)

    @property
    def flat(self) -> bool:
        return not math.isfinite(self.a)

    @property
    def a2(self) -> float:
        return self.a * self.a

    @property
    def theta(self) -> float:
        return -(self.a**4) * self.omega**2 / 16.0

    @property
    def curvature(self) -> float:
        return -2.0 / self.a2

    def lam(self, z: float) -> float:
        return -self.a2 * z - 0.25


@dataclass(frozen=True)
class SpectrumEntry:
    n: int
    m: int
    energy: float
    kind: str = "partial-wave"
    multiplicity: int = 1
    status: str = "ok"
    method: str = "spheroidal"

    def __post_init__(self):
        if self.kind not in ("partial-wave", "point-level"):
            raise ValueError("kind must be partial-wave or point-level")
        if self.multiplicity not in (1, 2, 3):
            raise ValueError("multiplicity must be 1, 2 or 3")


@dataclass
class CurveSample:
    grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values differ in length")
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")


@dataclass(frozen=True)
class ConditionSample:
    z: float
    nu: NuPoint
    value: float  # de-phased, normalised real condition
    modulus: float  # |E| / max(|terms|)
    imag_ratio: float


# ---------------------------------------------------------------- nu <-> z


def z_from_nu(nu: NuPoint, m: int, params: ModelParams) -> float:
    """z = -(lam^m_nu(theta) + 1/4) / a^2."""
    if params.flat:
        raise ValueError("z_from_nu needs finite a")
    lam = lambda_eig(SpheroidalParams(m, params.theta, nu))
    return -(lam + 0.25) / params.a2


def _table_at_z(z: float, m: int, params: ModelParams) -> CoefficientTable:
    lam = params.lam(z)
    nu = characteristic_exponent(lam, m, params.theta)
    return coefficient_table(SpheroidalParams(m, params.theta, nu), lam=lam)


def _dephased(table: CoefficientTable, log_terms):
    l1, l2 = log_terms
    nu = table.nu
    M = max(l1.real, l2.real)
    E = cmath.exp(l1 - M) + cmath.exp(l2 - M)
    ph = (
        cmath.log(1j) + 1j * (nu + 1) * math.pi / 2 + _log_tan_pi(nu) - cmath.log(s_sum(table))
        + 1j * (nu + 1.5) * math.pi - 1j * (3 * nu + 0.5) * math.pi
    )
    g = cmath.exp(1j * ph.imag) * E
    return g, abs(E)


def condition_at_z(z: float, m: int, params: ModelParams) -> ConditionSample:
    """Real de-phased eigencondition at spectral parameter z."""
    table = _table_at_z(z, m, params)
    g, mod = _dephased(table, eigencondition_terms(table))
    ratio = abs(g.imag) / max(abs(g), 1e-300)
    return ConditionSample(z, table.params.nu, g.real, mod, ratio)


def eigencondition(nu: NuPoint, m: int, params: ModelParams, lam: float | None = None) -> complex:
    """e^{i(3nu+1/2)pi} K_{-nu-1} + K_nu at theta = -a^4 w^2/16.

    lam defaults to the theta-continued branch through lam(0) = nu(nu+1).
    """
    sp = SpheroidalParams(m, params.theta, nu)
    if lam is None:
        lam = lambda_eig(sp)
    table = coefficient_table(sp, lam=lam)
    l1, l2 = eigencondition_terms(table)
    if max(l1.real, l2.real) > 700:
        raise OverflowError("eigencondition exceeds double range")
    return cmath.exp(l1) + cmath.exp(l2)


# ---------------------------------------------------------------- eigenvalues


def flat_energy(n: int, m: int, omega: float) -> float:
    return (2 * n + abs(m) + 1) * omega


def asymptotic_energy(n: int, m: int, params: ModelParams) -> float:
    mu = abs(m)
    corr = 0.0 if params.flat else (2 * n * (n + mu + 1) + mu + 0.75) / params.a2
    return flat_energy(n, m, params.omega) + corr


def _safe_condition(z, m, params):
    try:
        return condition_at_z(z, m, params)
    except (LatticeError, SpheroidalError, ZeroDivisionError, ValueError, OverflowError):
        return None


def _scan_roots(m, params, count, z_lo, z_hi, dz, cap=8):
    """Sign changes of the de-phased condition, refined and filtered on modulus."""
    roots = []
    zs = np.arange(z_lo, z_hi + 0.5 * dz, dz)
    samples = [_safe_condition(z, m, params) for z in zs]
    for i in range(len(zs) - 1):
        s0, s1 = samples[i], samples[i + 1]
        if s0 is None or s1 is None:
            continue
        if s0.nu.family != s1.nu.family:
            continue  # junction between families: representation changes sign
        if s0.value == 0.0:
            roots.append(zs[i])
            continue
        if s0.value * s1.value > 0:
            continue

        def f(z):
            c = condition_at_z(z, m, params)
            return c.value

        try:
            r = brentq(f, zs[i], zs[i + 1], xtol=1e-14, rtol=1e-15, maxiter=200)
        except (ValueError, SpheroidalError):
            continue
        c = _safe_condition(r, m, params)
        if c is None or c.modulus > 1e-6:
            continue  # pole or representation jump, not a zero
        roots.append(r)
    return roots


def partial_wave_eigenvalues(m: int, params: ModelParams, count: int, certify: bool = True,
                             oracle_rtol: float = 1e-4, method: str = "auto"):
    """Lowest `count` eigenvalues of H_m in ascending order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    mu = abs(int(m))
    if params.flat:
        return [SpectrumEntry(n, m, flat_energy(n, m, params.omega), method="exact") for n in range(count)]
    if method == "auto":
        method = "spheroidal" if params.a2 <= SPHEROIDAL_A2_MAX else "ode"
    ref = oracle.direct_eigenvalues(mu, params.a, params.omega, count) if (certify or method == "ode") else None
    if method == "ode":
        vals = oracle.ode_eigenvalues(mu, params.a, params.omega, count, guesses=ref)
        return [SpectrumEntry(n, m, float(v), method="ode") for n, v in enumerate(vals)]
    spacing = 2.0 * params.omega + 2.0 / params.a2
    dz = 0.04 * spacing
    z_lo = 0.5 * dz
    z_hi = asymptotic_energy(count - 1, mu, params) + 2.0 * spacing
    roots = _scan_roots(mu, params, count, z_lo, z_hi, dz)
    k = 0
    while len(roots) < count and k < 4:
        z_hi += 2 * spacing * (k + 1)
        roots = _scan_roots(mu, params, count, z_lo, z_hi, dz)
        k += 1
    if ref is not None:
        # bracket misses: rescan finely around any oracle level with no root nearby
        for e in ref:
            if not any(abs(r - e) < 1e-3 * max(1.0, e) for r in roots):
                sub = dz
                for _ in range(4):
                    sub /= 4.0
                    extra = _scan_roots(mu, params, 1, e - 4 * sub, e + 4 * sub, sub)
                    if extra:
                        roots.extend(extra)
                        break
        roots = sorted(set(roots))
    roots = sorted(roots)[:count]
    if len(roots) < count:
        raise BracketMissError(f"found {len(roots)} of {count} eigenvalues for m={m}")
    out = []
    for n, r in enumerate(roots):
        status = "ok"
        if ref is not None and abs(r - ref[n]) > oracle_rtol * abs(ref[n]):
            status = "oracle-mismatch"
            warnings.warn(f"E[{n},{m}]={r} vs oracle {ref[n]}", OracleMismatchWarning)
        out.append(SpectrumEntry(n, m, float(r), status=status))
    return out


# ---------------------------------------------------------------- eigenfunctions


def kummer_integral(n: int, m: int, l: int):
    """int_0^inf t^{m+l} e^{-t} 1F1(-n,1+m,t)^2 dt, exact for moderate n+m+l.

    Above n+m+l = 60 the result is returned as a float.  The alternating sum
    cancels by many orders of magnitude, so it is still summed in integers.
    """
    if min(n, m, l) < 0:
        raise ValueError("n, m, l must be non-negative")
    total = Fraction(0)
    for k in range(max(0, n - l), n + 1):
        total += Fraction((-1) ** (n + k) * comb(n, k) * factorial(k + l) * comb(k + m + l, n + m),
                          factorial(k + m))
    exact = factorial(m) ** 2 * total
    return float(exact) if n + m + l > 60 else exact


def perturbation_coefficient(n: int, m: int, omega: float) -> Fraction:
    """(1/12) <Phi, (1 - 4m^2 + w^2 rho^4) Phi> / <Phi, Phi> for the flat oscillator state."""
    mu = abs(m)
    w = Fraction(omega)
    i0 = kummer_integral(n, mu, 0)
    i2 = kummer_integral(n, mu, 2)
    # rho^2 = 2t/w on the flat eigenfunction, so <rho^4> = (2/w)^2 I2/I0
    rho4 = (2 / w) ** 2 * Fraction(i2) / Fraction(i0)
    return (1 - 4 * mu * mu + w * w * rho4) / 12


def flat_limit_residual(n: int, m: int, omega: float, a_sequence) -> CurveSample:
    """|E_{n,m}(a^2) - asymptotic_energy| along increasing a."""
    a_seq = np.asarray(a_sequence, dtype=float)
    if a_seq.size and (np.any(~np.isfinite(a_seq)) or np.any(np.diff(a_seq) <= 0)):
        raise ValueError("a_sequence must be finite and increasing")
    vals = []
    for a in a_seq:
        p = ModelParams(a, omega)
        e = partial_wave_eigenvalues(m, p, n + 1, certify=False)[n].energy
        vals.append(abs(e - asymptotic_energy(n, m, p)))
    return CurveSample(a_seq, np.array(vals), {"n": n, "m": m, "omega": omega})


def _flat_psi(n, m, omega, rho):
    mu = abs(m)
    t = omega * rho * rho / 2.0
    f = np.array([kummer_1f1_poly(n, mu, tt) for tt in np.atleast_1d(t)])
    raw = rho ** (mu + 0.5) * np.exp(-t / 2.0) * f
    # int rho^{2mu+1} e^{-t} F^2 drho = (2/w)^mu / w * I(n, mu, 0)
    norm2 = (2.0 / omega) ** mu / omega * float(kummer_integral(n, mu, 0))
    return raw / math.sqrt(norm2)


class _S3Evaluator:
    """psi~(xi) proportional to S^(3) at a fixed eigen-nu, real-valued."""

    def __init__(self, table: CoefficientTable, xi_switch: float = 2.0):
        self.table = table
        self.log_k = log_joining_factors(table)
        self.xi_switch = xi_switch
        c = 2.0 * math.sqrt(-table.params.theta)
        self.c = c
        ref = 1.0 + 0.5 * (xi_switch - 1.0)
        v = self._raw(ref)
        self.phase = v / abs(v)
        self.scale = abs(v)

    def _raw(self, xi):
        if xi < self.xi_switch:
            return radial_s3(self.table, xi, self.log_k)
        return radial_s3_kseries(self.table, xi) * math.exp(-self.c * xi)

    def __call__(self, xi):
        v = self._raw(xi) / self.phase / self.scale
        return v.real, v.imag


def eigenfunction(n: int, m: int, params: ModelParams, grid) -> CurveSample:
    """Normalised psi_{n,m}(rho) on the given rho grid, positive near the origin."""
    rho = np.asarray(grid, dtype=float)
    if rho.size == 0 or np.any(rho <= 0):
        raise ValueError("grid must be non-empty with rho > 0")
    meta = {"n": n, "m": m, "a": params.a, "omega": params.omega}
    if params.flat:
        psi = _flat_psi(n, m, params.omega, rho)
        meta["energy"] = flat_energy(n, m, params.omega)
        return CurveSample(rho, psi, meta)
    mu = abs(m)
    entry = partial_wave_eigenvalues(mu, params, n + 1, certify=False)[n]
    e = entry.energy
    meta["energy"] = e
    a = params.a
    if entry.method == "ode":
        u, r_max = oracle.radial_eigenfunction(e, mu, a, params.omega)
        meta["rho_max"] = r_max
        meta["method"] = "ode"
        return CurveSample(rho, u(rho), meta)
    table = _table_at_z(e, mu, params)
    s3 = _S3Evaluator(table)
    # S3 is the difference of two Qs series whose singular parts cancel at
    # xi = 1, so near the origin switch to the regular P series instead
    kappa = s3._raw(XI_REGULAR) / ps_series(table, XI_REGULAR) / (s3.phase * s3.scale)

    def psi_raw(r):
        t = r / a
        if t < _T_REGULAR:
            xim1 = 2.0 * math.sinh(0.5 * t) ** 2
            val = (kappa * ps_series(table, 1.0 + xim1, xim1)).real
        else:
            val = s3(math.cosh(t))[0]
        return math.sqrt(math.sinh(t) / a) * val

    r_max = oracle._outer_radius(mu, a, params.omega, e, depth=30.0)
    pts = np.linspace(0.0, r_max, 9)
    if _T_REGULAR * a < r_max:
        pts = np.unique(np.append(pts, _T_REGULAR * a))
    norm2 = 0.0
    with warnings.catch_warnings():
        # the deep tail saturates epsrel; its contribution is negligible
        warnings.simplefilter("ignore", IntegrationWarning)
        for lo, hi in zip(pts[:-1], pts[1:]):
            v, _ = quad(lambda r: psi_raw(r) ** 2, lo, hi, limit=200, epsabs=0.0, epsrel=1e-11)
            norm2 += v
    norm = math.sqrt(norm2)
    sign = 1.0 if psi_raw(min(1e-3 * a, 0.01 * r_max)) > 0 else -1.0
    vals = np.array([sign * psi_raw(r) / norm if r <= 1.5 * r_max else 0.0 for r in rho])
    meta["rho_max"] = r_max
    meta["method"] = "spheroidal"
    return CurveSample(rho, vals, meta)


XI_REGULAR = 1.1
_T_REGULAR = math.acosh(XI_REGULAR)


def s3_imag_residual(n: int, m: int, params: ModelParams, xis) -> float:
    """max |Im| / max |Re| of the phase-fixed S^(3) at an eigenvalue (reality check)."""
    e = partial_wave_eigenvalues(m, params, n + 1, certify=False)[n].energy
    s3 = _S3Evaluator(_table_at_z(e, abs(m), params))
    vals = [s3(x) for x in xis]
    return max(abs(v[1]) for v in vals) / max(abs(v[0]) for v in vals)

