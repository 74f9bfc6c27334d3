"""Krein Q-function of the Friedrichs extension, point levels and multiplicities.

With lam^0_nu(theta) = -zt - 1/4, theta = -a^4 w^2 / 16, the Q-function of
the rescaled operator a^2 H is

    Qt(zt) = -(1/(4 pi a^2)) (-log 2 - 2 Psi(1) + 2 Psis_nu s_nu)
             + 1 / (2 a^2 tan(nu pi) (e^{i pi (3 nu + 3/2)} K_{-nu-1} / K_nu - 1))
             + log(2 a^2) / (4 pi a^2),

and Q(z) = a^2 Qt(a^2 z).  Poles sit at the m = 0 eigenvalues.  Q increases
between consecutive poles, which brackets the point levels Q(z) = chi.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import oracle
from .specfun import digamma
from .spectrum import (
    SPHEROIDAL_A2_MAX,
    ModelParams,
    SpectrumEntry,
    _table_at_z,
    flat_energy,
    partial_wave_eigenvalues,
)
from .spheroidal import (
    SpheroidalError,
    VanishingSumError,
    _log_tan_pi,
    eigencondition_terms,
    psi_s_sum,
    s_sum,
)

__all__ = [
    "ChiParameter",
    "QCurve",
    "KreinPoleError",
    "KreinAccuracyError",
    "PointLevelBracketError",
    "CoincidenceWarning",
    "q_flat",
    "q_tilde",
    "q_curved",
    "q_curve",
    "poles_below",
    "point_levels",
    "classify_multiplicities",
    "POLE_MARGIN",
    "IMAG_TOL",
]

POLE_MARGIN = 1e-6  # relative exclusion radius around E_{n,0}
IMAG_TOL = 1e-9


class KreinPoleError(ArithmeticError):
    """z is too close to a pole of Q (an m = 0 eigenvalue)."""


class KreinAccuracyError(ArithmeticError):
    """The spheroidal assembly left an imaginary residue above IMAG_TOL."""


class PointLevelBracketError(ArithmeticError):
    pass


class CoincidenceWarning(UserWarning):
    """|Q(E) - chi| is too close to the tolerance to classify reliably."""


@dataclass(frozen=True)
class ChiParameter:
    value: float = math.inf

    def __post_init__(self):
        if math.isnan(self.value) or self.value == -math.inf:
            raise ValueError("chi must be a real number or +inf")

    @property
    def friedrichs(self) -> bool:
        return math.isinf(self.value)

    @property
    def f0_f1(self) -> tuple[float, float]:
        """Boundary data (f_0, f_1) with f_1 : f_0 = chi : 1."""
        return (0.0, 1.0) if self.friedrichs else (1.0, self.value)


@dataclass
class QCurve:
    z: np.ndarray
    q: np.ndarray
    params: ModelParams
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.z.shape != self.q.shape:
            raise ValueError("z and q differ in length")
        if self.z.size > 1 and not np.all(np.diff(self.z) > 0):
            raise ValueError("z grid must be strictly increasing")
        if not np.all(np.isfinite(self.q)):
            raise ValueError("Q values must be finite")


# ---------------------------------------------------------------- flat case


def q_flat(z: float, omega: float = 1.0) -> float:
    """(1/4pi)(-Psi((1 - z/w)/2) + log 2 + 2 Psi(1)) - log(w)/(4pi)."""
    x = 0.5 * (1.0 - z / omega)
    if x <= 0 and abs(x - round(x)) < 1e-14:
        raise KreinPoleError(f"q_flat has a pole at z = {z}")
    val = (-digamma(x) + math.log(2.0) + 2.0 * digamma(1.0)) / (4.0 * math.pi)
    return float(val - math.log(omega) / (4.0 * math.pi))


# ---------------------------------------------------------------- curved case


def _assemble(table, a2):
    nu = table.nu
    l1, l2 = eigencondition_terms(table)
    # e^{i pi(3nu+3/2)} K_{-nu-1}/K_nu = -e^{l1 - l2}
    x = l1 - l2
    if x.real > 0:
        e = cmath.exp(-x)
        inv = -e / (1.0 + e)
    else:
        inv = -1.0 / (cmath.exp(x) + 1.0)
    tan_nu = cmath.exp(_log_tan_pi(nu))
    const = -math.log(2.0) - 2.0 * digamma(1.0) + 2.0 * psi_s_sum(table) * s_sum(table)
    return (-const / (4.0 * math.pi) + inv / (2.0 * tan_nu) + math.log(2.0 * a2) / (4.0 * math.pi)) / a2


def q_tilde(zt: float, params: ModelParams) -> complex:
    """Qt(zt) of a^2 H, complex with its (small) imaginary residue."""
    z = zt / params.a2
    table = _table_at_z(z, 0, params)
    return complex(_assemble(table, params.a2))


@lru_cache(maxsize=64)
def _m0_levels(a: float, omega: float, count: int) -> tuple:
    params = ModelParams(a, omega)
    return tuple(e.energy for e in partial_wave_eigenvalues(0, params, count))


def poles_below(z: float, params: ModelParams) -> list[float]:
    """m = 0 eigenvalues up to (at least) z."""
    if params.flat:
        w = params.omega
        n = max(0, int(math.ceil((z / w - 1.0) / 2.0)) + 1)
        return [flat_energy(k, 0, w) for k in range(n + 1)]
    count = 2
    while True:
        levels = _m0_levels(params.a, params.omega, count)
        if levels[-1] > z:
            return list(levels)
        count *= 2


def _check_pole(z, params):
    for e in poles_below(z, params):
        if abs(z - e) < POLE_MARGIN * max(1.0, abs(e)):
            raise KreinPoleError(f"z = {z} lies within the pole margin of E = {e}")


def q_curved(z: float, params: ModelParams, method: str = "auto") -> float:
    """Krein Q-function Q^H(z) of the Friedrichs extension, real z.

    method: "spheroidal", "ode" or "auto" (spheroidal up to SPHEROIDAL_A2_MAX,
    falling back to the radial ODE above it or when the spheroidal value keeps
    an imaginary residue above IMAG_TOL).
    """
    if params.flat:
        return q_flat(z, params.omega)
    _check_pole(z, params)
    if method == "auto":
        method = "spheroidal" if params.a2 <= SPHEROIDAL_A2_MAX else "ode"
        fallback = True
    else:
        fallback = False
    if method == "spheroidal":
        try:
            val = params.a2 * q_tilde(params.a2 * z, params)
        except (SpheroidalError, VanishingSumError, ZeroDivisionError, OverflowError):
            if not fallback:
                raise
            return oracle.ode_krein_q(z, params.a, params.omega)
        if abs(val.imag) > IMAG_TOL * max(1.0, abs(val.real)):
            if not fallback:
                raise KreinAccuracyError(f"Im Q = {val.imag:.3e} at z = {z}")
            return oracle.ode_krein_q(z, params.a, params.omega)
        return float(val.real)
    if method == "ode":
        return oracle.ode_krein_q(z, params.a, params.omega)
    raise ValueError(f"unknown method {method!r}")


def q_curve(params: ModelParams, z_lo: float, z_hi: float, n: int, margin: float = 1e-3,
            method: str = "auto") -> QCurve:
    """Q on a uniform grid with points near poles dropped (relative margin)."""
    grid = np.linspace(z_lo, z_hi, n)
    poles = poles_below(z_hi, params)
    keep = [z for z in grid if all(abs(z - e) >= margin * max(1.0, abs(e)) for e in poles)]
    vals = [q_curved(z, params, method) for z in keep]
    return QCurve(np.array(keep), np.array(vals), params, {"margin": margin, "poles": poles})


# ---------------------------------------------------------------- point levels


def _q_minus(chi, params, method):
    return lambda z: q_curved(z, params, method) - chi


def _edge(e, side, f, want_sign):
    """Point just inside (E - d or E + d) where f has the wanted sign."""
    d = 1e-3 * max(1.0, abs(e))
    for _ in range(12):
        z = e + side * d
        try:
            v = f(z)
        except KreinPoleError:
            v = None
        if v is not None and np.sign(v) == want_sign:
            return z, v
        d *= 0.25
    raise PointLevelBracketError(f"no sign of Q - chi near the pole E = {e}")


def point_levels(chi: ChiParameter | float, params: ModelParams, count: int,
                 method: str = "auto") -> list[SpectrumEntry]:
    """Lowest `count` solutions of Q(z) = chi, interlacing the m = 0 spectrum."""
    if not isinstance(chi, ChiParameter):
        chi = ChiParameter(float(chi))
    if chi.friedrichs:
        raise ValueError("chi = inf has no point levels (Friedrichs extension)")
    if count < 1:
        raise ValueError("count must be >= 1")
    c = chi.value
    f = _q_minus(c, params, method)
    if params.flat:
        poles = [flat_energy(k, 0, params.omega) for k in range(count)]
    else:
        poles = list(_m0_levels(params.a, params.omega, count))
    out = []
    # below the ground state Q runs from -inf up to +inf at E_00
    hi, fhi = _edge(poles[0], -1, f, 1.0)
    step = max(1.0, abs(hi))
    lo = hi - step
    flo = f(lo)
    k = 0
    while flo > 0:
        lo -= step
        step *= 2.0
        flo = f(lo)
        k += 1
        if k > 60:
            raise PointLevelBracketError(f"Q stays above chi on [{lo}, {hi}]")
    levels = [brentq(f, lo, hi, xtol=1e-13, rtol=1e-14)]
    for n in range(1, count):
        lo, _ = _edge(poles[n - 1], 1, f, -1.0)
        hi, _ = _edge(poles[n], -1, f, 1.0)
        levels.append(brentq(f, lo, hi, xtol=1e-13, rtol=1e-14))
    if params.flat:
        label = "flat"
    elif method == "auto":
        label = "spheroidal" if params.a2 <= SPHEROIDAL_A2_MAX else "ode"
    else:
        label = method
    for n, e in enumerate(levels):
        r = abs(f(e))
        if r > 1e-8:
            raise PointLevelBracketError(f"|Q - chi| = {r:.2e} at eps_{n}")
        out.append(SpectrumEntry(n, 0, float(e), kind="point-level", multiplicity=1, method=label))
    return out


# ---------------------------------------------------------------- multiplicities


def _dq(z, params, method):
    h = 1e-5 * max(1.0, abs(z))
    return (q_curved(z + h, params, method) - q_curved(z - h, params, method)) / (2 * h)


def classify_multiplicities(chi: ChiParameter | float, params: ModelParams,
                            energy_window: tuple[float, float], tol: float = 1e-6,
                            method: str = "auto") -> list[SpectrumEntry]:
    """Spectrum of H(chi) inside energy_window with multiplicities.

    |m| >= 1 levels count +m and -m together (multiplicity 2), upgraded to 3
    when Q(E) = chi within tol * max(1, |Q'(E)|).  Point levels that do not
    coincide with such an E are simple.  chi = inf gives the Friedrichs
    spectrum.  Entries within 10x of the tolerance are flagged with status
    "ambiguous" and a CoincidenceWarning instead of being classified.
    """
    if not isinstance(chi, ChiParameter):
        chi = ChiParameter(float(chi))
    lo, hi = energy_window
    if not hi > lo:
        raise ValueError("empty energy window")
    out = []
    m = 1
    while True:
        count = 1
        while True:
            levels = partial_wave_eigenvalues(m, params, count)
            if levels[-1].energy > hi or count > 64:
                break
            count *= 2
        inside = [e for e in levels if lo <= e.energy <= hi]
        if not inside and levels[0].energy > hi:
            break
        for e in inside:
            mult, status = 2, e.status
            if not chi.friedrichs:
                try:
                    gap = abs(q_curved(e.energy, params, method) - chi.value)
                    thr = tol * max(1.0, abs(_dq(e.energy, params, method)))
                except KreinPoleError:
                    gap, thr = math.inf, 0.0
                if gap < thr:
                    mult = 3
                elif gap < 10.0 * thr:
                    status = "ambiguous"
                    warnings.warn(f"E[{e.n},{m}] = {e.energy}: |Q - chi| = {gap:.2e} near tolerance {thr:.2e}",
                                  CoincidenceWarning)
            out.append(SpectrumEntry(e.n, m, e.energy, "partial-wave", mult, status, e.method))
        m += 1
    triples = [e.energy for e in out if e.multiplicity == 3]
    if chi.friedrichs:
        count = 1
        while True:
            lv = partial_wave_eigenvalues(0, params, count)
            if lv[-1].energy > hi or count > 64:
                break
            count *= 2
        out.extend(e for e in lv if lo <= e.energy <= hi)
    else:
        count = 1
        while True:
            pl = point_levels(chi, params, count, method)
            if pl[-1].energy > hi or count > 64:
                break
            count *= 2
        for e in pl:
            if not lo <= e.energy <= hi:
                continue
            if any(abs(e.energy - t) < 1e-6 * max(1.0, abs(t)) for t in triples):
                continue  # absorbed in the triple level
            out.append(e)
    out.sort(key=lambda e: (e.energy, e.kind, e.m))
    return out
