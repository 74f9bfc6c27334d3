"""Invariant checks behind `hypdot selftest`.

Each check reports a measured deviation next to the largest one allowed.
A fault can be injected into the joining-factor convention to confirm
that the eigencondition checks notice a wrong convention.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.integrate import quad

from . import krein, oracle, spectrum, spheroidal
from .specfun import kummer_1f1_poly
from .spectrum import ModelParams


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    allowed: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return math.isfinite(self.measured) and self.measured <= self.allowed


FAULT_PHASE = 0.3


@contextmanager
def injected(fault: str):
    """Temporarily perturb a convention; 'none' leaves everything alone."""
    if fault == "none":
        yield
        return
    if fault != "joining-phase":
        raise ValueError(f"unknown fault {fault!r}")
    original = spheroidal.log_joining_factors

    def shifted(table, xi0=1.5):
        lk, lkm = original(table, xi0)
        return lk + 1j * FAULT_PHASE, lkm

    spheroidal.log_joining_factors = shifted
    krein._m0_levels.cache_clear()
    try:
        yield
    finally:
        spheroidal.log_joining_factors = original
        krein._m0_levels.cache_clear()


def _flat_q0():
    exact = float((3 * mpmath.log(2) - mpmath.euler) / (4 * mpmath.pi))
    return abs(krein.q_flat(0.0) - exact), 1e-12


def _lambda_reality():
    worst = 0.0
    for t in (0.4, 1.1, 2.7):
        for m in (0, 1, 2):
            for theta in (-0.3, -4.0, -16.0):
                lam = spheroidal.lambda_eig_complex(complex(-0.5, t), m, theta)
                worst = max(worst, abs(lam.imag))
    return worst, 1e-10


def _lambda_symmetry():
    worst = 0.0
    for nu in (0.23, complex(-0.5, 1.3)):
        for theta in (-0.2, -3.0):
            lp = spheroidal.lambda_eig_complex(nu, 1, theta)
            worst = max(worst, abs(lp - spheroidal.lambda_eig_complex(-nu - 1, 1, theta)) / abs(lp))
            worst = max(worst, abs(lp - spheroidal.lambda_eig_complex(nu, -1, theta)) / abs(lp))
    return worst, 1e-12


def _kummer():
    worst = 0.0
    for n, m, l in ((0, 0, 0), (2, 1, 1), (3, 2, 2), (1, 3, 4)):
        exact = float(spectrum.kummer_integral(n, m, l))
        num, _ = quad(lambda t: t ** (m + l) * math.exp(-t) * kummer_1f1_poly(n, m, t) ** 2,
                      0, math.inf, epsabs=0.0, epsrel=1e-13, limit=200)
        worst = max(worst, abs(num - exact) / abs(exact))
    return worst, 1e-10


def _perturbation():
    worst = 0.0
    for n in range(4):
        for m in range(4):
            want = Fraction(2 * n * (n + m + 1) + m) + Fraction(3, 4)
            for w in (1.0, 2.0, 0.5):
                worst = max(worst, abs(float(spectrum.perturbation_coefficient(n, m, w) - want)))
    return worst, 0.0


def _eigen_oracle():
    p = ModelParams.from_a2(5.0)
    worst = 0.0
    for m in (0, 1):
        got = [e.energy for e in spectrum.partial_wave_eigenvalues(m, p, 3, certify=False)]
        ref = oracle.ode_eigenvalues(m, p.a, p.omega, 3)
        worst = max(worst, float(np.max(np.abs(np.array(got) - ref) / ref)))
    return worst, 1e-8


def _q_oracle():
    p = ModelParams.from_a2(5.0)
    worst = 0.0
    for z in (-0.7, 0.4, 2.2):
        q = krein.q_curved(z, p, method="spheroidal")
        ref = oracle.ode_krein_q(z, p.a, p.omega)
        worst = max(worst, abs(q - ref) / max(1.0, abs(ref)))
    return worst, 1e-8


def _q_reality():
    p = ModelParams.from_a2(5.0)
    worst = 0.0
    for z in (-2.0, -0.7, 0.4, 2.2, 4.5):
        v = krein.q_tilde(p.a2 * z, p)
        worst = max(worst, abs(v.imag) / max(1.0, abs(v.real)))
    return worst, krein.IMAG_TOL


def _s3_reality():
    p = ModelParams.from_a2(5.0)
    r = spectrum.s3_imag_residual(0, 1, p, [1.05, 1.3, 1.8, 2.5])
    return r, 1e-8


def _interlacing():
    p = ModelParams.from_a2(5.0)
    eps = [e.energy for e in krein.point_levels(0.0, p, 3)]
    poles = [e.energy for e in spectrum.partial_wave_eigenvalues(0, p, 3, certify=False)]
    bad = int(not eps[0] < poles[0])
    bad += sum(int(not poles[n - 1] < eps[n] < poles[n]) for n in range(1, 3))
    return float(bad), 0.0


CHECKS = (
    ("flat-q-at-zero", _flat_q0),
    ("lambda-reality-critical-line", _lambda_reality),
    ("lambda-symmetry", _lambda_symmetry),
    ("kummer-integral-identity", _kummer),
    ("perturbation-coefficient", _perturbation),
    ("eigenvalues-vs-ode-oracle", _eigen_oracle),
    ("q-vs-ode-oracle", _q_oracle),
    ("q-reality", _q_reality),
    ("s3-reality", _s3_reality),
    ("point-level-interlacing", _interlacing),
)


def run_checks(fault: str = "none", names=None) -> list[Check]:
    out = []
    with injected(fault):
        for name, fn in CHECKS:
            if names is not None and name not in names:
                continue
            try:
                measured, allowed = fn()
                out.append(Check(name, float(measured), float(allowed)))
            except Exception as exc:  # a crash is a failed check, not a crashed report
                out.append(Check(name, math.inf, 0.0, f"{type(exc).__name__}: {exc}"))
    return out
