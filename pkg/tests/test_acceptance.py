"""Acceptance criteria, one test each, at their stated tolerances and time limits.

Every test prints a single "PASS"/"FAIL" line with the measured numbers
before asserting, so a run of this file doubles as the acceptance report.
"""

import math
import time
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from scipy.integrate import quad

from hypdot import cli, krein, oracle
from hypdot import spheroidal as sph
from hypdot.specfun import kummer_1f1_poly
from hypdot.spectrum import (
    ModelParams,
    asymptotic_energy,
    kummer_integral,
    partial_wave_eigenvalues,
    perturbation_coefficient,
)

REFERENCE = {0: (1.0265, 3.162, 5.42), 1: (2.060, 4.259, 6.58)}


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}")
        assert ok, detail

    return emit


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def test_01_reference_table_at_a2_24(report):
    p = ModelParams.from_a2(24.0)
    with Clock() as c:
        solver = {m: [e.energy for e in partial_wave_eigenvalues(m, p, 3)] for m in (0, 1)}
        ora = {m: list(oracle.direct_eigenvalues(m, p.a, p.omega, 3)) for m in (0, 1)}
    errs_s = [abs(solver[m][n] / REFERENCE[m][n] - 1) for m in (0, 1) for n in range(3)]
    errs_o = [abs(ora[m][n] / REFERENCE[m][n] - 1) for m in (0, 1) for n in range(3)]
    ok = max(errs_s) < 5e-3 and max(errs_o) < 5e-3 and c.seconds < 300
    got = " ".join(f"{solver[m][n]:.5f}" for m in (0, 1) for n in range(3))
    report(1, ok, f"solver {got}; worst rel. error solver {max(errs_s):.2%}, oracle {max(errs_o):.2%} "
                  f"(allowed 0.50%); {c.seconds:.0f} s")


def test_02_asymptotic_remainder_is_order_a4(report):
    ratios = {}
    with Clock() as c:
        for n, m in ((0, 0), (1, 0), (0, 1)):
            scaled = []
            for a2 in (50.0, 100.0):
                p = ModelParams.from_a2(a2)
                e = partial_wave_eigenvalues(m, p, n + 1)[n].energy
                scaled.append(abs(e - asymptotic_energy(n, m, p)) * a2**2)
            ratios[n, m] = scaled[0] / scaled[1]
    ok = all(0.5 <= r <= 2.0 for r in ratios.values()) and c.seconds < 600
    report(2, ok, "residual*a^4 ratio 50/100: " + ", ".join(f"{k}={v:.3f}" for k, v in ratios.items())
           + f" (allowed [0.5, 2]); {c.seconds:.0f} s")


def test_03_flat_q_at_zero(report):
    v = krein.q_flat(0.0)
    report(3, abs(v - 0.11954) <= 1e-4, f"q_flat(0) = {v:.6f} (target 0.11954 +- 1e-4)")


def test_04_interlacing(report):
    bad = []
    with Clock() as c:
        for a2 in (1.0, 5.0, 24.0):
            p = ModelParams.from_a2(a2)
            E = [e.energy for e in partial_wave_eigenvalues(0, p, 4)]
            for chi in (-1.0, 0.0, 0.05):
                eps = [e.energy for e in krein.point_levels(chi, p, 4)]
                chain = eps[0] < E[0] and all(E[n - 1] < eps[n] < E[n] for n in range(1, 4))
                if not chain:
                    bad.append((a2, chi))
    ok = not bad and c.seconds < 600
    report(4, ok, f"{9 - len(bad)}/9 (a^2, chi) cases interlace strictly; {c.seconds:.0f} s")


def test_05_negative_ground_point_level(report):
    with Clock() as c:
        eps0 = krein.point_levels(0.0, ModelParams.from_a2(100.0), 1)[0].energy
    report(5, eps0 < 0 and c.seconds < 120, f"eps_0(a^2=100, chi=0) = {eps0:.6f}; {c.seconds:.0f} s")


def _dense_continuation(nu, m, theta, steps=400, hw=60):
    """Branch from nu(nu+1) followed through dense eigenvalues of the truncated recurrence."""
    lam = complex(nu * (nu + 1))
    for th in np.linspace(0.0, theta, steps)[1:]:
        A, B, C = sph.recurrence_coefficients(nu, abs(m), th, -hw, hw)
        ev = np.linalg.eigvals(np.diag(B) + np.diag(A[1:], -1) + np.diag(C[:-1], 1))
        lam = ev[np.argmin(np.abs(ev - lam))]
    return lam


def _lambda_imag(nu, m, theta, stalls):
    try:
        return abs(sph.lambda_eig_complex(nu, m, theta).imag)
    except sph.SpheroidalError:
        # the homotopy stops at a collision of branches; measure the branch another way
        stalls.append(abs(_dense_continuation(nu, m, theta).imag))
        return stalls[-1]


def test_06_reality(report):
    rng = np.random.default_rng(20240611)
    with Clock() as c:
        real, crit, stalls = [], [], []
        while len(real) < 200:
            nu = rng.uniform(-3.0, 3.0)
            if abs((nu + 0.5) - round(nu + 0.5)) < 1e-6:
                continue
            real.append(_lambda_imag(nu, int(rng.integers(-2, 3)), rng.uniform(-10.0, 0.0), stalls))
        for _ in range(200):
            crit.append(_lambda_imag(complex(-0.5, rng.uniform(1e-3, 10.0)), int(rng.integers(-2, 3)),
                                     rng.uniform(-10.0, 0.0), stalls))
        q_worst = 0.0
        defaults = cli.COMMAND_DEFAULTS["qfunction"]
        grid = cli._expand(cli._range(defaults["grid"]))
        for a2 in cli._float_list(defaults["a_squared"]):
            p = ModelParams.from_a2(a2)
            poles = krein.poles_below(grid[-1], p)
            for z in grid:
                if any(abs(z - e) < krein.POLE_MARGIN * max(1.0, e) for e in poles):
                    continue
                v = krein.q_tilde(p.a2 * z, p) * p.a2
                q_worst = max(q_worst, abs(v.imag))
    real_bad = sum(x >= 1e-10 for x in real)
    crit_bad = sum(x >= 1e-10 for x in crit)
    ok = real_bad == 0 and crit_bad == 0 and q_worst < 1e-9 and c.seconds < 300
    report(6, ok, f"real axis {200 - real_bad}/200 (misses: {len(stalls)} branch collisions, "
                  f"continued branch complex in {sum(x >= 1e-10 for x in stalls)}, max |Im lam| {max(stalls, default=0):.2f}), "
                  f"critical line {200 - crit_bad}/200, max |Im Q| = {q_worst:.1e} on the plotted grids; "
                  f"{c.seconds:.0f} s")


def test_07_integral_identity(report):
    with Clock() as c:
        worst = 0.0
        for n in range(7):
            for m in range(7):
                for l in range(7):
                    exact = kummer_integral(n, m, l)
                    num, _ = quad(lambda t: t ** (m + l) * math.exp(-t) * kummer_1f1_poly(n, m, t) ** 2,
                                  0, math.inf, epsabs=0.0, epsrel=1e-13, limit=200)
                    worst = max(worst, abs(num - float(exact)) / float(exact))
        stated = [(n, m) for n in range(7) for m in range(7)
                  if kummer_integral(n, m, 0) != Fraction(factorial(n), factorial(m + n))]
    ok = worst < 1e-10 and not stated and c.seconds < 60
    report(7, ok, f"343 quadratures agree to {worst:.1e} (allowed 1e-10); l=0 value n!/(m+n)! "
                  f"fails exactly in {len(stated)}/49 cases (all m >= 2: the value carries (m!)^2); "
                  f"{c.seconds:.1f} s")


def test_08_perturbation_coefficient(report):
    bad = 0
    for n in range(7):
        for m in range(7):
            want = Fraction(2 * n * (n + m + 1) + m) + Fraction(3, 4)
            got = [perturbation_coefficient(n, m, w) for w in (1.0, 2.0, 0.5)]
            bad += not (got[0] == got[1] == got[2] == want)
    report(8, bad == 0, f"{49 - bad}/49 (n, m) exact and frequency independent")


def test_09_radial_leading_coefficient(report):
    with Clock() as c:
        t = sph.coefficient_table(sph.SpheroidalParams(1, -0.5, sph.NuPoint("real", 0.3)))
        lead = sph.leading_coefficient(t)
        errs = [abs(sph.radial_s3(t, 1.0 + d) * math.sqrt(d) - lead) / abs(lead) for d in (1e-4, 1e-5, 1e-6)]
    ok = errs[0] > errs[1] > errs[2] and errs[2] < 1e-3 and c.seconds < 60
    report(9, ok, "relative errors " + ", ".join(f"{e:.1e}" for e in errs) + f" (last < 1e-3); {c.seconds:.1f} s")


def test_10_flat_q_convergence(report):
    zs = np.linspace(-1.0, 0.5, 61)
    with Clock() as c:
        sups = [max(abs(krein.q_curved(z, ModelParams.from_a2(a2)) - krein.q_flat(z)) for z in zs)
                for a2 in (5.0, 24.0, 100.0, 400.0)]
    monotone = all(x > y for x, y in zip(sups, sups[1:]))
    ok = sups[1] < 0.01 and monotone and c.seconds < 600
    report(10, ok, "sup |q_curved - q_flat| at a^2 = 5, 24, 100, 400: " + ", ".join(f"{s:.4f}" for s in sups)
           + f" (a^2=24 allowed < 0.01; monotone: {monotone}); {c.seconds:.0f} s")


def test_11_multiplicities(report):
    p = ModelParams.from_a2(24.0)
    with Clock() as c:
        generic = krein.classify_multiplicities(0.0, p, (0.0, 7.0))
        e01 = partial_wave_eigenvalues(1, p, 1)[0].energy
        chi_star = krein.q_curved(e01, p)
        tuned = krein.classify_multiplicities(chi_star, p, (0.0, 7.0))
    gen_ok = all(e.multiplicity == 2 for e in generic if e.kind == "partial-wave") and \
        all(e.multiplicity == 1 for e in generic if e.kind == "point-level")
    triples = [(e.n, e.m) for e in tuned if e.multiplicity == 3]
    rest_ok = all(e.multiplicity == (1 if e.kind == "point-level" else 2)
                  for e in tuned if (e.n, e.m) != (0, 1) or e.kind == "point-level")
    n_pw = sum(e.kind == "partial-wave" for e in generic)
    n_pl = sum(e.kind == "point-level" for e in generic)
    ok = gen_ok and triples == [(0, 1)] and rest_ok and c.seconds < 300
    report(11, ok, f"generic chi=0: {n_pw} doubled levels, {n_pl} simple point levels; "
                   f"chi*=Q(E_01): triples at {triples}; {c.seconds:.0f} s")


def test_12_table_is_deterministic(report, tmp_path):
    outs = []
    for k in range(2):
        code = cli.main(["table", "--out", str(tmp_path / str(k))])
        outs.append((code, (tmp_path / str(k) / "table.csv").read_bytes()))
    same = outs[0][1] == outs[1][1]
    report(12, same, f"two table runs byte-identical: {same} ({len(outs[0][1])} bytes)")
