"""Krein Q-function, point levels and multiplicities."""

import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.optimize import brentq

from hypdot import krein, oracle
from hypdot import spheroidal as sph
from hypdot.krein import (
    ChiParameter,
    CoincidenceWarning,
    KreinPoleError,
    QCurve,
    classify_multiplicities,
    point_levels,
    poles_below,
    q_curve,
    q_curved,
    q_flat,
    q_tilde,
)
from hypdot.spectrum import ModelParams, partial_wave_eigenvalues


def between_poles(params, n, k=40, margin=1e-3):
    """k points strictly inside (E_{n-1,0}, E_{n,0}), or below E_00 for n = 0."""
    e = poles_below(0.0, params)
    while len(e) <= n:
        e = poles_below(e[-1] + 1.0, params)
    lo = e[n - 1] if n else e[0] - 3.0
    hi = e[n]
    return np.linspace(lo + margin, hi - margin, k)


# ---------------------------------------------------------------- flat


def test_q_flat_at_zero():
    assert q_flat(0.0) == pytest.approx(0.11954, abs=1e-4)
    exact = (3 * math.log(2) - 0.5772156649015329) / (4 * math.pi)
    assert q_flat(0.0) == pytest.approx(exact, abs=1e-15)


def test_q_flat_at_minus_one():
    assert q_flat(-1.0) == pytest.approx((math.log(2) - 0.5772156649015329) / (4 * math.pi), abs=1e-15)
    assert q_flat(-1.0) == pytest.approx(0.009225, abs=1e-6)


def test_q_flat_pole():
    with pytest.raises(KreinPoleError):
        q_flat(1.0)
    with pytest.raises(KreinPoleError):
        q_flat(5.0)
    assert q_flat(1.0 - 1e-9) > 1e6


@given(st.floats(-20, 20), st.sampled_from([0.5, 1.0, 3.0]))
def test_q_flat_matches_mpmath(z, w):
    x = 0.5 * (1 - z / w)
    assume(x > 0 or abs(x - round(x)) > 1e-6)
    ref = (-mpmath.digamma(x) + mpmath.log(2) - 2 * mpmath.euler - mpmath.log(w)) / (4 * mpmath.pi)
    assert q_flat(z, w) == pytest.approx(float(ref), rel=1e-11, abs=1e-13)


def test_q_flat_frequency_scaling():
    for z in (-2.0, 0.3, 1.7):
        assert q_flat(2 * z, 2.0) == pytest.approx(q_flat(z) - math.log(2) / (4 * math.pi), abs=1e-14)


# ---------------------------------------------------------------- curved


@pytest.mark.parametrize("a2", [0.2, 1.0, 5.0, 24.0])
def test_q_curved_matches_green_function_oracle(a2):
    p = ModelParams.from_a2(a2)
    for z in (-1.5, -0.3, 0.4, 2.0):
        try:
            got = q_curved(z, p, method="spheroidal")
        except KreinPoleError:
            continue
        ref = oracle.ode_krein_q(z, p.a, p.omega)
        assert abs(got - ref) < 1e-8 * max(1.0, abs(ref))


@pytest.mark.parametrize("a2", [0.02, 0.2, 1.0, 5.0])
def test_q_is_real_on_the_real_axis(a2):
    p = ModelParams.from_a2(a2)
    poles = poles_below(7.0, p)
    worst = 0.0
    for z in np.linspace(-3.0, 7.0, 500):
        if any(abs(z - e) < krein.POLE_MARGIN * max(1.0, e) for e in poles):
            continue
        v = q_tilde(p.a2 * z, p)
        worst = max(worst, abs(v.imag) / max(1.0, abs(v.real)))
    assert worst < 1e-9


@pytest.mark.parametrize("a2", [1.0, 5.0])
def test_q_increases_between_poles(a2):
    # a Krein Q-function is Nevanlinna: strictly increasing between its poles
    p = ModelParams.from_a2(a2)
    for n in range(3):
        q = [q_curved(z, p) for z in between_poles(p, n)]
        assert all(x < y for x, y in zip(q, q[1:]))


@pytest.mark.parametrize("a2", [1.0, 5.0])
def test_q_crosses_zero_once_per_gap(a2):
    p = ModelParams.from_a2(a2)
    for n in range(1, 4):
        q = np.array([q_curved(z, p) for z in between_poles(p, n, k=60, margin=1e-4)])
        assert int(np.sum(np.sign(q[1:]) != np.sign(q[:-1]))) == 1


def q_by_direct_inversion(z, p):
    """Second route: lam = -a^2 z - 1/4, then nu by bisection on lambda_eig along the family."""
    lam = p.lam(z)
    # coarse scans on each family, avoiding the branch point nu = -1/2 where
    # the theta-homotopy is ill-conditioned; the first sign change is refined
    scans = (("critical", np.geomspace(0.05, 30.0, 80)), ("real", np.linspace(-0.45, 0.45, 37)))
    for family, grid in scans:
        def f(x):
            return sph.lambda_eig(sph.SpheroidalParams(0, p.theta, sph.NuPoint(family, x))) - lam

        vals = []
        for x in grid:
            try:
                vals.append((x, f(x)))
            except sph.SpheroidalError:
                continue
        for (x0, f0), (x1, f1) in zip(vals, vals[1:]):
            if f0 * f1 <= 0:
                nu = sph.NuPoint(family, brentq(f, x0, x1, xtol=1e-15))
                table = sph.coefficient_table(sph.SpheroidalParams(0, p.theta, nu))
                return p.a2 * krein._assemble(table, p.a2).real
    raise AssertionError(f"no nu found for z = {z}")


@pytest.mark.parametrize("a2,z", [(5.0, 0.4), (5.0, 2.0), (1.0, -0.5), (10.0, 0.9)])
def test_scaling_identity_two_inversion_routes(a2, z):
    p = ModelParams.from_a2(a2)
    assert q_curved(z, p, method="spheroidal") == pytest.approx(q_by_direct_inversion(z, p), abs=1e-9)


def test_q_invariant_under_table_rescaling():
    p = ModelParams.from_a2(5.0)
    for z in (-0.7, 0.4, 2.2):
        table = krein._table_at_z(z, 0, p)
        base = krein._assemble(table, p.a2)
        for c in (1e-3, complex(0.3, -2.0), 7.5e4):
            assert abs(krein._assemble(table.scaled(c), p.a2) - base) < 1e-12 * abs(base)


def test_q_pole_margin():
    p = ModelParams.from_a2(5.0)
    e = poles_below(0.0, p)[0]
    with pytest.raises(KreinPoleError):
        q_curved(e, p)
    with pytest.raises(KreinPoleError):
        q_curved(e * (1 + 1e-7), p)
    assert math.isfinite(q_curved(e * (1 + 1e-4), p))


def test_q_flat_parameters_route_to_closed_form():
    assert q_curved(0.3, ModelParams(math.inf)) == q_flat(0.3)


def test_unknown_method():
    with pytest.raises(ValueError):
        q_curved(0.3, ModelParams.from_a2(5.0), method="magic")


def test_large_a_uses_ode():
    p = ModelParams.from_a2(100.0)
    assert q_curved(0.2, p) == oracle.ode_krein_q(0.2, p.a, p.omega)


def test_flat_convergence_is_monotone():
    zs = np.linspace(-1.0, 0.5, 31)
    sups = [max(abs(q_curved(z, ModelParams.from_a2(a2)) - q_flat(z)) for z in zs) for a2 in (5, 24, 100, 400)]
    assert all(x > y for x, y in zip(sups, sups[1:]))


# ---------------------------------------------------------------- curves


def test_q_curve_clips_poles():
    p = ModelParams.from_a2(5.0)
    c = q_curve(p, -1.0, 5.0, 301, margin=1e-2)
    assert len(c.z) < 301
    for e in c.meta["poles"]:
        assert np.all(np.abs(c.z - e) >= 1e-2 * max(1.0, e))
    assert np.all(np.isfinite(c.q))


def test_qcurve_validation():
    p = ModelParams.from_a2(5.0)
    with pytest.raises(ValueError):
        QCurve([0.0, 1.0], [1.0], p)
    with pytest.raises(ValueError):
        QCurve([1.0, 0.0], [1.0, 2.0], p)
    with pytest.raises(ValueError):
        QCurve([0.0, 1.0], [1.0, math.nan], p)


# ---------------------------------------------------------------- point levels


def test_chi_parameter():
    assert ChiParameter().friedrichs
    assert ChiParameter().f0_f1 == (0.0, 1.0)
    assert ChiParameter(0.3).f0_f1 == (1.0, 0.3)
    for bad in (math.nan, -math.inf):
        with pytest.raises(ValueError):
            ChiParameter(bad)


def test_point_levels_solve_q_equals_chi():
    p = ModelParams.from_a2(5.0)
    for chi in (-1.0, 0.0, 0.05):
        for e in point_levels(chi, p, 3):
            assert abs(q_curved(e.energy, p) - chi) < 1e-8
            assert e.kind == "point-level" and e.multiplicity == 1


def test_ground_point_level_below_ground_state():
    p = ModelParams.from_a2(24.0)
    assert point_levels(0.0, p, 1)[0].energy < partial_wave_eigenvalues(0, p, 1)[0].energy


def test_point_levels_near_flat_limit():
    p = ModelParams.from_a2(1e4)
    got = [e.energy for e in point_levels(0.0, p, 3)]
    want = [brentq(q_flat, -5.0, 1.0 - 1e-9)]
    want += [brentq(q_flat, 2 * k - 1 + 1e-9, 2 * k + 1 - 1e-9) for k in (1, 2)]
    assert np.allclose(got, want, atol=1e-2)


def test_point_levels_flat():
    got = [e.energy for e in point_levels(0.0, ModelParams(math.inf), 2)]
    assert abs(q_flat(got[0])) < 1e-12 and got[0] < 1.0 < got[1] < 3.0


def test_point_levels_validation():
    p = ModelParams.from_a2(5.0)
    with pytest.raises(ValueError):
        point_levels(math.inf, p, 2)
    with pytest.raises(ValueError):
        point_levels(0.0, p, 0)


# ---------------------------------------------------------------- multiplicities


def test_friedrichs_multiplicities():
    p = ModelParams.from_a2(5.0)
    got = classify_multiplicities(ChiParameter(), p, (0.0, 6.0))
    assert [e.energy for e in got] == sorted(e.energy for e in got)
    for e in got:
        assert e.multiplicity == (1 if e.m == 0 else 2)
    assert sum(e.m == 0 for e in got) == 2


def test_near_coincidence_is_flagged():
    p = ModelParams.from_a2(5.0)
    e01 = partial_wave_eigenvalues(1, p, 1)[0].energy
    thr = 1e-6 * max(1.0, abs(krein._dq(e01, p, "auto")))
    chi = q_curved(e01, p) + 3.0 * thr
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        got = classify_multiplicities(chi, p, (0.0, 2.5))
    target = [e for e in got if e.kind == "partial-wave" and e.m == 1 and e.n == 0][0]
    assert target.status == "ambiguous" and target.multiplicity == 2
    assert any(issubclass(x.category, CoincidenceWarning) for x in w)


def test_empty_window_rejected():
    with pytest.raises(ValueError):
        classify_multiplicities(0.0, ModelParams.from_a2(5.0), (3.0, 3.0))
