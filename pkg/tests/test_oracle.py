"""The brute-force radial solvers, checked against closed forms and each other."""

import math

import numpy as np
import pytest

from hypdot import oracle
from hypdot.krein import q_flat
from hypdot.oracle import DiscretizationConfig
from hypdot.specfun import kummer_1f1_poly
from hypdot.spectrum import kummer_integral


def test_config_validation():
    DiscretizationConfig(R=10.0, N=100)
    with pytest.raises(ValueError):
        DiscretizationConfig(N=5)
    with pytest.raises(ValueError):
        DiscretizationConfig(R=0.0)


def test_count_validation():
    with pytest.raises(ValueError):
        oracle.direct_eigenvalues(0, 1.0, 1.0, 0)


def test_near_flat_levels():
    vals = oracle.direct_eigenvalues(1, 1e3, 1.0, 3)
    assert np.allclose(vals, [2.0, 4.0, 6.0], atol=1e-3)


@pytest.mark.parametrize("m", [0, 1, 3])
def test_flat_oscillator_levels(m):
    want = [(2 * n + m + 1) * 0.5 for n in range(3)]
    assert np.allclose(oracle.direct_eigenvalues(m, math.inf, 0.5, 3), want, rtol=1e-6)
    assert np.allclose(oracle.ode_eigenvalues(m, math.inf, 0.5, 3), want, rtol=1e-10)


@pytest.mark.parametrize("a2,m", [(24.0, 0), (24.0, 1), (5.0, 2), (1.0, 0)])
def test_discretisation_converged(a2, m):
    a = math.sqrt(a2)
    coarse = oracle.direct_eigenvalues(m, a, 1.0, 3, DiscretizationConfig(N=2000))
    fine = oracle.direct_eigenvalues(m, a, 1.0, 3, DiscretizationConfig(N=4000))
    assert np.all(np.abs(coarse - fine) < 2e-3 * fine)


def test_m_sign_symmetry():
    a = math.sqrt(5.0)
    assert np.array_equal(oracle.direct_eigenvalues(2, a, 1.0, 3), oracle.direct_eigenvalues(-2, a, 1.0, 3))


def test_finite_volume_and_shooting_agree():
    a = math.sqrt(5.0)
    for m in (0, 1):
        fv = oracle.direct_eigenvalues(m, a, 1.0, 3)
        ode = oracle.ode_eigenvalues(m, a, 1.0, 3)
        assert np.allclose(fv, ode, rtol=1e-7)


def test_origin_coefficient_vanishes_at_eigenvalue():
    a = math.sqrt(5.0)
    e = oracle.ode_eigenvalues(1, a, 1.0, 1)[0]
    A, _ = oracle.inward_solution(e, 1, a)
    A_off, _ = oracle.inward_solution(e + 0.05, 1, a)
    assert abs(A) < 1e-8 * abs(A_off)


@pytest.mark.parametrize("z", [-1.0, 0.0, 0.5, 2.2])
def test_flat_krein_q_from_green_function(z):
    assert oracle.ode_krein_q(z, math.inf) == pytest.approx(q_flat(z), abs=1e-8)


def test_flat_eigenfunction_from_shooting():
    n, m, w = 2, 1, 1.0
    u, _ = oracle.radial_eigenfunction(2 * n + m + 1.0, m, math.inf, w)
    rho = np.linspace(0.05, 6.0, 40)
    raw = rho ** (m + 0.5) * np.exp(-w * rho**2 / 4) * np.array([kummer_1f1_poly(n, m, w * r * r / 2) for r in rho])
    ref = raw / math.sqrt(oracle.flat_eigenfunction_norm(n, m, w))
    assert np.max(np.abs(u(rho) - ref)) < 1e-7


@pytest.mark.parametrize("n,m,w", [(0, 0, 1.0), (2, 1, 1.0), (1, 3, 2.0)])
def test_flat_norm_matches_kummer_integral(n, m, w):
    # substitute t = w rho^2 / 2
    want = (2.0 / w) ** m / w * float(kummer_integral(n, m, 0))
    assert oracle.flat_eigenfunction_norm(n, m, w) == pytest.approx(want, rel=1e-10)


def test_potential_expansion_remainder_scales_like_a4():
    res = []
    for a2 in (100.0, 400.0):
        exact, approx = oracle.potential_expansion_check(0, math.sqrt(a2), 1.0)
        res.append(abs(exact - approx) * a2**2)
    assert 0.5 <= res[0] / res[1] <= 2.0


def test_potential_expansion_flat_limit():
    exact, approx = oracle.potential_expansion_check(1, math.inf, 1.3)
    flat = 0.75 / 1.3**2 + 1.3**2 / 4
    assert exact == pytest.approx(flat, rel=1e-15)
    assert approx == pytest.approx(flat, rel=1e-15)


def test_potential_expansion_moderate_a():
    exact, approx = oracle.potential_expansion_check(1, 10.0, 2.0)
    assert math.isfinite(exact) and abs(exact - approx) < 1e-3


def test_potential_expansion_rejects_origin():
    with pytest.raises(ValueError):
        oracle.potential_expansion_check(0, 1.0, 0.0)


def test_potential_is_even_in_m():
    rho = np.linspace(0.1, 3, 7)
    assert np.array_equal(oracle.potential(2, 2.0, 1.0, rho), oracle.potential(-2, 2.0, 1.0, rho))
