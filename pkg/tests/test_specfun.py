"""Special functions against mpmath."""

import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hypdot.specfun import (
    DegenerateDegreeError,
    PoleError,
    digamma,
    kummer_1f1_poly,
    legendre_p_near_one,
    legendre_q,
    legendre_q_degrees,
    loggamma,
)

reals = st.floats(-30, 30, allow_nan=False)
imags = st.floats(-20, 20, allow_nan=False)


def pole_distance(z: complex) -> float:
    k = min(round(z.real), 0)
    return abs(z - k)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@given(reals)
def test_digamma_real_matches_mpmath(x):
    assume(pole_distance(complex(x)) > 1e-6)
    ref = float(mpmath.digamma(x))
    assert abs(digamma(x) - ref) <= 1e-12 * max(1.0, abs(ref))


@given(reals, imags)
def test_digamma_complex_matches_mpmath(x, y):
    z = complex(x, y)
    assume(pole_distance(z) > 1e-3)
    ref = complex(mpmath.digamma(z))
    assert abs(digamma(z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_digamma_known_values():
    assert digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-15)
    assert digamma(0.5) == pytest.approx(-0.5772156649015329 - 2 * math.log(2), abs=1e-15)
    # Psi(1.3) = -0.16919...; the sometimes-quoted -0.1877 is wrong
    assert digamma(1.3) == pytest.approx(float(mpmath.digamma(1.3)), abs=1e-15)
    assert digamma(1.3) == pytest.approx(-0.169190, abs=1e-6)


def test_digamma_real_in_real_out():
    assert isinstance(digamma(2.5), float)
    assert isinstance(digamma(2.5 + 0j), complex)


@pytest.mark.parametrize("x", [0, -1, -7, 0.0, -3.0])
def test_digamma_poles(x):
    with pytest.raises(PoleError):
        digamma(x)


def test_digamma_rejects_nonfinite():
    with pytest.raises(ValueError):
        digamma(float("inf"))


@given(st.floats(0.01, 100), st.floats(-10, 10))
def test_loggamma_matches_mpmath(x, y):
    z = complex(x, y)
    ref = complex(mpmath.loggamma(z))
    assert abs(loggamma(z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_loggamma_positive_real_is_float():
    v = loggamma(4.0)
    assert isinstance(v, float)
    assert v == pytest.approx(math.log(6.0), rel=1e-15)
    with pytest.raises(PoleError):
        loggamma(-2)


@given(st.floats(-0.9, 3.0), st.floats(-4, 4), st.integers(0, 3), st.floats(1.001, 6.0))
def test_legendre_q_matches_mpmath(re, im, mu, x):
    nu = complex(re, im)
    assume(abs(im) > 1e-3 or abs(re - round(re)) > 1e-3)
    ref = complex(mpmath.legenq(nu if im else re, mu, x, type=3))
    assert rel(legendre_q(mu, nu, x), ref) < 1e-10


@pytest.mark.parametrize("x", [1.0 + 1e-6, 1.0 + 1e-3, 1.05, 1.5, 3.0, 12.0])
@pytest.mark.parametrize("mu", [0, 1, 2])
def test_legendre_q_degrees_sweep(x, mu):
    nu = complex(0.3, 0.4)
    vals = legendre_q_degrees(nu, mu, x, -12, 12)
    tol = 1e-10 if x - 1 > 1e-5 else 1e-9
    for j in (-12, -3, -1, 0, 1, 4, 12):
        ref = complex(mpmath.legenq(nu + j, mu, x, type=3))
        assert rel(vals[j + 12], ref) < tol


def test_legendre_q_order_convention_near_one():
    # Q^mu_nu(x) ~ (-1)^mu 2^(mu/2-1) Gamma(mu) (x-1)^(-mu/2) as x -> 1+
    nu, d = complex(0.2, 0.7), 1e-9
    for mu in (1, 2, 3):
        lead = (-1) ** mu * 2 ** (mu / 2 - 1) * math.gamma(mu) * d ** (-mu / 2)
        assert rel(legendre_q(mu, nu, 1 + d), lead) < 1e-3


def test_legendre_q_errors():
    with pytest.raises(ValueError):
        legendre_q(0, 0.3, 1.0)
    with pytest.raises(ValueError):
        legendre_q(-1, 0.3, 2.0)
    with pytest.raises(DegenerateDegreeError):
        legendre_q(0, -1.0, 2.0)
    with pytest.raises(DegenerateDegreeError):
        legendre_q_degrees(0.0, 0, 2.0, -3, 0)


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 3), st.floats(1e-8, 1.0))
def test_legendre_p_near_one_matches_mpmath(re, im, mu, d):
    assume(im == 0 or abs(im) > 1e-6)
    nu = complex(re, im)
    with mpmath.workdps(40):
        x = mpmath.mpf(1) + mpmath.mpf(d)  # exact 1 + d, as passed through xm1
        ref = complex(mpmath.legenp(nu if im else re, mu, x, type=3))
    got = legendre_p_near_one(mu, nu, 1 + d, xm1=d)
    assert abs(got - ref) <= 1e-11 * max(abs(ref), 1e-300) + 1e-300


def test_legendre_p_large_degree():
    for nu in (40.3, -61.2, complex(-0.5, 25.0)):
        ref = complex(mpmath.legenp(nu, 1, 1.1, type=3))
        assert rel(legendre_p_near_one(1, nu, 1.1), ref) < 1e-11


def test_legendre_p_vanishes_for_low_integer_degree():
    # (nu - mu + 1)_(2 mu) = 0 when nu is an integer below mu
    assert legendre_p_near_one(2, 1.0, 1.3) == 0


def test_legendre_p_domain():
    with pytest.raises(ValueError):
        legendre_p_near_one(0, 0.3, 2.5)
    with pytest.raises(ValueError):
        legendre_p_near_one(0, 0.3, 1.0)


@given(st.integers(0, 12), st.integers(0, 6), st.floats(0, 40))
def test_kummer_poly_matches_mpmath(n, m, t):
    ref = float(mpmath.hyp1f1(-n, 1 + m, t))
    # the polynomial alternates, so the error is relative to its largest term
    scale = max(1.0, float(mpmath.hyp1f1(-n, 1 + m, -t)))
    assert abs(kummer_1f1_poly(n, m, t) - ref) <= 1e-12 * scale


def test_kummer_poly_exact_in_fractions():
    t = Fraction(3, 7)
    v = kummer_1f1_poly(3, 1, t)
    assert isinstance(v, Fraction)
    # 1F1(-3; 2; t) = 1 - 3t/2 + t^2/2 - t^3/24
    assert v == 1 - Fraction(3, 2) * t + t * t / 2 - t**3 / 24
    assert kummer_1f1_poly(0, 4, t) == 1
    with pytest.raises(ValueError):
        kummer_1f1_poly(-1, 0, 1.0)


def test_q0_branch_consistency():
    # both series branches of Q_nu agree at the switch point x^2 = 2
    nu = complex(0.4, 1.2)
    below, above = legendre_q(0, nu, math.sqrt(2) - 1e-12), legendre_q(0, nu, math.sqrt(2) + 1e-12)
    assert abs(below - above) < 1e-10 * abs(above)
    assert cmath.isfinite(below)
