import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from levy_resolvent.errors import DomainError
from levy_resolvent.quadrature import c_alpha, c_alpha_quadrature, gamma_fn, sine_moment, xsin_moment


@pytest.mark.parametrize("x, expected", [(1, 1.0), (5, 24.0), (1.5, math.sqrt(math.pi) / 2)])
def test_gamma_examples(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-14)


def test_gamma_relative_error_against_scipy():
    xs = np.concatenate([np.geomspace(1e-10, 1, 300), np.linspace(1, 170, 2000)])
    worst = max(abs(gamma_fn(x) / special.gamma(x) - 1) for x in xs)
    assert worst <= 1e-13


@given(st.floats(min_value=0.01, max_value=169.0))
def test_gamma_recurrence(x):
    assert gamma_fn(x + 1) == pytest.approx(x * gamma_fn(x), rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, 171.7, float("nan")])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


def test_c_alpha_examples():
    assert c_alpha(2.0) == pytest.approx(0.5, abs=1e-15)
    assert c_alpha(1.5) == pytest.approx(math.sqrt(2 / math.pi), abs=1e-15)
    assert c_alpha(2.5) == pytest.approx(0.5319230405, abs=1e-10)


@pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9, 2.5, 2.9])
def test_c_alpha_matches_own_quadrature(alpha):
    assert abs(c_alpha(alpha) - c_alpha_quadrature(alpha).value) <= 1e-10


@pytest.mark.parametrize("alpha", [1.2, 1.7, 2.3, 2.8])
def test_c_alpha_matches_scipy(alpha):
    # (1/pi) int (1 - cos x) x^-alpha: [0, 1] directly, then QAWF for the cosine tail
    # algebraic weight x^(2 - alpha) carries the endpoint singularity exactly
    head = integrate.quad(lambda x: (1 - math.cos(x)) / x**2 if x else 0.5, 0, 1,
                          weight="alg", wvar=(2 - alpha, 0), epsabs=1e-15)[0]
    flat = 1 / (alpha - 1)
    osc = integrate.quad(lambda x: x**-alpha, 1, np.inf, weight="cos", wvar=1.0)[0]
    assert c_alpha(alpha) == pytest.approx((head + flat - osc) / math.pi, abs=1e-10)


@pytest.mark.parametrize("alpha", [0.9, 1.0, 3.0, 3.2])
def test_c_alpha_domain(alpha):
    with pytest.raises(DomainError):
        c_alpha(alpha)


def test_sine_moment_examples():
    assert sine_moment(1.5) == pytest.approx(0.7978845608, abs=1e-10)
    assert sine_moment(1.25) == pytest.approx(c_alpha(1.25) * math.tan(math.pi / 8), rel=1e-13)
    assert sine_moment(1.0 + 1e-9) == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("alpha", [1.1, 1.25, 1.6, 1.9])
def test_sine_moment_matches_scipy(alpha):
    head = integrate.quad(lambda x: math.sin(x) * x**-alpha, 0, 1, epsabs=1e-14, limit=200)[0]
    tail = integrate.quad(lambda x: x**-alpha, 1, np.inf, weight="sin", wvar=1.0)[0]
    assert sine_moment(alpha) == pytest.approx((head + tail) / math.pi, abs=1e-10)


def test_xsin_moment_examples():
    assert xsin_moment(1.5) == pytest.approx(c_alpha(2.5), rel=1e-14)
    assert xsin_moment(2.0) == pytest.approx(0.25, rel=1e-14)
    assert xsin_moment(2.5) == pytest.approx(0.2127692162, abs=1e-10)


@pytest.mark.parametrize("alpha", [1.3, 2.0, 2.5])
def test_xsin_moment_matches_scipy(alpha):
    def smooth(x):
        return (x - math.sin(x)) / x**3 if x > 1e-4 else 1 / 6 - x * x / 120

    head = integrate.quad(smooth, 0, 1, weight="alg", wvar=(2 - alpha, 0), epsabs=1e-15)[0]
    flat = 1 / (alpha - 1)
    osc = integrate.quad(lambda x: x ** (-alpha - 1), 1, np.inf, weight="sin", wvar=1.0)[0]
    assert xsin_moment(alpha) == pytest.approx((head + flat - osc) / math.pi, abs=1e-10)


@pytest.mark.parametrize("fn, bad", [(sine_moment, 2.0), (sine_moment, 1.0), (xsin_moment, 3.0)])
def test_moment_domains(fn, bad):
    with pytest.raises(DomainError):
        fn(bad)
