import math

import pytest
from hypothesis import HealthCheck, settings

from levy_resolvent import ExponentEvaluator, LevyProcessSpec, QuadratureConfig
from levy_resolvent.levy import ExponentialDensity, TemperedPolynomial

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def brownian():
    return ExponentEvaluator.brownian(0.5)


@pytest.fixture(scope="session")
def symmetric_stable():
    return ExponentEvaluator.stable(1.0, 0.0, 1.5)


@pytest.fixture(scope="session")
def example_spec():
    return LevyProcessSpec(0.0, 0.0, TemperedPolynomial(2.0, 1.0, 1.5, 1.0))


@pytest.fixture(scope="session")
def example_ev(example_spec):
    return ExponentEvaluator.numeric(example_spec)


@pytest.fixture(scope="session")
def gaussian_with_jumps():
    return ExponentEvaluator.numeric(LevyProcessSpec(0.5, 0.3, ExponentialDensity(1.0)))


@pytest.fixture
def tight():
    return QuadratureConfig(rel_tol=1e-11, abs_tol=1e-15)


def rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def stable_c_pm(alpha, c_theta, c_omega):
    """Reference c+- straight from the closed-form stable h, written with Gamma and cos."""
    from scipy.special import gamma

    skew = -c_omega / (c_theta * math.tan(math.pi * alpha / 2))
    den = c_theta * (1 + skew**2 * math.tan(math.pi * alpha / 2) ** 2) * (
        2 * gamma(alpha) * -math.cos(math.pi * alpha / 2))
    return (1 - skew) / den, (1 + skew) / den
