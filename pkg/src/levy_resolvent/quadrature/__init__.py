"""Quadrature engines and special constants."""

from .core import (
    IntegralResult,
    QuadratureConfig,
    combine,
    gauss_kronrod,
    integrate_singular,
)
from .oscillatory import (
    decay_exponent,
    fit_power_exponent,
    integrate_fourier_tail,
    integrate_semi_infinite,
    wynn_epsilon,
)
from .special import c_alpha, gamma_fn, sine_moment, xsin_moment

__all__ = [
    "IntegralResult",
    "QuadratureConfig",
    "c_alpha",
    "c_alpha_quadrature",
    "combine",
    "decay_exponent",
    "fit_power_exponent",
    "gamma_fn",
    "gauss_kronrod",
    "integrate_fourier_tail",
    "integrate_semi_infinite",
    "integrate_singular",
    "sine_moment",
    "wynn_epsilon",
    "xsin_moment",
]


def c_alpha_quadrature(alpha, cfg=None):
    r"""C_alpha by direct quadrature of (1/pi) \int_0^\infty (1 - cos x) x^{-alpha} dx.

    Independent of the Gamma-function closed form; used to cross-check it.
    """
    import numpy as np

    from ..errors import DomainError

    if not 1.0 < alpha < 3.0:
        raise DomainError(f"C_alpha is defined for 1 < alpha < 3, got {alpha!r}")
    cfg = cfg or QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15)
    res = integrate_fourier_tail(lambda t: t ** (-alpha), 1.0, 0.0, cfg,
                                 kind="one_minus_cos", origin_order=-alpha)
    return res.scaled(1.0 / np.pi)
