"""Exponents, resolvent densities and the renormalized zero resolvent of Levy processes."""

from .asymptotics import (
    AsymptoticReport,
    ExponentLaw,
    FirstMomentTail,
    HeavyTail,
    RegularVariationSpec,
    SecondMoment,
    SlowlyVaryingFn,
    coeff_c_pm,
    coeff_c_pm_zero,
    density_to_exponent_rv,
    empirical_coefficient_estimate,
    exponent_rv_at_zero,
    gaussian_coeff_c_pm,
    ratio_hq_h,
    rv_at_zero,
    rv_from_evaluator,
    rv_from_spec,
)
from .errors import *  # noqa: F401,F403
from .levy import (
    CustomDensity,
    ExponentEvaluator,
    ExponentialDensity,
    LevyProcessSpec,
    OriginHint,
    StableDensity,
    TailHint,
    TemperedPolynomial,
    ZeroMeasure,
    eval_omega,
    eval_psi,
    eval_theta,
    load_spec,
    spec_from_json,
    spec_to_json,
    validate_spec,
)
from .probes import ProbeReport, check_A, check_T, check_Z
from .quadrature import (
    IntegralResult,
    QuadratureConfig,
    c_alpha,
    gamma_fn,
    integrate_fourier_tail,
    integrate_singular,
    sine_moment,
    xsin_moment,
)
from .resolvent import (
    ResolventQuery,
    eval_h,
    eval_h_q,
    eval_r_q,
    evaluate_grid,
    h_q_result,
    h_result,
    hitting_laplace_ratio,
    r_q_result,
)

__version__ = "0.1.0"
