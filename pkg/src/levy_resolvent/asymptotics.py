"""Asymptotic coefficients of h at the origin and at infinity, and their empirical checks."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    AssumptionTViolation,
    AssumptionZViolation,
    CaseMismatch,
    DegenerateResolvent,
    DomainError,
    NotApplicable,
    UnstableLimit,
)
from .levy import (
    ClosedFormBrownian,
    ClosedFormStable,
    CustomDensity,
    ExponentEvaluator,
    LevyProcessSpec,
    StableDensity,
    TemperedPolynomial,
    ZeroMeasure,
)
from .probes import PASS, ProbeReport, _extended, check_A, check_T, check_Z, imag_lambda_over_psi
from .quadrature import QuadratureConfig, c_alpha, combine, fit_power_exponent, integrate_singular
from .quadrature.oscillatory import integrate_semi_infinite
from .resolvent import fmt, h_gap_result, h_result, map_ordered

__all__ = [
    "AsymptoticPoint",
    "AsymptoticReport",
    "ExponentLaw",
    "FirstMomentTail",
    "HeavyTail",
    "ProbeReport",
    "RegularVariationSpec",
    "SecondMoment",
    "SlowlyVaryingFn",
    "check_A",
    "check_T",
    "check_Z",
    "coeff_c_pm",
    "coeff_c_pm_zero",
    "density_to_exponent_rv",
    "empirical_coefficient_estimate",
    "exponent_rv_at_zero",
    "gaussian_coeff_c_pm",
    "ratio_hq_h",
    "rv_at_zero",
    "rv_from_evaluator",
    "rv_from_spec",
]

AT_ZERO, AT_INFINITY = "at0", "atInfinity"
# sample points for limits of K-/K+
_K_SAMPLES = {AT_ZERO: np.geomspace(1e-4, 1e-8, 5), AT_INFINITY: np.geomspace(1e4, 1e8, 5)}
_K_SPREAD = 0.05
_K_INFINITE = 1e6
DECAY_FRACTION = 0.1


class SlowlyVaryingFn:
    """Positive function with L(kx)/L(x) -> 1 at 0 or at infinity."""

    def __init__(self, fn: Callable, location: str = AT_INFINITY,
                 potter_delta: Optional[float] = None, label: str = ""):
        if location not in (AT_ZERO, AT_INFINITY):
            raise DomainError(f"location must be {AT_ZERO!r} or {AT_INFINITY!r}")
        self._fn = fn
        self.location = location
        self.potter_delta = potter_delta
        self.label = label

    @classmethod
    def constant(cls, value, location=AT_INFINITY):
        value = float(value)
        return cls(lambda x: np.full(np.shape(x), value), location, label=fmt(value))

    @classmethod
    def coerce(cls, obj, location):
        if isinstance(obj, SlowlyVaryingFn):
            return obj
        if callable(obj):
            return cls(obj, location)
        return cls.constant(obj, location)

    def __call__(self, x):
        out = np.asarray(self._fn(np.asarray(x, dtype=float)), dtype=float)
        return float(out) if out.ndim == 0 else out

    def is_constant(self):
        xs = _K_SAMPLES[self.location]
        v = np.atleast_1d(self(xs))
        return bool(np.all(v == v[0]))

    def potter_check(self, companion_index=None, warn=True):
        """Soft diagnostic L(y)/L(z) <= 2 max((y/z)^d, (z/y)^d) over the asymptotic regime."""
        if self.potter_delta is not None:
            delta = self.potter_delta
        elif companion_index is not None:
            delta = min(companion_index - 1.0, 2.0 - companion_index) / 2.0
        else:
            delta = 0.25
        xs = np.geomspace(1e-8, 1e-4, 9) if self.location == AT_ZERO else np.geomspace(1e4, 1e8, 9)
        v = np.atleast_1d(self(xs))
        if np.any(v <= 0) or not np.all(np.isfinite(v)):
            if warn:
                warnings.warn("slowly varying function is not positive on its regime", RuntimeWarning)
            return False
        ratio = v[:, None] / v[None, :]
        bound = 2.0 * np.maximum((xs[:, None] / xs[None, :]) ** delta,
                                 (xs[None, :] / xs[:, None]) ** delta)
        ok = bool(np.all(ratio <= bound))
        if not ok and warn:
            warnings.warn("Potter-style bound fails for the slowly varying factor", RuntimeWarning)
        return ok


@dataclass(frozen=True)
class RegularVariationSpec:
    """theta ~ c_theta lambda^index L(lambda) and omega ~ c_omega lambda^index L(lambda).

    location is "atInfinity" for lambda -> infinity (behaviour of h at the
    origin) and "at0" for lambda -> 0 (behaviour of h at infinity).
    """

    index: float
    c_theta: float
    c_omega: float
    L: SlowlyVaryingFn = field(default_factory=lambda: SlowlyVaryingFn.constant(1.0))
    location: str = AT_INFINITY

    def __post_init__(self):
        if not self.c_theta > 0:
            raise DomainError(f"c_theta must be positive, got {self.c_theta}")
        if self.location not in (AT_ZERO, AT_INFINITY):
            raise DomainError("location must be 'at0' or 'atInfinity'")

    def to_json(self):
        return {"index": self.index, "cTheta": self.c_theta, "cOmega": self.c_omega,
                "L": self.L.label or "function", "location": self.location}


@dataclass(frozen=True)
class ExponentLaw:
    """One exponent ~ coefficient * lambda^index * L(lambda) as lambda -> 0."""

    index: float
    coefficient: float
    L: SlowlyVaryingFn
    case: str


def _coeff_pair(index, c_theta, c_omega):
    if not 1.0 < index < 2.0:
        raise DomainError(f"index must lie in (1, 2), got {index}")
    if not c_theta > 0:
        raise DomainError("c_theta must be positive")
    pref = c_alpha(index) / (c_theta * c_theta + c_omega * c_omega)
    skew = c_omega / math.tan(0.5 * math.pi * index)
    return pref * (c_theta + skew), pref * (c_theta - skew)


def coeff_c_pm(rv: RegularVariationSpec):
    """(c+, c-) = C_a/(c_theta^2 + c_omega^2) * (c_theta +- c_omega cot(pi a / 2))."""
    return _coeff_pair(rv.index, rv.c_theta, rv.c_omega)


def coeff_c_pm_zero(rv0: RegularVariationSpec):
    """Coefficients of h at infinity from the exponent law at lambda -> 0; same shape as coeff_c_pm."""
    return _coeff_pair(rv0.index, rv0.c_theta, rv0.c_omega)


def _limit_ratio(k_plus: SlowlyVaryingFn, k_minus: SlowlyVaryingFn, location):
    """lim K-/K+ at the given end, with a 5% stability check; may be inf."""
    xs = _K_SAMPLES[location]
    kp = np.atleast_1d(k_plus(xs)).astype(float)
    km = np.atleast_1d(k_minus(xs)).astype(float)
    if np.any(kp < 0) or np.any(km < 0):
        raise DomainError("K+ and K- must be nonnegative")
    if np.all(kp == 0) and np.all(km == 0):
        raise DomainError("K+ and K- vanish together")
    if np.all(km == 0):
        return 0.0
    if np.all(kp == 0):
        return math.inf
    with np.errstate(divide="ignore", over="ignore"):
        r = km / kp
    if np.any(~np.isfinite(r)) or (r[-1] > _K_INFINITE and np.all(np.diff(r) > 0)):
        return math.inf
    spread = (r.max() - r.min()) / max(abs(r.mean()), np.finfo(float).tiny)
    if spread > _K_SPREAD:
        raise UnstableLimit(f"K-/K+ varies by {100 * spread:.2g}% over the sample decade")
    return float(r[-1])


def _skew(k):
    return -1.0 if math.isinf(k) else (1.0 - k) / (1.0 + k)


def _sum_at_reciprocal(k_plus, k_minus, location):
    def L(lam):
        y = 1.0 / np.asarray(lam, dtype=float)
        return np.asarray(k_plus(y), dtype=float) + np.asarray(k_minus(y), dtype=float)

    label = ""
    if k_plus.is_constant() and k_minus.is_constant():
        label = fmt(float(np.atleast_1d(L(np.array([1.0])))[0]))
    return SlowlyVaryingFn(L, location, label=label)


def density_to_exponent_rv(alpha, k_plus, k_minus) -> RegularVariationSpec:
    """Exponent law at infinity for a density K+-(x) x^{-alpha-1} with K+- slowly varying at 0."""
    if not 1.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (1, 2), got {alpha}")
    kp = SlowlyVaryingFn.coerce(k_plus, AT_ZERO)
    km = SlowlyVaryingFn.coerce(k_minus, AT_ZERO)
    k = _limit_ratio(kp, km, AT_ZERO)
    c_theta = math.pi * c_alpha(alpha + 1.0)
    c_omega = _skew(k) * math.pi * c_alpha(alpha) / alpha
    return RegularVariationSpec(alpha, c_theta, c_omega, _sum_at_reciprocal(kp, km, AT_INFINITY),
                                AT_INFINITY)


def rv_from_evaluator(ev: ExponentEvaluator) -> RegularVariationSpec:
    """Exact law of a closed-form stable evaluator (L = 1)."""
    if not isinstance(ev.mode, ClosedFormStable):
        raise NotApplicable("only closed-form stable evaluators carry an exact law")
    m = ev.mode
    return RegularVariationSpec(m.alpha, m.c_theta, m.c_omega)


def rv_from_spec(spec: LevyProcessSpec) -> RegularVariationSpec:
    """Law at infinity for the built-in families and hinted custom densities (a = 0)."""
    if spec.a != 0:
        raise NotApplicable("a > 0: h is governed by the Gaussian coefficient near the origin")
    m = spec.measure
    if isinstance(m, StableDensity):
        return density_to_exponent_rv(m.alpha, m.k_plus, m.k_minus)
    if isinstance(m, TemperedPolynomial):
        def slow(k):
            return lambda x: k * (1.0 + np.asarray(x, dtype=float)) ** (m.alpha - m.beta_tail)

        rv = density_to_exponent_rv(m.alpha, slow(m.k_plus), slow(m.k_minus))
        # K+-(0+) are the constants, so L is the constant K+ + K-
        return RegularVariationSpec(rv.index, rv.c_theta, rv.c_omega,
                                    SlowlyVaryingFn.constant(m.k_plus + m.k_minus), AT_INFINITY)
    if isinstance(m, CustomDensity) and m.origin_hint is not None:
        hint = m.origin_hint
        return density_to_exponent_rv(hint.alpha, hint.k_plus, hint.k_minus)
    raise NotApplicable(f"no regular-variation law is known for a {m.kind} measure without an origin hint")


# --------------------------------------------------------------------------
# Gaussian case
# --------------------------------------------------------------------------

def gaussian_coeff_c_pm(ev: ExponentEvaluator, cfg=None):
    """c+- = 1/(2a) +- (1/pi) int_0^inf Im(lambda/Psi(lambda)) d lambda."""
    a = ev.gaussian_coefficient
    if not a > 0:
        raise AssumptionZViolation("the Gaussian coefficient is zero")
    base = 1.0 / (2.0 * a)
    if isinstance(ev.mode, ClosedFormBrownian):
        # Im(lambda/Psi) = -b/(a^2 lambda^2 + b^2) integrates to -sgn(b) pi/(2a)
        shift = math.copysign(base, ev.mode.b) if ev.mode.b != 0 else 0.0
        return base - shift, base + shift
    rep = check_Z(ev, cfg)
    if rep.status != PASS:
        raise AssumptionZViolation(f"assumption (Z) probe {rep.status}: {rep.detail}", rep)
    cfg = cfg or QuadratureConfig()

    def g(lam):
        return imag_lambda_over_psi(ev, lam)

    e0 = fit_power_exponent(g, 1e-6, 1e-4)
    order = min(e0, 1.0) if math.isfinite(e0) else 1.0
    head = integrate_singular(g, order, 1.0, cfg)
    tail = integrate_semi_infinite(_extended(ev, g), 1.0, cfg)
    integral = combine(head, tail).value / math.pi
    return base + integral, base - integral


# --------------------------------------------------------------------------
# exponent laws at lambda -> 0
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HeavyTail:
    """xi+-(x) ~ K+-(x) x^{-beta_tail-1} at infinity, K+- slowly varying at infinity."""

    beta_tail: float
    k_plus: object = 1.0
    k_minus: object = 0.0


@dataclass(frozen=True)
class SecondMoment:
    """int x^2 nu(dx) < infinity."""


@dataclass(frozen=True)
class FirstMomentTail:
    """int_{|x|>=1} |x| nu(dx) < infinity."""


TailInfo = Union[HeavyTail, SecondMoment, FirstMomentTail]
_TAIL_CHECK_WINDOW = (1e4, 1e5)


def _tail_slope(m):
    return fit_power_exponent(lambda x: m.xi_plus(x) + m.xi_minus(x), *_TAIL_CHECK_WINDOW)


def _first_moment_tail(spec, cfg):
    r"""\int_{|x| >= 1} x nu(dx)."""
    m = spec.measure
    if isinstance(m, ZeroMeasure):
        return 0.0
    slope = _tail_slope(m)
    if not slope < -2.0:
        raise CaseMismatch(f"density ~ x^{slope:.3g} at infinity: int_{{|x|>=1}} |x| nu(dx) diverges")
    res = integrate_semi_infinite(lambda x: x * (m.xi_plus(x) - m.xi_minus(x)), 1.0, cfg)
    return res.value


def _second_moment(spec, cfg):
    r"""\int x^2 nu(dx)."""
    m = spec.measure
    if isinstance(m, ZeroMeasure):
        return 0.0
    slope = _tail_slope(m)
    if not slope < -3.0:
        raise CaseMismatch(f"density ~ x^{slope:.3g} at infinity: int x^2 nu(dx) diverges")

    def f(x):
        return x * x * (m.xi_plus(x) + m.xi_minus(x))

    origin = m.origin_exponent
    order = 2.0 if origin is None else min(origin + 2.0, 1.0)
    head = integrate_singular(f, order, 1.0, cfg)
    tail = integrate_semi_infinite(f, 1.0, cfg)
    return combine(head, tail).value


def exponent_rv_at_zero(spec: LevyProcessSpec, tail_info: TailInfo, cfg=None):
    """(theta law, omega law) as lambda -> 0 for the declared case; either may be None."""
    cfg = cfg or QuadratureConfig(rel_tol=1e-11, abs_tol=1e-300)
    one = SlowlyVaryingFn.constant(1.0, AT_ZERO)
    if isinstance(tail_info, SecondMoment):
        m2 = _second_moment(spec, cfg)
        theta = ExponentLaw(2.0, spec.a + 0.5 * m2, one, "second moment")
        return theta, _omega_linear(spec, cfg, one)
    if isinstance(tail_info, FirstMomentTail):
        return None, _omega_linear(spec, cfg, one)
    if not isinstance(tail_info, HeavyTail):
        raise DomainError("tail_info must be HeavyTail, SecondMoment or FirstMomentTail")
    beta = float(tail_info.beta_tail)
    if not 0.0 < beta < 2.0:
        raise DomainError(f"beta_tail must lie in (0, 2), got {beta}")
    if beta == 1.0:
        raise DomainError("beta_tail = 1 is not covered")
    if spec.a != 0:
        raise CaseMismatch("a heavy-tailed law at lambda -> 0 needs a = 0 to dominate theta")
    m = spec.measure
    if isinstance(m, ZeroMeasure):
        raise CaseMismatch("declared heavy tail but the measure is zero")
    slope = _tail_slope(m)
    if not abs(slope + beta + 1.0) <= 0.1:
        raise CaseMismatch(f"density ~ x^{slope:.3g} at infinity, expected x^{-beta - 1:.3g}")
    kp = SlowlyVaryingFn.coerce(tail_info.k_plus, AT_INFINITY)
    km = SlowlyVaryingFn.coerce(tail_info.k_minus, AT_INFINITY)
    k0 = _limit_ratio(kp, km, AT_INFINITY)
    L = _sum_at_reciprocal(kp, km, AT_ZERO)
    theta = ExponentLaw(beta, math.pi * c_alpha(beta + 1.0), L, "heavy tail")
    if beta < 1.0:
        c = -_skew(k0) * math.pi * c_alpha(beta + 1.0) * math.tan(0.5 * math.pi * beta)
        return theta, ExponentLaw(beta, c, L, "heavy tail, beta < 1")
    lin = _omega_linear(spec, cfg, one)
    scale = max(abs(spec.b), 1.0)
    if abs(lin.coefficient) > 1e-9 * scale:
        return theta, lin
    c3 = _skew(k0) * math.pi * c_alpha(beta) / beta
    return theta, ExponentLaw(beta, c3, L, "degenerate drift")


def _omega_linear(spec, cfg, one):
    return ExponentLaw(1.0, spec.b - _first_moment_tail(spec, cfg), one, "linear drift")


def rv_at_zero(theta: ExponentLaw, omega: Optional[ExponentLaw]) -> RegularVariationSpec:
    """Join the two laws at lambda -> 0 when they share an index (or omega is lower order)."""
    if theta is None:
        raise CaseMismatch("no theta law")
    if omega is None or omega.coefficient == 0.0:
        return RegularVariationSpec(theta.index, theta.coefficient, 0.0, theta.L, AT_ZERO)
    if omega.index > theta.index:
        return RegularVariationSpec(theta.index, theta.coefficient, 0.0, theta.L, AT_ZERO)
    if omega.index != theta.index:
        raise CaseMismatch(f"omega ~ lambda^{omega.index:g} dominates theta ~ lambda^{theta.index:g}")
    return RegularVariationSpec(theta.index, theta.coefficient, omega.coefficient, theta.L, AT_ZERO)


# --------------------------------------------------------------------------
# empirical estimates
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticPoint:
    x: float
    h_value: float
    estimate: float
    error_estimate: float


@dataclass
class AsymptoticReport:
    side: str
    points: list
    predicted: float
    converged: bool
    rel_deviation_at_finest: float
    criterion: str = "relative band"
    tol_band: float = 0.05
    scale: float = 1.0
    notes: tuple = ()

    @property
    def finest(self) -> AsymptoticPoint:
        return self.points[-1]

    def to_json(self):
        return {
            "side": self.side,
            "predicted": self.predicted,
            "converged": self.converged,
            "relDeviationAtFinest": self.rel_deviation_at_finest,
            "criterion": self.criterion,
            "tolBand": self.tol_band,
            "scale": self.scale,
            "notes": list(self.notes),
            "points": [{"x": p.x, "h": p.h_value, "estimate": p.estimate,
                        "errorEstimate": p.error_estimate} for p in self.points],
        }

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["side", "x", "h", "estimate", "error_estimate", "predicted"])
        for p in self.points:
            w.writerow([self.side, fmt(p.x), fmt(p.h_value), fmt(p.estimate),
                        fmt(p.error_estimate), fmt(self.predicted)])


def _signed_grid(grid, side, toward_zero):
    if side not in ("plus", "minus"):
        raise DomainError("side must be 'plus' or 'minus'")
    g = [abs(float(v)) for v in grid]
    if not g or any(v == 0 for v in g):
        raise DomainError("grid must be nonempty and avoid 0")
    steps = np.diff(g)
    if toward_zero and not np.all(steps < 0):
        raise DomainError("grid must decrease strictly toward the origin")
    if not toward_zero and not np.all(steps > 0):
        raise DomainError("grid must increase strictly toward infinity")
    sgn = 1.0 if side == "plus" else -1.0
    return [sgn * v for v in g]


def _judge(estimate, predicted, scale, tol_band):
    if abs(predicted) > 1e-12 * scale:
        dev = (estimate - predicted) / abs(predicted)
        return abs(dev) <= tol_band, dev, "relative band"
    dev = estimate / scale
    return abs(dev) <= DECAY_FRACTION, dev, "decay"


def empirical_coefficient_estimate(ev: ExponentEvaluator, rv: RegularVariationSpec, side, grid,
                                   cfg=None, tol_band=0.05, threads=None) -> AsymptoticReport:
    """Tabulate h(x) L(1/|x|) / |x|^(index-1) along the grid and compare with the predicted coefficient.

    An rv with index 2 at infinity selects the Gaussian normalisation h(x)/|x|.
    """
    rep = check_T(ev, cfg)
    if rep.status != PASS:
        raise AssumptionTViolation(f"assumption (T) probe {rep.status}: {rep.detail}", rep)
    toward_zero = rv.location == AT_INFINITY
    xs = _signed_grid(grid, side, toward_zero)
    if toward_zero and rv.index == 2.0:
        cp, cm = gaussian_coeff_c_pm(ev, cfg)
        scale = 1.0 / (2.0 * ev.gaussian_coefficient)
    else:
        cp, cm = coeff_c_pm(rv) if toward_zero else coeff_c_pm_zero(rv)
        scale = c_alpha(rv.index) / math.hypot(rv.c_theta, rv.c_omega)
    predicted = cp if side == "plus" else cm

    def one(x):
        r = h_result(ev, x, cfg)
        factor = float(rv.L(1.0 / abs(x))) / abs(x) ** (rv.index - 1.0)
        return AsymptoticPoint(x, r.value, r.value * factor, r.error_estimate * factor), r.notes

    out = map_ordered(one, xs, threads)
    points = [p for p, _ in out]
    notes = sorted({n for _, ns in out for n in ns})
    ok, dev, crit = _judge(points[-1].estimate, predicted, scale, tol_band)
    return AsymptoticReport(side, points, predicted, ok, dev, crit, tol_band, scale, tuple(notes))


def ratio_hq_h(ev: ExponentEvaluator, q, grid, cfg=None, side="plus",
               rv: Optional[RegularVariationSpec] = None, tol_band=0.05,
               threads=None) -> AsymptoticReport:
    """h_q(x)/h(x) along a grid toward the origin; the limit is 1 when c_side != 0."""
    rep = check_T(ev, cfg)
    if rep.status != PASS:
        raise AssumptionTViolation(f"assumption (T) probe {rep.status}: {rep.detail}", rep)
    if rv is None:
        if ev.gaussian_coefficient > 0:
            cp, cm = gaussian_coeff_c_pm(ev, cfg)
        else:
            cp, cm = coeff_c_pm(rv_from_evaluator(ev))
    else:
        cp, cm = coeff_c_pm(rv)
    c_side = cp if side == "plus" else cm
    if c_side == 0.0 or abs(c_side) <= 1e-12 * max(abs(cp), abs(cm)):
        raise NotApplicable(f"c_{side} = 0: the ratio has no limit statement")
    xs = _signed_grid(grid, side, True)

    def one(x):
        h = h_result(ev, x, cfg)
        gap = h_gap_result(ev, q, x, cfg)
        if not h.value > h.error_estimate:
            return AsymptoticPoint(x, h.value, math.nan, math.inf), ("h below its error estimate",)
        ratio = 1.0 - gap.value / h.value
        err = (gap.error_estimate + abs(gap.value) * h.error_estimate / h.value) / h.value
        return AsymptoticPoint(x, h.value, ratio, err), h.notes + gap.notes

    out = map_ordered(one, xs, threads)
    points = [p for p, _ in out]
    notes = sorted({n for _, ns in out for n in ns})
    finest = points[-1].estimate
    if math.isnan(finest):
        raise DegenerateResolvent("h at the finest grid point is below its error estimate")
    dev = finest - 1.0
    return AsymptoticReport(side, points, 1.0, abs(dev) <= tol_band, dev, "relative band",
                            tol_band, 1.0, tuple(notes))
