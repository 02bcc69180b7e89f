"""Levy processes given by their characteristic triplet, and their exponents.

A process is described by a Gaussian coefficient ``a``, a drift constant
``b`` and a Levy measure with density xi on the real line.  The
Levy-Khinchin exponent is split as Psi = theta + i*omega with

    theta(l) = a l^2 + int (1 - cos l x) nu(dx)
    omega(l) = b l + int (l x 1{|x|<1} - sin l x) nu(dx)

Evaluators compute these either in closed form (stable, Brownian) or by
quadrature over the density.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    DomainError,
    LambdaOutOfRange,
    NonIntegrableMeasure,
    QuadratureFailure,
    SpecError,
)
from .expressions import compile_density
from .quadrature import (
    IntegralResult,
    QuadratureConfig,
    c_alpha,
    combine,
    fit_power_exponent,
    gauss_kronrod,
    integrate_singular,
)
from .quadrature.oscillatory import _alternating_sum

# numeric exponents lose all accuracy to cancellation in 1 - cos(l x) beyond this
NUMERIC_LAMBDA_MAX = 1e6
ORIGIN_FIT_WINDOW = (1e-6, 1e-3)
TAIL_FIT_WINDOW = (1e3, 1e4)
_HEAD_DECADES = 12


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


# --------------------------------------------------------------------------
# Levy measures
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroMeasure:
    """No jumps."""

    kind = "zero"

    def xi_plus(self, x):
        return _zero(x)

    def xi_minus(self, x):
        return _zero(x)

    origin_exponent = None
    tail_exponent = -math.inf
    breakpoints = ()

    def to_json(self):
        return {"kind": "zero"}


@dataclass(frozen=True)
class StableDensity:
    """Density K+ x^{-alpha-1} on (0, inf) and K- |x|^{-alpha-1} on (-inf, 0)."""

    k_plus: float
    k_minus: float
    alpha: float
    kind = "stable"

    def __post_init__(self):
        if self.k_plus < 0 or self.k_minus < 0:
            raise SpecError("stable densities need kPlus, kMinus >= 0", "measure.kPlus")
        if not self.k_plus + self.k_minus > 0:
            raise SpecError("kPlus + kMinus must be positive", "measure.kPlus")
        if not 1.0 < self.alpha < 2.0:
            raise SpecError(f"alpha must lie in (1, 2), got {self.alpha}", "measure.alpha")

    def xi_plus(self, x):
        return self.k_plus * np.asarray(x, dtype=float) ** (-self.alpha - 1.0)

    def xi_minus(self, x):
        return self.k_minus * np.asarray(x, dtype=float) ** (-self.alpha - 1.0)

    @property
    def origin_exponent(self):
        return -self.alpha - 1.0

    @property
    def tail_exponent(self):
        return -self.alpha - 1.0

    breakpoints = ()

    @property
    def skewness(self):
        return (self.k_plus - self.k_minus) / (self.k_plus + self.k_minus)

    @property
    def strict_drift(self):
        """Drift b that makes the process strictly stable: int_{|x|>=1} x nu(dx)."""
        return (self.k_plus - self.k_minus) / (self.alpha - 1.0)

    def closed_form(self):
        """Coefficients (c_theta, c_omega) of theta = c_theta l^alpha, omega = c_omega l^alpha."""
        c_theta = math.pi * (self.k_plus + self.k_minus) * c_alpha(self.alpha + 1.0)
        c_omega = (self.k_plus - self.k_minus) * math.pi * c_alpha(self.alpha) / self.alpha
        return c_theta, c_omega

    @classmethod
    def from_coefficients(cls, alpha, c_theta, skewness=0.0):
        """Stable density with theta(l) = c_theta l^alpha and the given skewness in [-1, 1]."""
        if not -1.0 <= skewness <= 1.0:
            raise SpecError("skewness must lie in [-1, 1]", "measure.skewness")
        if not c_theta > 0:
            raise SpecError("cTheta must be positive", "measure.cTheta")
        total = c_theta / (math.pi * c_alpha(alpha + 1.0))
        return cls(0.5 * total * (1 + skewness), 0.5 * total * (1 - skewness), alpha)

    def to_json(self):
        return {"kind": "stable", "kPlus": self.k_plus, "kMinus": self.k_minus, "alpha": self.alpha}


@dataclass(frozen=True)
class TemperedPolynomial:
    """Density K+- x^{-alpha-1} (1+x)^{alpha-beta_tail} on each half-line."""

    k_plus: float
    k_minus: float
    alpha: float
    beta_tail: float
    kind = "tempered"

    def __post_init__(self):
        if not (self.k_plus > 0 and self.k_minus > 0):
            raise SpecError("tempered densities need kPlus, kMinus > 0", "measure.kPlus")
        if not 1.0 < self.alpha < 2.0:
            raise SpecError(f"alpha must lie in (1, 2), got {self.alpha}", "measure.alpha")
        if not 0.0 < self.beta_tail < 2.0:
            raise SpecError(f"betaTail must lie in (0, 2), got {self.beta_tail}", "measure.betaTail")

    def _shape(self, x):
        x = np.asarray(x, dtype=float)
        return x ** (-self.alpha - 1.0) * (1.0 + x) ** (self.alpha - self.beta_tail)

    def xi_plus(self, x):
        return self.k_plus * self._shape(x)

    def xi_minus(self, x):
        return self.k_minus * self._shape(x)

    @property
    def origin_exponent(self):
        return -self.alpha - 1.0

    @property
    def tail_exponent(self):
        return -self.beta_tail - 1.0

    breakpoints = ()

    def to_json(self):
        return {"kind": "tempered", "kPlus": self.k_plus, "kMinus": self.k_minus,
                "alpha": self.alpha, "betaTail": self.beta_tail}


@dataclass(frozen=True)
class ExponentialDensity:
    """One-sided density exp(-|x|/scale) on the chosen half-line."""

    scale: float
    side: str = "plus"
    kind = "exponential"

    def __post_init__(self):
        if not self.scale > 0:
            raise SpecError("scale must be positive", "measure.scale")
        if self.side not in ("plus", "minus"):
            raise SpecError("side must be 'plus' or 'minus'", "measure.side")

    def _density(self, x):
        return np.exp(-np.asarray(x, dtype=float) / self.scale)

    def xi_plus(self, x):
        return self._density(x) if self.side == "plus" else _zero(x)

    def xi_minus(self, x):
        return self._density(x) if self.side == "minus" else _zero(x)

    origin_exponent = 0.0
    tail_exponent = -math.inf
    breakpoints = ()

    def to_json(self):
        return {"kind": "exponential", "scale": self.scale, "side": self.side}


@dataclass(frozen=True)
class OriginHint:
    """xi+-(x) ~ K+- x^{-alpha-1} as x -> 0+ (constant K+-)."""

    alpha: float
    k_plus: float
    k_minus: float


@dataclass(frozen=True)
class TailHint:
    """xi+-(x) ~ K+- x^{-beta_tail-1} as x -> infinity (constant K+-)."""

    beta_tail: float
    k_plus: float
    k_minus: float


@dataclass(frozen=True)
class CustomDensity:
    """Arbitrary nonnegative densities on each half-line, given as vectorised callables."""

    xi_plus_fn: Callable
    xi_minus_fn: Callable = _zero
    origin_hint: Optional[OriginHint] = None
    tail_hint: Optional[TailHint] = None
    breakpoints: tuple = (1.0,)
    source: Optional[dict] = field(default=None, compare=False)
    kind = "custom"

    def xi_plus(self, x):
        return np.asarray(self.xi_plus_fn(np.asarray(x, dtype=float)), dtype=float)

    def xi_minus(self, x):
        return np.asarray(self.xi_minus_fn(np.asarray(x, dtype=float)), dtype=float)

    def _sum(self, x):
        return self.xi_plus(x) + self.xi_minus(x)

    @property
    def origin_exponent(self):
        if self.origin_hint is not None:
            return -self.origin_hint.alpha - 1.0
        slope = fit_power_exponent(self._sum, *ORIGIN_FIT_WINDOW)
        if math.isnan(slope) or slope == -math.inf:
            return None
        return slope

    @property
    def tail_exponent(self):
        if self.tail_hint is not None:
            return -self.tail_hint.beta_tail - 1.0
        slope = fit_power_exponent(self._sum, *TAIL_FIT_WINDOW)
        if math.isnan(slope):
            return None
        return slope

    def to_json(self):
        if self.source is None:
            raise SpecError("custom densities built from Python callables cannot be serialised")
        return dict(self.source)


MeasureSpec = Union[ZeroMeasure, StableDensity, TemperedPolynomial, ExponentialDensity, CustomDensity]


@dataclass(frozen=True)
class LevyProcessSpec:
    """Characteristic triplet (a, b, nu)."""

    a: float
    b: float
    measure: MeasureSpec = field(default_factory=ZeroMeasure)

    def __post_init__(self):
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a)) or self.a < 0:
            raise SpecError(f"Gaussian coefficient must be finite and >= 0, got {self.a!r}", "a")
        if not (isinstance(self.b, (int, float)) and math.isfinite(self.b)):
            raise SpecError(f"drift must be a finite number, got {self.b!r}", "b")

    @classmethod
    def brownian(cls, a, b=0.0):
        return cls(float(a), float(b), ZeroMeasure())

    @classmethod
    def strictly_stable(cls, k_plus, k_minus, alpha):
        """Stable density with the drift that makes the process strictly stable."""
        m = StableDensity(float(k_plus), float(k_minus), float(alpha))
        return cls(0.0, m.strict_drift, m)

    def is_strictly_stable(self):
        m = self.measure
        if not isinstance(m, StableDensity) or self.a != 0:
            return False
        return abs(self.b - m.strict_drift) <= 1e-12 * max(1.0, abs(m.strict_drift))


# --------------------------------------------------------------------------
# JSON schema
# --------------------------------------------------------------------------

_MEASURE_FIELDS = {
    "zero": set(),
    "stable": {"kPlus", "kMinus", "alpha", "cTheta", "skewness"},
    "tempered": {"kPlus", "kMinus", "alpha", "betaTail"},
    "exponential": {"scale", "side"},
    "custom": {"xiPlus", "xiMinus", "originHint", "tailHint", "breakpoints"},
}


def _number(obj, key, where, required=True, default=None):
    if key not in obj:
        if required:
            raise SpecError("missing required field", f"{where}.{key}" if where else key)
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"expected a finite number, got {v!r}", f"{where}.{key}" if where else key)
    return float(v)


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise SpecError(f"expected an object, got {type(obj).__name__}", where)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise SpecError("unknown field", f"{where}.{unknown[0]}" if where else unknown[0])


def _parse_hint(obj, where, exponent_key):
    _check_keys(obj, {exponent_key, "kPlus", "kMinus"}, where)
    return (_number(obj, exponent_key, where), _number(obj, "kPlus", where),
            _number(obj, "kMinus", where))


def measure_from_json(obj) -> MeasureSpec:
    where = "measure"
    if not isinstance(obj, dict):
        raise SpecError("expected an object", where)
    kind = obj.get("kind")
    if kind not in _MEASURE_FIELDS:
        raise SpecError(f"kind must be one of {sorted(_MEASURE_FIELDS)}, got {kind!r}", "measure.kind")
    _check_keys(obj, _MEASURE_FIELDS[kind] | {"kind"}, where)
    if kind == "zero":
        return ZeroMeasure()
    if kind == "stable":
        alpha = _number(obj, "alpha", where)
        if "cTheta" in obj or "skewness" in obj:
            if "kPlus" in obj or "kMinus" in obj:
                raise SpecError("give either kPlus/kMinus or cTheta/skewness", "measure.cTheta")
            return StableDensity.from_coefficients(
                alpha, _number(obj, "cTheta", where), _number(obj, "skewness", where, False, 0.0))
        return StableDensity(_number(obj, "kPlus", where), _number(obj, "kMinus", where), alpha)
    if kind == "tempered":
        return TemperedPolynomial(_number(obj, "kPlus", where), _number(obj, "kMinus", where),
                                  _number(obj, "alpha", where), _number(obj, "betaTail", where))
    if kind == "exponential":
        side = obj.get("side", "plus")
        return ExponentialDensity(_number(obj, "scale", where), side)
    # custom
    if "xiPlus" not in obj:
        raise SpecError("missing required field", "measure.xiPlus")
    xi_p = compile_density(obj["xiPlus"], "measure.xiPlus")
    xi_m = compile_density(obj.get("xiMinus", "0"), "measure.xiMinus")
    origin = tail = None
    if obj.get("originHint") is not None:
        alpha, kp, km = _parse_hint(obj["originHint"], "measure.originHint", "alpha")
        origin = OriginHint(alpha, kp, km)
    if obj.get("tailHint") is not None:
        beta, kp, km = _parse_hint(obj["tailHint"], "measure.tailHint", "betaTail")
        tail = TailHint(beta, kp, km)
    bps = obj.get("breakpoints", [1.0])
    if not isinstance(bps, list) or not all(isinstance(v, (int, float)) and v > 0 for v in bps):
        raise SpecError("expected a list of positive numbers", "measure.breakpoints")
    return CustomDensity(xi_p, xi_m, origin, tail, tuple(float(v) for v in bps), source=dict(obj))


def spec_from_json(obj) -> LevyProcessSpec:
    """Build a spec from a parsed JSON document (or a JSON string).

    ``b`` may be omitted; a stable measure then gets its strictly stable
    drift and every other measure gets b = 0.
    """
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc.msg} (line {exc.lineno})", "document") from None
    _check_keys(obj, {"a", "b", "measure"}, "")
    a = _number(obj, "a", "", required=False, default=0.0)
    if "measure" not in obj:
        raise SpecError("missing required field", "measure")
    measure = measure_from_json(obj["measure"])
    if "b" in obj and obj["b"] is not None:
        b = _number(obj, "b", "")
    else:
        b = measure.strict_drift if isinstance(measure, StableDensity) else 0.0
    return LevyProcessSpec(a, b, measure)


def spec_to_json(spec: LevyProcessSpec) -> dict:
    return {"a": spec.a, "b": spec.b, "measure": spec.measure.to_json()}


def load_spec(path) -> LevyProcessSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc.strerror}", "document") from None
    return spec_from_json(text)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    evidence: dict = field(default_factory=dict)


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self):
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail,
                        "evidence": c.evidence} for c in self.checks],
        }


def _fit_side_sum(measure, window):
    def total(x):
        return measure.xi_plus(x) + measure.xi_minus(x)
    return fit_power_exponent(total, *window)


def validate_spec(spec: LevyProcessSpec) -> ValidationReport:
    """Numeric sanity checks of a spec; failures are reported, never raised."""
    checks = [Check("gaussian_coefficient", spec.a >= 0, f"a = {spec.a}", {"a": spec.a})]
    m = spec.measure
    if isinstance(m, ZeroMeasure):
        checks.append(Check("levy_integrability", True, "no jumps"))
        return ValidationReport(checks)
    grid = np.concatenate([np.geomspace(1e-8, 1e8, 161), np.linspace(0.01, 10.0, 100)])
    with np.errstate(all="ignore"):
        vp, vm = m.xi_plus(grid), m.xi_minus(grid)
    finite = bool(np.all(np.isfinite(vp)) and np.all(np.isfinite(vm)))
    nonneg = finite and bool(np.all(vp >= 0) and np.all(vm >= 0))
    checks.append(Check("density_nonnegative", nonneg,
                        "xi+ and xi- are finite and >= 0 on the sample grid" if nonneg
                        else "density is negative or not finite somewhere on the sample grid",
                        {"samples": int(grid.size)}))
    with np.errstate(all="ignore"):
        origin = _fit_side_sum(m, ORIGIN_FIT_WINDOW)
        tail = _fit_side_sum(m, TAIL_FIT_WINDOW)
    ev_o = None if math.isnan(origin) else origin
    ev_t = None if math.isnan(tail) else tail
    if ev_o is None:
        ok_o, why_o = False, "cannot fit the local exponent of xi near 0"
    elif origin == -math.inf:
        ok_o, why_o = True, "no mass near the origin"
    else:
        ok_o = origin > -3.0
        why_o = (f"xi ~ x^{origin:.4g} near 0: " +
                 ("int x^2 xi converges" if ok_o else "int x^2 xi diverges"))
    checks.append(Check("origin_integrability", ok_o, why_o,
                        {"fitted_origin_exponent": ev_o if ev_o != -math.inf else "-inf"}))
    if ev_t is None:
        ok_t, why_t = False, "cannot fit the tail exponent of xi"
    elif tail == -math.inf:
        ok_t, why_t = True, "density vanishes in the far tail"
    else:
        ok_t = tail < -1.0
        why_t = (f"xi ~ x^{tail:.4g} at infinity: " +
                 ("finite mass away from 0" if ok_t else "infinite mass away from 0"))
    checks.append(Check("tail_integrability", ok_t, why_t,
                        {"fitted_tail_exponent": ev_t if ev_t != -math.inf else "-inf"}))
    checks.append(Check("levy_integrability", ok_o and ok_t,
                        "int (x^2 ^ 1) nu(dx) < inf" if ok_o and ok_t else "int (x^2 ^ 1) nu(dx) diverges"))
    return ValidationReport(checks)


# --------------------------------------------------------------------------
# exponent evaluators
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormStable:
    c_theta: float
    c_omega: float
    alpha: float

    def __post_init__(self):
        if not self.c_theta > 0:
            raise DomainError("c_theta must be positive")
        if not 1.0 < self.alpha < 2.0:
            raise DomainError("alpha must lie in (1, 2)")


@dataclass(frozen=True)
class ClosedFormBrownian:
    a: float
    b: float

    def __post_init__(self):
        if self.a < 0:
            raise DomainError("a must be nonnegative")


@dataclass(frozen=True)
class NumericFromMeasure:
    quad: QuadratureConfig = field(default_factory=lambda: QuadratureConfig(rel_tol=1e-11, abs_tol=1e-300))


ExponentMode = Union[ClosedFormStable, ClosedFormBrownian, NumericFromMeasure]


def _x_minus_sin(t):
    """t - sin t without cancellation for small |t|."""
    t = np.asarray(t, dtype=float)
    out = t - np.sin(t)
    small = np.abs(t) < 1.0
    if np.any(small):
        ts = t[small]
        t2 = ts * ts
        # Taylor series t^3/3! - t^5/5! + ... up to t^19
        acc = np.zeros_like(ts)
        for n in range(19, 1, -2):
            acc = 1.0 / math.factorial(n) - t2 * acc
        out[small] = ts * t2 * acc
    return out


class ExponentEvaluator:
    """Computes theta, omega and Psi for one process.

    Instances are immutable; numeric values are memoised per lambda, which
    does not change results.
    """

    def __init__(self, mode: ExponentMode, spec: Optional[LevyProcessSpec] = None):
        if isinstance(mode, NumericFromMeasure) and spec is None:
            raise DomainError("numeric evaluation needs a process spec")
        self.mode = mode
        self.spec = spec
        self._memo = {}
        if isinstance(mode, NumericFromMeasure):
            self._prepare_numeric()

    # construction ---------------------------------------------------------
    @classmethod
    def stable(cls, c_theta, c_omega, alpha):
        return cls(ClosedFormStable(float(c_theta), float(c_omega), float(alpha)))

    @classmethod
    def stable_from_skewness(cls, alpha, c_theta=1.0, skewness=0.0):
        """c_omega = -c_theta * skewness * tan(pi alpha / 2)."""
        return cls.stable(c_theta, -c_theta * skewness * math.tan(0.5 * math.pi * alpha), alpha)

    @classmethod
    def brownian(cls, a, b=0.0):
        return cls(ClosedFormBrownian(float(a), float(b)), LevyProcessSpec.brownian(a, b))

    @classmethod
    def numeric(cls, spec, quad: Optional[QuadratureConfig] = None):
        mode = NumericFromMeasure() if quad is None else NumericFromMeasure(quad)
        return cls(mode, spec)

    @classmethod
    def from_spec(cls, spec: LevyProcessSpec, prefer_closed_form=True, quad=None):
        """Closed form for Brownian motion with drift and strictly stable specs, else numeric."""
        if prefer_closed_form:
            if isinstance(spec.measure, ZeroMeasure):
                return cls(ClosedFormBrownian(spec.a, spec.b), spec)
            if spec.is_strictly_stable():
                c_t, c_w = spec.measure.closed_form()
                return cls(ClosedFormStable(c_t, c_w, spec.measure.alpha), spec)
        return cls.numeric(spec, quad)

    # properties -----------------------------------------------------------
    @property
    def is_numeric(self):
        return isinstance(self.mode, NumericFromMeasure)

    @property
    def lambda_max(self):
        return NUMERIC_LAMBDA_MAX if self.is_numeric else math.inf

    @property
    def gaussian_coefficient(self):
        if isinstance(self.mode, ClosedFormBrownian):
            return self.mode.a
        if isinstance(self.mode, ClosedFormStable):
            return 0.0
        return self.spec.a

    def __repr__(self):
        return f"ExponentEvaluator({self.mode!r})"

    # evaluation -----------------------------------------------------------
    def theta(self, lam):
        return self._apply(lam, 0)

    def omega(self, lam):
        return self._apply(lam, 1)

    def psi(self, lam):
        th, om = self.parts(lam)
        return th + 1j * om

    def parts(self, lam):
        """(theta, omega) arrays for an array of lambdas."""
        lam = np.asarray(lam, dtype=float)
        mode = self.mode
        if isinstance(mode, ClosedFormStable):
            mag = np.abs(lam) ** mode.alpha
            return mode.c_theta * mag, np.sign(lam) * mode.c_omega * mag
        if isinstance(mode, ClosedFormBrownian):
            return mode.a * lam * lam, mode.b * lam
        th = np.empty(lam.shape)
        om = np.empty(lam.shape)
        for idx, v in np.ndenumerate(lam):
            rt, rw = self.numeric_results(float(v))
            th[idx], om[idx] = rt.value, rw.value
        return th, om

    def _apply(self, lam, which):
        scalar = np.ndim(lam) == 0
        out = self.parts(lam)[which]
        return float(out) if scalar else out

    def results(self, lam):
        """(theta, omega) as IntegralResults, with error estimates."""
        lam = float(lam)
        if not self.is_numeric:
            th, om = self.parts(lam)
            return (IntegralResult(float(th), 0.0, 0, 0.0), IntegralResult(float(om), 0.0, 0, 0.0))
        return self.numeric_results(lam)

    # numeric path ---------------------------------------------------------
    def _prepare_numeric(self):
        spec = self.spec
        m = spec.measure
        if isinstance(m, ZeroMeasure):
            self._origin = 0.0
            self._tail = -math.inf
            return
        origin = m.origin_exponent
        if origin is None:
            origin = 0.0
        if origin <= -3.0:
            raise NonIntegrableMeasure(f"density ~ x^{origin:.4g} at 0: int x^2 nu(dx) diverges")
        tail = m.tail_exponent
        if tail is None:
            raise NonIntegrableMeasure("cannot determine the tail behaviour of the density")
        if tail >= -1.0:
            raise NonIntegrableMeasure(f"density ~ x^{tail:.4g} at infinity: infinite mass")
        self._origin = origin
        self._tail = tail
        self._bps = tuple(getattr(m, "breakpoints", ()))

    def numeric_results(self, lam):
        if not math.isfinite(lam):
            raise DomainError("lambda must be finite")
        if abs(lam) > NUMERIC_LAMBDA_MAX:
            raise LambdaOutOfRange(
                f"|lambda| = {abs(lam):.3g} exceeds {NUMERIC_LAMBDA_MAX:g}; the numeric exponent "
                "cannot resolve 1 - cos(lambda x) there")
        key = abs(lam)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._compute(key)
            self._memo[key] = hit
        rt, rw = hit
        if lam < 0:
            rw = rw.negated()
        return rt, rw

    def _compute(self, lam):
        a, b = self.spec.a, self.spec.b
        if lam == 0.0:
            z = IntegralResult(0.0, 0.0, 0, 0.0)
            return z, z
        if isinstance(self.spec.measure, ZeroMeasure):
            return (IntegralResult(a * lam * lam, 0.0, 0, 0.0), IntegralResult(b * lam, 0.0, 0, 0.0))
        rt = self._theta_jump(lam)
        rw = self._omega_jump(lam)
        rt = IntegralResult(max(a * lam * lam + rt.value, 0.0), rt.error_estimate, rt.segments_used,
                            rt.truncation_point, rt.converged, rt.notes)
        rw = IntegralResult(b * lam + rw.value, rw.error_estimate, rw.segments_used,
                            rw.truncation_point, rw.converged, rw.notes)
        for r, name in ((rt, "theta"), (rw, "omega")):
            if not r.converged:
                raise QuadratureFailure(f"{name}({lam:g}) did not converge: {', '.join(r.notes)}")
        return rt, rw

    def _tail_mass(self, dens, x0, cfg, abs_tol):
        r"""\int_{x0}^\infty dens(x) dx."""
        parts = []
        x1 = max(x0, 1.0)
        if x0 < 1.0:
            parts.append(gauss_kronrod(dens, x0, 1.0, cfg, breakpoints=self._bps, geometric=True,
                                       abs_tol=abs_tol))
        order = 1.0 if self._tail == -math.inf else min(-self._tail - 2.0, 1.0)
        sb = [x1 / p for p in self._bps if p > x1]

        def mapped(s):
            return dens(x1 / s) * (x1 / (s * s))

        with np.errstate(over="ignore", under="ignore"):
            parts.append(integrate_singular(mapped, order, 1.0, cfg, breakpoints=sb, abs_tol=abs_tol))
        return combine(*parts)

    def _head_breaks(self, upper):
        # decades let the adaptive rule find mass far below the upper limit
        floor = min(1e-3, upper * 10.0 ** (-_HEAD_DECADES))
        decades = []
        v = upper / 10.0
        while v > floor:
            decades.append(v)
            v /= 10.0
        return sorted(set(decades) | {p for p in self._bps if p < upper})

    def _theta_jump(self, lam):
        m = self.spec.measure
        cfg = self.mode.quad
        x_osc = math.pi / lam

        def total(x):
            return m.xi_plus(x) + m.xi_minus(x)

        def head_fn(x):
            s = np.sin(0.5 * lam * x)
            return 2.0 * s * s * total(x)

        head = integrate_singular(head_fn, self._origin + 2.0, x_osc, cfg,
                                  breakpoints=self._head_breaks(x_osc))
        floor = max(cfg.abs_tol, 0.1 * cfg.rel_tol * abs(head.value))
        flat = self._tail_mass(total, x_osc, cfg, floor)
        osc = _alternating_sum(total, lam, "cos", x_osc, cfg.replace(abs_tol=floor), math.inf, 0.0)
        return combine(head, flat, osc.negated())

    def _omega_jump(self, lam):
        m = self.spec.measure
        cfg = self.mode.quad
        x_osc = math.pi / lam

        def diff(x):
            return m.xi_plus(x) - m.xi_minus(x)

        def head_fn(x):
            return _x_minus_sin(lam * x) * diff(x)

        xc = min(x_osc, 1.0)
        parts = [integrate_singular(head_fn, self._origin + 3.0, xc, cfg,
                                    breakpoints=self._head_breaks(xc))]
        floor = max(cfg.abs_tol, 0.1 * cfg.rel_tol * abs(parts[0].value))
        if x_osc < 1.0:
            lin = gauss_kronrod(lambda x: x * diff(x), x_osc, 1.0, cfg, breakpoints=self._bps,
                                geometric=True, abs_tol=floor / lam)
            parts.append(lin.scaled(lam))
        elif x_osc > 1.0:
            mid = gauss_kronrod(lambda x: np.sin(lam * x) * diff(x), 1.0, x_osc, cfg,
                                breakpoints=self._bps, geometric=True, abs_tol=floor)
            parts.append(mid.negated())
        osc = _alternating_sum(diff, lam, "sin", x_osc, cfg.replace(abs_tol=floor), math.inf, 0.0)
        parts.append(osc.negated())
        return combine(*parts)


def eval_theta(ev: ExponentEvaluator, lam):
    """theta(lambda) = Re Psi(lambda)."""
    return ev.theta(lam)


def eval_omega(ev: ExponentEvaluator, lam):
    """omega(lambda) = Im Psi(lambda)."""
    return ev.omega(lam)


def eval_psi(ev: ExponentEvaluator, lam):
    """Psi(lambda) = theta(lambda) + i omega(lambda)."""
    out = ev.psi(lam)
    return complex(out) if np.ndim(out) == 0 else out
