"""Numeric probes of the integrability assumptions (A), (T) and (Z).

Each probe fits local power exponents of the relevant integrand at the
frontier where the assumption can fail and reports pass, fail or
inconclusive.  Inconclusive is a result, never an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import LevyError
from .levy import ExponentEvaluator
from .quadrature import QuadratureConfig, combine, fit_power_exponent, integrate_singular
from .quadrature.oscillatory import integrate_semi_infinite

ORIGIN_WINDOW = (1e-6, 1e-4)
# exponents this close to the critical value are not decided by a one-decade fit
MARGIN = 0.05

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class ProbeReport:
    name: str
    status: str
    exponents: dict = field(default_factory=dict)
    witness: Optional[float] = None
    detail: str = ""

    @property
    def passed(self):
        return self.status == PASS

    def to_json(self):
        def clean(v):
            if v is None or (isinstance(v, float) and not math.isfinite(v)):
                return None if v is None or math.isnan(v) else ("inf" if v > 0 else "-inf")
            return v

        return {"name": self.name, "status": self.status,
                "exponents": {k: clean(v) for k, v in self.exponents.items()},
                "witness": clean(self.witness), "detail": self.detail}


def frontier(ev: ExponentEvaluator):
    """Largest lambda at which the exponent is evaluated directly."""
    return min(ev.lambda_max, 1e6)


def imag_lambda_over_psi(ev: ExponentEvaluator, lam):
    """Im(lambda / Psi(lambda)) = -lambda omega / |Psi|^2."""
    lam = np.asarray(lam, dtype=float)
    th, om = ev.parts(lam)
    return -lam * om / (th * th + om * om)


def _classify(value, critical, above_is_good):
    if math.isnan(value):
        return INCONCLUSIVE
    good = value > critical + MARGIN if above_is_good else value < critical - MARGIN
    bad = value < critical - MARGIN if above_is_good else value > critical + MARGIN
    return PASS if good else FAIL if bad else INCONCLUSIVE


def _worst(*statuses):
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


def lemma_witness(ev: ExponentEvaluator, cfg: Optional[QuadratureConfig] = None):
    r"""\int_0^\infty (lambda^2 ^ 1)/|Psi(lambda)| d lambda, or None when it cannot be evaluated."""
    cfg = cfg or QuadratureConfig(rel_tol=1e-6, abs_tol=1e-12)

    def near(lam):
        th, om = ev.parts(lam)
        return lam * lam / np.hypot(th, om)

    def far(lam):
        th, om = ev.parts(lam)
        return 1.0 / np.hypot(th, om)

    try:
        s = fit_power_exponent(near, *ORIGIN_WINDOW)
        order = 0.0 if not math.isfinite(s) else min(s, 1.0)
        if order <= -1.0:
            return math.inf
        head = integrate_singular(near, order, 1.0, cfg)
        tail = integrate_semi_infinite(_extended(ev, far), 1.0, cfg)
        return combine(head, tail).value
    except (LevyError, ArithmeticError, ValueError):
        return None


def _extended(ev, f):
    """f for lambda up to the frontier, continued by its fitted power law beyond."""
    cap = frontier(ev)
    if not math.isfinite(ev.lambda_max):
        return f
    slope = fit_power_exponent(f, cap / 10.0, cap)
    f_cap = float(f(np.array([cap]))[0])

    def g(lam):
        lam = np.asarray(lam, dtype=float)
        out = np.empty(lam.shape)
        inside = lam <= cap
        if np.any(inside):
            out[inside] = f(lam[inside])
        if np.any(~inside):
            out[~inside] = f_cap * (lam[~inside] / cap) ** slope
        return out

    return g


def _cache(ev):
    c = ev.__dict__.get("_probe_cache")
    if c is None:
        c = ev.__dict__.setdefault("_probe_cache", {})
    return c


def check_A(ev: ExponentEvaluator, q: float = 1.0, cfg=None, witness=True) -> ProbeReport:
    """(A): 1/|q + Psi| decays faster than 1/lambda at infinity."""
    key = ("A", float(q), witness)
    hit = _cache(ev).get(key)
    if hit is not None:
        return hit
    cap = frontier(ev)

    def inv(lam):
        th, om = ev.parts(lam)
        return 1.0 / np.hypot(q + th, om)

    try:
        p = -fit_power_exponent(inv, cap / 10.0, cap)
    except (LevyError, ArithmeticError) as exc:
        rep = ProbeReport("A", INCONCLUSIVE, {"decay_exponent": math.nan}, None, str(exc))
        _cache(ev)[key] = rep
        return rep
    status = _classify(p, 1.0, True)
    if ev.gaussian_coefficient > 0:
        status = PASS
    w = lemma_witness(ev, cfg) if witness and status != FAIL else None
    detail = f"1/|q+Psi| ~ lambda^-{p:.4g} on [{cap / 10:g}, {cap:g}]"
    rep = ProbeReport("A", status, {"decay_exponent": p}, w, detail)
    _cache(ev)[key] = rep
    return rep


def _origin_exponent_imag(ev):
    """Fitted exponent of |Im(lambda/Psi)| near 0; -inf when it vanishes."""
    return fit_power_exponent(lambda lam: imag_lambda_over_psi(ev, lam), *ORIGIN_WINDOW)


def check_T(ev: ExponentEvaluator, cfg=None) -> ProbeReport:
    """(T): (A) together with integrability of Im(lambda/Psi) on (0, 1)."""
    key = ("T",)
    hit = _cache(ev).get(key)
    if hit is not None:
        return hit
    a_rep = check_A(ev, 1.0, cfg)
    try:
        e0 = _origin_exponent_imag(ev)
    except (LevyError, ArithmeticError) as exc:
        rep = ProbeReport("T", INCONCLUSIVE, {"origin_exponent": math.nan}, a_rep.witness, str(exc))
        _cache(ev)[key] = rep
        return rep
    if e0 == -math.inf:
        st, why = PASS, "Im(lambda/Psi) vanishes near 0"
    else:
        st = _classify(e0, -1.0, True)
        why = f"|Im(lambda/Psi)| ~ lambda^{e0:.4g} near 0"
    status = _worst(st, a_rep.status)
    rep = ProbeReport("T", status,
                      {"origin_exponent": e0, "decay_exponent": a_rep.exponents["decay_exponent"]},
                      a_rep.witness, f"{why}; (A): {a_rep.detail}")
    _cache(ev)[key] = rep
    return rep


def check_Z(ev: ExponentEvaluator, cfg=None) -> ProbeReport:
    """(Z): a > 0 and Im(lambda/Psi) integrable on the whole half-line."""
    key = ("Z",)
    hit = _cache(ev).get(key)
    if hit is not None:
        return hit
    a = ev.gaussian_coefficient
    if not a > 0:
        rep = ProbeReport("Z", FAIL, {"gaussian_coefficient": a}, None,
                          "Gaussian coefficient is zero")
        _cache(ev)[key] = rep
        return rep
    cap = frontier(ev)
    try:
        e0 = _origin_exponent_imag(ev)
        einf = fit_power_exponent(lambda lam: imag_lambda_over_psi(ev, lam), cap / 10.0, cap)
    except (LevyError, ArithmeticError) as exc:
        rep = ProbeReport("Z", INCONCLUSIVE, {"gaussian_coefficient": a}, None, str(exc))
        _cache(ev)[key] = rep
        return rep
    s0 = PASS if e0 == -math.inf else _classify(e0, -1.0, True)
    sinf = PASS if einf == -math.inf else _classify(einf, -1.0, False)
    rep = ProbeReport("Z", _worst(s0, sinf),
                      {"gaussian_coefficient": a, "origin_exponent": e0, "infinity_exponent": einf},
                      None, f"|Im(lambda/Psi)| ~ lambda^{e0:.4g} near 0 and lambda^{einf:.4g} near {cap:g}")
    _cache(ev)[key] = rep
    return rep
