"""Resolvent densities, the renormalized zero resolvent and hitting ratios.

All quantities are Fourier integrals over lambda in (0, inf) of the form

    (1/pi) int [ (1 - cos lambda x) A(lambda) + sin(lambda x) S(lambda) ] d lambda

(or with cos in place of 1 - cos for r_q), where A and S are the real and
imaginary parts of a rational function of Psi.  Up to the first half period
pi/|x| the integrand is integrated as a whole; beyond it the non-oscillating
part and the two oscillating parts are handled separately.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AssumptionAViolation,
    AssumptionTViolation,
    DegenerateResolvent,
    DomainError,
    NonIntegrable,
    SlowDecay,
)
from .levy import ExponentEvaluator
from .probes import ORIGIN_WINDOW, PASS, _extended, check_A, check_T
from .quadrature import IntegralResult, QuadratureConfig, combine, fit_power_exponent, integrate_singular
from .quadrature.oscillatory import _alternating_sum, integrate_semi_infinite

THREADS_ENV = "LEVY_RESOLVENT_THREADS"
# decades below the first half period that get their own breakpoint
_HEAD_DECADES = 8


@dataclass(frozen=True)
class ResolventQuery:
    q: float
    x: float

    def __post_init__(self):
        if not self.q >= 0 or not math.isfinite(self.q):
            raise DomainError("q must be finite and nonnegative")
        if not math.isfinite(self.x):
            raise DomainError("x must be finite")


@dataclass(frozen=True)
class ResolventResult:
    q: float
    x: float
    value: float
    error_estimate: float
    truncation_point: float
    segments: int
    notes: tuple = ()

    def __float__(self):
        return float(self.value)


def _default_cfg(cfg):
    return cfg if cfg is not None else QuadratureConfig()


def _spectral(ev: ExponentEvaluator, kind: str, q: float):
    """(A, S) callables for the requested quantity."""
    def parts(lam):
        return ev.parts(np.asarray(lam, dtype=float))

    if kind == "h":
        def A(lam):
            th, om = parts(lam)
            return th / (th * th + om * om)

        def S(lam):
            th, om = parts(lam)
            return -om / (th * th + om * om)
    elif kind == "q":
        def A(lam):
            th, om = parts(lam)
            return (q + th) / ((q + th) ** 2 + om * om)

        def S(lam):
            th, om = parts(lam)
            return -om / ((q + th) ** 2 + om * om)
    elif kind == "gap":
        # q / (Psi (q + Psi)) = 1/Psi - 1/(q + Psi), without the cancellation
        def _g(lam):
            th, om = parts(lam)
            psi = th + 1j * om
            return q / (psi * (q + psi))

        def A(lam):
            return _g(lam).real

        def S(lam):
            return _g(lam).imag
    else:
        raise DomainError(f"unknown spectral kind {kind!r}")
    if math.isfinite(ev.lambda_max):
        return _extended(ev, A), _extended(ev, S), True
    return A, S, False


def _origin_order(A, S, with_one_minus_cos):
    """Local exponent of the combined integrand at lambda = 0."""
    orders = []
    for f, shift in ((A, 2.0 if with_one_minus_cos else 0.0), (S, 1.0)):
        e = fit_power_exponent(f, *ORIGIN_WINDOW)
        if math.isfinite(e):
            orders.append(e + shift)
    return min(min(orders), 1.0) if orders else 1.0


def _head_breaks(lam0):
    return [lam0 * 10.0 ** (-k) for k in range(1, _HEAD_DECADES + 1)]


def _tail_parts(A, S, x, lam0, cfg, skip_flat=False):
    """Contributions from (lam0, inf): flat A, -cos A and sin S (or cos A and sin S)."""
    ax = abs(x)
    sg = 1.0 if x > 0 else -1.0
    parts = []
    if not skip_flat:
        try:
            parts.append(integrate_semi_infinite(A, lam0, cfg))
        except SlowDecay as exc:
            raise AssumptionAViolation(f"spectral integrand decays too slowly: {exc}") from None
    cos_part = _alternating_sum(A, ax, "cos", lam0, cfg, math.inf, 0.0)
    sin_part = _alternating_sum(S, ax, "sin", lam0, cfg, math.inf, 0.0).scaled(sg)
    return parts, cos_part, sin_part


def one_minus_cos_transform(A, S, x, cfg, origin_order):
    r"""(1/pi) \int_0^\infty [(1 - cos lambda x) A + sin(lambda x) S] d lambda."""
    if x == 0.0:
        return IntegralResult(0.0, 0.0, 0, 0.0)
    ax = abs(x)
    lam0 = math.pi / ax

    def head(lam):
        s = np.sin(0.5 * lam * ax)
        return 2.0 * s * s * A(lam) + np.sin(lam * x) * S(lam)

    try:
        h = integrate_singular(head, origin_order, lam0, cfg, breakpoints=_head_breaks(lam0))
    except NonIntegrable as exc:
        raise AssumptionTViolation(str(exc)) from None
    flat, cos_part, sin_part = _tail_parts(A, S, x, lam0, cfg)
    total = combine(h, *flat, cos_part.negated(), sin_part)
    return total.scaled(1.0 / math.pi)


def cos_transform(A, S, x, cfg):
    r"""(1/pi) \int_0^\infty [cos(lambda x) A + sin(lambda x) S] d lambda, A bounded at 0."""
    if x == 0.0:
        try:
            res = integrate_semi_infinite(A, 0.0, cfg)
        except SlowDecay as exc:
            raise AssumptionAViolation(f"spectral integrand decays too slowly: {exc}") from None
        return res.scaled(1.0 / math.pi)
    ax = abs(x)
    lam0 = math.pi / ax

    def head(lam):
        return np.cos(lam * x) * A(lam) + np.sin(lam * x) * S(lam)

    h = integrate_singular(head, 0.0, lam0, cfg, breakpoints=_head_breaks(lam0))
    _, cos_part, sin_part = _tail_parts(A, S, x, lam0, cfg, skip_flat=True)
    return combine(h, cos_part, sin_part).scaled(1.0 / math.pi)


def _finish(q, x, res: IntegralResult, extended, clip=True):
    notes = list(res.notes)
    if extended and "tail estimated" not in notes:
        notes.append("tail estimated")
    value = res.value
    if clip and value < 0:
        notes.append(f"clipped negative value {value:.3e} to 0")
        value = 0.0
    return ResolventResult(q, x, value, res.error_estimate, res.truncation_point,
                           res.segments_used, tuple(notes))


def _require_A(ev, q, cfg):
    rep = check_A(ev, q, cfg, witness=False)
    if rep.status != PASS:
        raise AssumptionAViolation(f"assumption (A) probe {rep.status}: {rep.detail}", rep)


def _require_T(ev, cfg):
    rep = check_T(ev, cfg)
    if rep.status != PASS:
        raise AssumptionTViolation(f"assumption (T) probe {rep.status}: {rep.detail}", rep)


def _check_q(q):
    if not (q > 0 and math.isfinite(q)):
        raise DomainError(f"q must be positive and finite, got {q!r}")


def r_q_result(ev: ExponentEvaluator, q, x, cfg=None) -> ResolventResult:
    """q-resolvent density r_q(x) = (1/pi) int Re(e^{-i lambda x}/(q + Psi)) d lambda."""
    cfg = _default_cfg(cfg)
    q, x = float(q), float(x)
    _check_q(q)
    _require_A(ev, q, cfg)
    A, S, ext = _spectral(ev, "q", q)
    return _finish(q, x, cos_transform(A, S, x, cfg), ext)


def h_q_result(ev: ExponentEvaluator, q, x, cfg=None) -> ResolventResult:
    """h_q(x) = r_q(0) - r_q(-x), as one combined integral."""
    cfg = _default_cfg(cfg)
    q, x = float(q), float(x)
    _check_q(q)
    if x == 0.0:
        return ResolventResult(q, 0.0, 0.0, 0.0, 0.0, 0)
    _require_A(ev, q, cfg)
    A, S, ext = _spectral(ev, "q", q)
    order = _origin_order(A, S, True)
    return _finish(q, x, one_minus_cos_transform(A, S, x, cfg, order), ext)


def h_result(ev: ExponentEvaluator, x, cfg=None) -> ResolventResult:
    """Renormalized zero resolvent h(x) = (1/pi) int Re((1 - e^{i lambda x})/Psi) d lambda."""
    cfg = _default_cfg(cfg)
    x = float(x)
    _require_T(ev, cfg)
    if x == 0.0:
        return ResolventResult(0.0, 0.0, 0.0, 0.0, 0.0, 0)
    A, S, ext = _spectral(ev, "h", 0.0)
    order = _origin_order(A, S, True)
    if order <= -1.0:
        raise AssumptionTViolation(f"h integrand ~ lambda^{order:.4g} at 0 is not integrable")
    return _finish(0.0, x, one_minus_cos_transform(A, S, x, cfg, order), ext)


def h_gap_result(ev: ExponentEvaluator, q, x, cfg=None) -> ResolventResult:
    """h(x) - h_q(x), integrated directly from q/(Psi (q + Psi))."""
    cfg = _default_cfg(cfg)
    q, x = float(q), float(x)
    _check_q(q)
    _require_T(ev, cfg)
    if x == 0.0:
        return ResolventResult(q, 0.0, 0.0, 0.0, 0.0, 0)
    A, S, ext = _spectral(ev, "gap", q)
    order = _origin_order(A, S, True)
    return _finish(q, x, one_minus_cos_transform(A, S, x, cfg, order), ext, clip=False)


def eval_r_q(ev, q, x, cfg=None) -> float:
    return r_q_result(ev, q, x, cfg).value


def eval_h_q(ev, q, x, cfg=None) -> float:
    return h_q_result(ev, q, x, cfg).value


def eval_h(ev, x, cfg=None) -> float:
    return h_result(ev, x, cfg).value


def hitting_laplace_ratio(ev: ExponentEvaluator, q, x, cfg=None) -> float:
    """E_x[exp(-q T_0)] = r_q(-x) / r_q(0)."""
    cfg = _default_cfg(cfg)
    x = float(x)
    _check_q(float(q))
    if x == 0.0:
        return 1.0
    r0 = r_q_result(ev, q, 0.0, cfg)
    if not r0.value > r0.error_estimate:
        raise DegenerateResolvent(f"r_q(0) = {r0.value:.3e} is within its error {r0.error_estimate:.3e}")
    rx = r_q_result(ev, q, -x, cfg)
    return min(max(rx.value / r0.value, 0.0), 1.0)


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------

def thread_count(requested: Optional[int] = None) -> int:
    """Worker count: the request capped by LEVY_RESOLVENT_THREADS when it is set."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return max(1, n)


def map_ordered(fn, items, threads=None):
    """fn over items, possibly concurrently; results keep the input order."""
    items = list(items)
    n = thread_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


_KINDS = {"r_q": r_q_result, "h_q": h_q_result}


def evaluate_grid(ev: ExponentEvaluator, queries, kind="r_q", cfg=None, threads=None):
    """Evaluate r_q, h_q or h (q ignored) at each ResolventQuery, in input order."""
    cfg = _default_cfg(cfg)
    queries = [qu if isinstance(qu, ResolventQuery) else ResolventQuery(*qu) for qu in queries]
    if kind == "h":
        def one(qu):
            return h_result(ev, qu.x, cfg)
    elif kind in _KINDS:
        fn = _KINDS[kind]

        def one(qu):
            return fn(ev, qu.q, qu.x, cfg)
    else:
        raise DomainError(f"kind must be r_q, h_q or h, got {kind!r}")
    return map_ordered(one, queries, threads)


def fmt(v) -> str:
    """17 significant digits, so values round-trip exactly."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def write_grid_csv(results, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["q", "x", "value", "error_estimate", "truncation_point", "segments"])
    for r in results:
        w.writerow([fmt(r.q), fmt(r.x), fmt(r.value), fmt(r.error_estimate),
                    fmt(r.truncation_point), fmt(r.segments)])
