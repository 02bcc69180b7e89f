"""Semi-infinite and oscillatory Fourier-type integrals.

The oscillatory engine cuts the range at the zeros of the trigonometric
factor, integrates each half period with Gauss-Kronrod, and sums the
resulting alternating series with Wynn's epsilon algorithm.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError, QuadratureFailure, SlowDecay
from .core import (
    EPS,
    IntegralResult,
    QuadratureConfig,
    combine,
    evaluate,
    gauss_kronrod,
    gk15,
    integrate_singular,
)

FIT_SAMPLES = 16
# frontier used to probe the decay of integrands that can be evaluated anywhere
_FAR_FRONTIER = 1e8


def fit_power_exponent(f, lo, hi, n=FIT_SAMPLES):
    """Least-squares slope of log|f| against log x on n log-spaced points.

    Returns -inf when f vanishes on the whole window (faster than any power)
    and nan when the window mixes zero and nonzero values.
    """
    xs = np.geomspace(lo, hi, n)
    ys = np.abs(np.asarray(f(xs), dtype=float))
    if not np.all(np.isfinite(ys)):
        return math.nan
    if np.all(ys == 0):
        return -math.inf
    if np.any(ys == 0):
        # support ends inside the window: treat as fast decay if the zeros are at the far end
        nz = np.flatnonzero(ys > 0)
        if nz[-1] < n - 1 and np.all(ys[: nz[-1] + 1] > 0):
            return -math.inf
        return math.nan
    slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
    return float(slope)


def wynn_epsilon(partial_sums):
    """Wynn epsilon extrapolation of a sequence, highest reliable even column.

    Differences at rounding level end the table: the column holding them has
    already converged, and dividing by them would only amplify noise.
    """
    s = [float(v) for v in partial_sums]
    if len(s) < 3:
        return s[-1]
    scale = max(abs(v) for v in s)
    noise = 16.0 * EPS * max(scale, 1e-300)
    prev = [0.0] * (len(s) + 1)
    curr = s
    best = s[-1]
    for k in range(1, len(s)):
        nxt = []
        for j in range(len(curr) - 1):
            d = curr[j + 1] - curr[j]
            # odd columns hold reciprocals; only even columns are estimates
            if (k % 2 == 1 and abs(d) <= noise) or d == 0.0 or not math.isfinite(d):
                return best if k % 2 == 0 else curr[-1]
            nxt.append(prev[j + 1] + 1.0 / d)
        prev, curr = curr, nxt
        if k % 2 == 0:
            cand = curr[-1]
            if not math.isfinite(cand) or abs(cand) > 1e3 * scale:
                return best
            best = cand
        if len(curr) == 1:
            break
    return best


def _fitted_tail(g, frontier, n=FIT_SAMPLES):
    r"""Power-law model g ~ C t^{-p} on the decade below frontier.

    Returns (p, \int_frontier^\infty C t^{-p} dt, uncertainty).
    """
    lo = frontier / 10.0
    xs = np.geomspace(lo, frontier, n)
    ys = np.asarray(g(xs), dtype=float)
    if np.all(ys == 0):
        return math.inf, 0.0, 0.0
    if np.any(ys == 0) or not np.all(np.isfinite(ys)):
        raise QuadratureFailure("cannot fit the tail decay of the integrand")
    sgn = float(np.sign(ys[-1]))
    if np.any(np.sign(ys) != sgn):
        raise QuadratureFailure("integrand changes sign in the tail-fit window")
    lx, ly = np.log(xs), np.log(np.abs(ys))
    slope, icpt = np.polyfit(lx, ly, 1)
    p = -float(slope)
    if p <= 1.0:
        return p, math.inf, math.inf
    tail = sgn * math.exp(icpt) * frontier ** (1.0 - p) / (p - 1.0)
    half = n // 2
    s2, i2 = np.polyfit(lx[half:], ly[half:], 1)
    p2 = -float(s2)
    tail2 = sgn * math.exp(i2) * frontier ** (1.0 - p2) / (p2 - 1.0) if p2 > 1.0 else 2 * tail
    return p, tail, abs(tail - tail2) + 1e-3 * abs(tail)


def decay_exponent(g, t0, t_max=math.inf):
    """Fitted power decay p of |g(t)| ~ t^{-p} at the integration frontier."""
    frontier = t_max if math.isfinite(t_max) else max(t0, 1.0) * _FAR_FRONTIER
    slope = fit_power_exponent(g, frontier / 10.0, frontier)
    return -slope


def integrate_semi_infinite(g, t0, cfg: QuadratureConfig, t_max=math.inf,
                            origin_order=0.0) -> IntegralResult:
    r"""\int_{t0}^\infty g(t) dt for a non-oscillatory g with power decay.

    With t_max infinite the substitution t = t1/s maps the tail onto (0, 1].
    With a finite t_max (the integrand cannot be evaluated beyond it) the
    remainder is a power-law extrapolation fitted on the last decade and is
    flagged as estimated.
    """
    t0 = float(t0)
    if t0 < 0:
        raise DomainError("t0 must be nonnegative")
    parts = []
    t1 = t0
    if t0 == 0.0:
        t1 = min(1.0, t_max)
        parts.append(integrate_singular(g, origin_order, t1, cfg))
    if math.isinf(t_max):
        p = decay_exponent(g, t1)
        if math.isnan(p):
            raise QuadratureFailure("cannot determine the decay of the integrand")
        if p <= 1.0:
            raise SlowDecay(f"integrand decays like t^-{p:.3g}; need an exponent above 1")

        def mapped(s):
            return g(t1 / s) * (t1 / (s * s))

        res = integrate_singular(mapped, min(p - 2.0, 1.0), 1.0, cfg)
        parts.append(IntegralResult(res.value, res.error_estimate, res.segments_used,
                                    math.inf, res.converged))
        return combine(*parts, truncation_point=math.inf)
    if t_max > t1:
        parts.append(gauss_kronrod(g, t1, t_max, cfg, geometric=True))
    p, tail, unc = _fitted_tail(g, t_max)
    if p <= 1.0:
        raise SlowDecay(f"integrand decays like t^-{p:.3g}; need an exponent above 1")
    parts.append(IntegralResult(tail, unc, 0, math.inf, True, ("tail estimated",)))
    return combine(*parts, truncation_point=t_max)


def _weight(kind, freq):
    if kind == "cos":
        return lambda t: np.cos(freq * t)
    if kind == "sin":
        return lambda t: np.sin(freq * t)
    raise DomainError(f"unknown oscillation kind {kind!r}")


def _alternating_sum(g, freq, kind, start, cfg, t_max, origin_order):
    r"""\int_start^\infty g(t) w(freq t) dt for w = cos or sin, freq > 0."""
    w = _weight(kind, freq)
    phase = 0.5 if kind == "cos" else 0.0
    period = math.pi / freq

    def integrand(t):
        return g(t) * w(t)

    k0 = math.floor(start / period - phase) + 1
    first_zero = (k0 + phase) * period
    if first_zero >= t_max:
        raise QuadratureFailure("frequency too low to resolve any half period below t_max")
    if start == 0.0 and origin_order < 0:
        order = origin_order + (1.0 if kind == "sin" else 0.0)
        head = integrate_singular(integrand, order, first_zero, cfg)
    else:
        head = gauss_kronrod(integrand, start, first_zero, cfg)

    order_m = cfg.acceleration_order
    window = 2 * order_m + 1
    target_rel = cfg.tail_budget
    partial = [head.value]
    terms = []
    seg_err = head.error_estimate
    segments = head.segments_used
    estimates = []
    k = k0
    batch = window + 1
    converged = False
    reason = "max segments"
    last_edge = first_zero
    while True:
        n_avail = cfg.max_segments - segments
        if n_avail <= 0:
            break
        nb = min(batch, n_avail)
        ks = np.arange(k, k + nb)
        lefts = (ks + phase) * period
        rights = lefts + period
        inside = rights <= t_max
        if not np.any(inside):
            reason = "frequency cap"
            break
        lefts, rights = lefts[inside], rights[inside]
        vals, errs = gk15(integrand, lefts, rights)
        seg_tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(vals))
        for i in np.flatnonzero(errs > seg_tol):
            r = gauss_kronrod(integrand, lefts[i], rights[i], cfg)
            vals[i], errs[i] = r.value, r.error_estimate
            segments += r.segments_used - 1
        segments += lefts.size
        seg_err += float(np.sum(errs))
        last_edge = float(rights[-1])
        for v in vals:
            terms.append(float(v))
            partial.append(partial[-1] + float(v))
        k += lefts.size
        if len(partial) >= window + 2:
            estimates = [wynn_epsilon(partial[len(partial) - window - j: len(partial) - j])
                         for j in (2, 1, 0)]
            est = estimates[-1]
            acc_err = abs(est - estimates[1]) + abs(est - estimates[0])
            # a wild extrapolate must not loosen the tolerance
            tol = max(cfg.abs_tol, target_rel * min(abs(est), max(abs(v) for v in partial)))
            small_terms = max(abs(terms[-1]), abs(terms[-2])) <= tol
            if small_terms:
                converged = True
                reason = "terms negligible"
                break
            if acc_err <= tol:
                converged = True
                reason = "extrapolated"
                break
        if lefts.size < nb:
            reason = "frequency cap"
            break
        batch = max(window + 1, int(batch * 1.5))

    scale = max(abs(v) for v in partial)
    if estimates:
        value = estimates[-1]
        acc_err = abs(value - estimates[1]) + abs(value - estimates[0])
        if reason == "terms negligible":
            value = partial[-1]
            acc_err = max(abs(terms[-1]), abs(terms[-2]))
    else:
        value = partial[-1] + 0.5 * terms[-1] if terms else partial[-1]
        acc_err = abs(terms[-1]) if terms else math.inf
    notes = ()
    if converged and acc_err > max(cfg.abs_tol, cfg.rel_tol * abs(value)):
        converged, reason = False, "extrapolation unreliable"
    if not converged:
        # an alternating remainder is bounded by the next term
        raw = abs(terms[-1]) if terms else math.inf
        acc_err = max(acc_err, raw)
        notes = (f"acceleration stopped: {reason}",)
    err = seg_err + acc_err + 50.0 * EPS * scale
    return IntegralResult(value, err, segments, last_edge, converged, notes)


def integrate_fourier_tail(g, x, lambda0, cfg: QuadratureConfig, kind="cos",
                           t_max=math.inf, origin_order=0.0) -> IntegralResult:
    r"""\int_{lambda0}^\infty g(t) w(t x) dt for a real g with power decay.

    kind is "cos", "sin", "one_minus_cos" or "none" (no oscillating factor).
    origin_order describes g(t) ~ t^s at t = 0 when lambda0 = 0.  g must be
    vectorised.  For "none" and "one_minus_cos" g must decay faster than 1/t.
    """
    lambda0 = float(lambda0)
    x = float(x)
    if lambda0 < 0:
        raise DomainError("lambda0 must be nonnegative")
    if kind == "none" or (x == 0.0 and kind == "cos"):
        return integrate_semi_infinite(g, lambda0, cfg, t_max=t_max, origin_order=origin_order)
    if x == 0.0:
        return IntegralResult(0.0, 0.0, 0, lambda0)
    freq = abs(x)
    if kind in ("cos", "sin"):
        p = decay_exponent(g, max(lambda0, freq), t_max)
        if not p > 0.0:
            raise SlowDecay(f"oscillatory integrand amplitude decays like t^-{p:.3g}")
        res = _alternating_sum(g, freq, kind, lambda0, cfg, t_max, origin_order)
        return res.negated() if (kind == "sin" and x < 0) else res
    if kind != "one_minus_cos":
        raise DomainError(f"unknown kind {kind!r}")
    lam1 = max(lambda0, math.pi / freq)
    parts = []
    if lam1 > lambda0:
        def head(t):
            s = np.sin(0.5 * freq * t)
            return 2.0 * s * s * g(t)

        if lambda0 == 0.0:
            parts.append(integrate_singular(head, origin_order + 2.0, lam1, cfg))
        else:
            parts.append(gauss_kronrod(head, lambda0, lam1, cfg))
    flat = integrate_semi_infinite(g, lam1, cfg, t_max=t_max)
    osc = _alternating_sum(g, freq, "cos", lam1, cfg, t_max, 0.0)
    parts.extend([flat, osc.negated()])
    return combine(*parts, truncation_point=max(flat.truncation_point, osc.truncation_point))
