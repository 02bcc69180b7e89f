"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run directly (python tests/test_acceptance.py) or through pytest.
"""

import math
import sys

import numpy as np
import pytest
from scipy import integrate

from levy_resolvent import (
    ExponentEvaluator,
    ExponentialDensity,
    LevyProcessSpec,
    RegularVariationSpec,
    TemperedPolynomial,
    c_alpha,
    check_A,
    check_T,
    coeff_c_pm,
    density_to_exponent_rv,
    empirical_coefficient_estimate,
    eval_h,
    eval_r_q,
    gaussian_coeff_c_pm,
    h_result,
    ratio_hq_h,
    rv_from_spec,
)
from levy_resolvent.cli import main as cli_main

from conftest import stable_c_pm

pytestmark = pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")
    assert ok, detail


def c_alpha_by_quadrature(alpha):
    # (1/pi) int_0^inf (1 - cos x) x^-alpha dx, split at 1; the head uses an algebraic weight
    head = integrate.quad(lambda x: 0.5 * np.sinc(x / (2 * np.pi)) ** 2, 0, 1, weight="alg",
                          wvar=(2 - alpha, 0), epsabs=1e-15, epsrel=1e-14)[0]
    mass = 1 / (alpha - 1)
    cos_tail = integrate.quad(lambda x: x**-alpha, 1, np.inf, weight="cos", wvar=1.0, limlst=400)[0]
    return (head + mass - cos_tail) / math.pi


def test_criterion_01_special_constants(capsys):
    worst = max(abs(c_alpha(a) - c_alpha_by_quadrature(a)) for a in (1.1, 1.5, 1.9, 2.5, 2.9))
    exact = max(abs(c_alpha(2.0) - 0.5), abs(c_alpha(1.5) - math.sqrt(2 / math.pi)))
    ok = worst <= 1e-10 and exact <= 1e-12
    report(capsys, 1, "C_alpha closed form vs quadrature", ok,
           f"max |closed - quad| = {worst:.2e}, max exact-value error = {exact:.2e}")


def test_criterion_02_brownian(capsys):
    ev = ExponentEvaluator.brownian(0.5)
    xs = [s * v for v in (0.01, 0.1, 1.0, 10.0) for s in (1, -1)]
    worst_r = 0.0
    for q in (0.5, 2.0):
        s = math.sqrt(2 * q)
        for x in xs:
            exact = math.exp(-s * abs(x)) / s
            worst_r = max(worst_r, abs(eval_r_q(ev, q, x) - exact) / exact)
    worst_h = max(abs(eval_h(ev, x) - abs(x)) / abs(x) for x in xs)
    pair = gaussian_coeff_c_pm(ev)
    ok = worst_r <= 1e-6 and worst_h <= 1e-6 and pair == (1.0, 1.0)
    report(capsys, 2, "Brownian oracle", ok,
           f"max rel err r_q = {worst_r:.2e}, h = {worst_h:.2e}, Gaussian pair = {pair}")


def test_criterion_03_stable_closed_form(capsys):
    worst_h, worst_flat = 0.0, 0.0
    for alpha in (1.2, 1.5, 1.8):
        for skew in (-0.5, 0.0, 0.5):
            ev = ExponentEvaluator.stable_from_skewness(alpha, 1.0, skew)
            ref = stable_c_pm(alpha, ev.mode.c_theta, ev.mode.c_omega)
            for sign, c_ref in ((1, ref[0]), (-1, ref[1])):
                ests = []
                for mag in (0.01, 1.0, 100.0):
                    x = sign * mag
                    h = eval_h(ev, x)
                    worst_h = max(worst_h, abs(h - c_ref * mag ** (alpha - 1)) / (c_ref * mag ** (alpha - 1)))
                    ests.append(h / mag ** (alpha - 1))
                worst_flat = max(worst_flat, (max(ests) - min(ests)) / abs(np.mean(ests)))
    ok = worst_h <= 1e-5 and worst_flat <= 1e-5
    report(capsys, 3, "stable closed form h = c|x|^(alpha-1)", ok,
           f"max rel err = {worst_h:.2e}, max spread of c-hat = {worst_flat:.2e}")


def test_criterion_04_density_to_exponent(capsys):
    # b is the drift that makes the process strictly stable
    spec = LevyProcessSpec.strictly_stable(1.0, 2.0, 1.5)
    ev = ExponentEvaluator.numeric(spec)
    rv = density_to_exponent_rv(1.5, 1.0, 2.0)
    lam = 1e4
    norm = lam**1.5 * float(rv.L(lam))
    th, om = ev.parts(lam)
    want_t, want_w = math.pi * c_alpha(2.5), (-1 / 3) * math.pi * c_alpha(1.5) / 1.5
    dt, dw = abs(th / norm - want_t) / want_t, abs(om / norm - want_w) / abs(want_w)
    drift_free = abs((om - spec.b * lam) / norm - want_w) / abs(want_w)
    ok = dt <= 0.01 and dw <= 0.01
    report(capsys, 4, "exponent law from the density", ok,
           f"theta dev = {dt:.2e}, omega dev = {dw:.2e} (b = {spec.b:g}; with b = 0 the omega dev "
           f"would be {drift_free:.2e})")


def test_criterion_05_example(capsys, example_spec, example_ev):
    a_rep, t_rep = check_A(example_ev), check_T(example_ev)
    rv = rv_from_spec(example_spec)
    grid = [1e-2, 1e-3, 1e-4]
    devs, ests = {}, {}
    for side in ("plus", "minus"):
        rep = empirical_coefficient_estimate(example_ev, rv, side, grid)
        devs[side] = rep.rel_deviation_at_finest
        ests[side] = (rep.finest.estimate, rep.predicted, rep.finest.h_value)
    ok = a_rep.passed and t_rep.passed and all(abs(d) <= 0.05 for d in devs.values())
    # the literal prefactor (K+ + K-) applied to h/|x|^(alpha-1) misses by a factor (K+ + K-)^2
    L = example_spec.measure.k_plus + example_spec.measure.k_minus
    literal = {s: (ests[s][2] / 1e-2, L * ests[s][1]) for s in ests}
    report(capsys, 5, "tempered example end to end", ok,
           f"(A) {a_rep.status}, (T) {t_rep.status}; c-hat(+1e-4) = {ests['plus'][0]:.5f} vs "
           f"{ests['plus'][1]:.5f} ({100 * devs['plus']:+.2f}%), c-hat(-1e-4) = {ests['minus'][0]:.5f} "
           f"vs {ests['minus'][1]:.5f} ({100 * devs['minus']:+.2f}%); without the L normalisation "
           f"h/|x|^0.5 = {literal['plus'][0]:.4f} against a literal (K+ + K-) c+ = {literal['plus'][1]:.4f}")


def test_criterion_06_hq_over_h(capsys):
    lines, ok = [], True
    for alpha in (1.2, 1.5, 1.8):
        ev = ExponentEvaluator.stable(1.0, 0.0, alpha)
        rep = ratio_hq_h(ev, 1e-2, [1e-1, 1e-2, 1e-3])
        dev = [abs(p.estimate - 1) for p in rep.points]
        good = 0.95 <= rep.points[-1].estimate <= 1.05 and dev[0] > dev[1] > dev[2]
        ok &= good
        lines.append(f"alpha={alpha}: ratio(1e-3) = {rep.points[-1].estimate:.6f}")
    report(capsys, 6, "h_q/h -> 1 at the origin", ok, "; ".join(lines))


def test_criterion_07_drifted_brownian(capsys):
    ev = ExponentEvaluator.brownian(0.5, 1.0)
    pair = gaussian_coeff_c_pm(ev)
    numeric = gaussian_coeff_c_pm(ExponentEvaluator.numeric(LevyProcessSpec.brownian(0.5, 1.0)))
    minus = h_result(ev, -1e-3).value / 1e-3
    plus = h_result(ev, 1e-3).value / 1e-3
    ok = (pair == (0.0, 2.0) and abs(minus - 2) <= 0.04 and plus <= 0.1
          and max(abs(numeric[0]), abs(numeric[1] - 2)) <= 1e-6)
    report(capsys, 7, "Gaussian coefficients with drift", ok,
           f"predicted {pair} (quadrature path {numeric[0]:.2e}, {numeric[1]:.8f}); "
           f"h/|x| at -1e-3 = {minus:.5f}, at +1e-3 = {plus:.2e}")


def test_criterion_08_small_lambda(capsys):
    ev = ExponentEvaluator.numeric(LevyProcessSpec(0.0, 0.0, ExponentialDensity(1.0)))
    lam = 1e-3
    th, om = ev.parts(lam)
    dw = abs(om / lam + 2 / math.e) / (2 / math.e)
    dt = abs(th / lam**2 - 1)
    ok = dw <= 0.01 and dt <= 0.01
    report(capsys, 8, "exponent laws at lambda -> 0", ok,
           f"omega/lambda = {om / lam:.6f} (dev {dw:.2e}), theta/lambda^2 = {th / lam**2:.6f} (dev {dt:.2e})")


def _random_evaluator(rng):
    kind = rng.integers(4)
    if kind == 0:
        return ExponentEvaluator.stable(rng.uniform(0.1, 3), rng.uniform(-3, 3), rng.uniform(1.05, 1.95))
    if kind == 1:
        return ExponentEvaluator.brownian(rng.uniform(0, 2), rng.uniform(-2, 2))
    if kind == 2:
        side = "plus" if rng.random() < 0.5 else "minus"
        return ExponentEvaluator.numeric(LevyProcessSpec(rng.uniform(0, 1), rng.uniform(-1, 1),
                                                         ExponentialDensity(rng.uniform(0.2, 5), side)))
    return ExponentEvaluator.numeric(LevyProcessSpec(0.0, rng.uniform(-1, 1), TemperedPolynomial(
        rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(1.1, 1.9), rng.uniform(0.1, 1.9))))


def test_criterion_09_invariants(capsys, example_ev, gaussian_with_jumps):
    rng = np.random.default_rng(20261016)
    parity_failures = 0
    for _ in range(1000):
        ev = _random_evaluator(rng)
        lam = 10 ** rng.uniform(-4, 4)
        th, om = ev.parts(np.array([lam, -lam]))
        parity_failures += not (th[0] == th[1] >= 0 and om[0] == -om[1])
    suite = [ExponentEvaluator.brownian(0.5), ExponentEvaluator.brownian(0.5, 1.0), gaussian_with_jumps,
             example_ev] + [ExponentEvaluator.stable_from_skewness(a, 1.0, s)
                            for a in (1.2, 1.5, 1.8) for s in (-0.5, 0.0, 0.5)]
    h_failures = 0
    for ev in suite:
        h_failures += eval_h(ev, 0.0) != 0.0
        h_failures += sum(eval_h(ev, x) < 0 for x in (-0.1, 0.1))
    worst_sum = 0.0
    for _ in range(1000):
        alpha, ct, cw = rng.uniform(1.01, 1.99), 10 ** rng.uniform(-2, 2), rng.uniform(-50, 50)
        cp, cm = coeff_c_pm(RegularVariationSpec(alpha, ct, cw))
        expected = 2 * c_alpha(alpha) * ct / (ct * ct + cw * cw)
        worst_sum = max(worst_sum, abs(cp + cm - expected) / max(1.0, abs(cp) + abs(cm)))
    swap_failures = 0
    for _ in range(200):
        alpha, kp, km = rng.uniform(1.05, 1.95), rng.uniform(0, 5), rng.uniform(0.01, 5)
        a, b = density_to_exponent_rv(alpha, kp, km), density_to_exponent_rv(alpha, km, kp)
        swap_failures += not (a.c_theta == b.c_theta and abs(a.c_omega + b.c_omega) <= 1e-14 * abs(a.c_omega)
                              + 1e-300)
    ok = parity_failures == 0 and h_failures == 0 and worst_sum <= 1e-12 and swap_failures == 0
    report(capsys, 9, "invariant suites", ok,
           f"parity failures {parity_failures}/1000, h failures {h_failures}, "
           f"worst coefficient-sum residual {worst_sum:.1e}, K-swap failures {swap_failures}/200")


def test_criterion_10_determinism(capsys, tmp_path):
    spec = tmp_path / "example.json"
    spec.write_text('{"a": 0, "b": 0, "measure": {"kind": "tempered", "kPlus": 2, "kMinus": 1, '
                    '"alpha": 1.5, "betaTail": 1}}')
    blobs = {}
    for command, grid in (("exponent", "0.1:1000:2"), ("h-table", "0.01:1:1")):
        runs = []
        for i in range(2):
            out = tmp_path / f"{command}-{i}.csv"
            code = cli_main(["--spec", str(spec), "--command", command, "--grid", grid, "--q", "0.5",
                             "--out", str(out)])
            runs.append((code, out.read_bytes()))
        blobs[command] = runs
    ok = all(r[0][0] == r[1][0] == 0 and r[0][1] == r[1][1] for r in blobs.values())
    report(capsys, 10, "byte-identical CLI output", ok,
           ", ".join(f"{c}: {len(r[0][1])} bytes, identical={r[0][1] == r[1][1]}" for c, r in blobs.items()))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
