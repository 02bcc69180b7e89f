"""levy-resolvent: tables and verification reports from a JSON process spec.

Exit codes: 0 success, 2 spec error, 3 quadrature failure, 4 assumption
failure, 5 verification failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import asymptotics as asy
from .errors import (
    AssumptionViolation,
    DomainError,
    LevyError,
    NonIntegrable,
    NotApplicable,
    QuadratureFailure,
    SpecError,
)
from .levy import (
    ExponentEvaluator,
    LevyProcessSpec,
    StableDensity,
    TemperedPolynomial,
    ZeroMeasure,
    load_spec,
    spec_to_json,
    validate_spec,
)
from .probes import PASS, check_A, check_T, check_Z
from .quadrature import QuadratureConfig
from .resolvent import fmt, h_q_result, h_result, map_ordered, r_q_result

EXIT_OK, EXIT_SPEC, EXIT_QUAD, EXIT_ASSUMPTION, EXIT_VERIFY = 0, 2, 3, 4, 5
COMMANDS = ("exponent", "resolvent", "h-table", "asymptotics", "probes",
            "verify-stable", "verify-example-1-4")
DEFAULT_GRIDS = {
    "exponent": "0.1:1000:4",
    "resolvent": "0.01:10:2",
    "h-table": "0.01:10:2",
    "asymptotics": "1:1e-4:1",
    "verify-stable": "1:1e-4:1",
    "verify-example-1-4": "1e-2:1e-4:1",
}

log = logging.getLogger("levy_resolvent")


class VerificationFailed(LevyError):
    pass


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    points_per_decade: int
    geometric: bool = True

    def __post_init__(self):
        if self.start == self.stop:
            raise SpecError("grid start and stop must differ", "--grid")
        if self.points_per_decade < 1:
            raise SpecError("points per decade must be at least 1", "--grid")
        if self.geometric and not (self.start > 0 and self.stop > 0):
            raise SpecError("geometric grids need positive endpoints", "--grid")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise SpecError("expected START:STOP:PPD or START:STOP:PPD:lin", "--grid")
        try:
            start, stop, ppd = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise SpecError(f"cannot parse {text!r}", "--grid") from None
        geometric = True
        if len(parts) == 4:
            if parts[3] not in ("geo", "lin"):
                raise SpecError("spacing must be 'geo' or 'lin'", "--grid")
            geometric = parts[3] == "geo"
        return cls(start, stop, ppd, geometric)

    def points(self):
        if self.geometric:
            decades = abs(math.log10(self.stop / self.start))
            n = max(2, int(round(decades * self.points_per_decade)) + 1)
            pts = np.geomspace(self.start, self.stop, n)
        else:
            n = max(2, int(round(abs(self.stop - self.start) * self.points_per_decade)) + 1)
            pts = np.linspace(self.start, self.stop, n)
        return [float(v) for v in pts]


@dataclass
class RunConfig:
    spec_path: str
    command: str
    grid: GridSpec
    q: list = field(default_factory=list)
    out_path: Optional[str] = None
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    mode: str = "auto"
    verbose: bool = False


def build_parser():
    p = argparse.ArgumentParser(
        prog="levy-resolvent",
        description="Exponents, resolvent densities and asymptotic coefficients of Levy processes.")
    p.add_argument("--spec", required=True, metavar="PATH", help="JSON process spec")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--grid", metavar="START:STOP:PPD",
                   help="geometric grid (append ':lin' for a linear one)")
    p.add_argument("--q", type=float, action="append", default=[], metavar="VALUE",
                   help="killing rate; repeat for several")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--abs-tol", type=float, default=None)
    p.add_argument("--mode", choices=("auto", "numeric"), default="auto",
                   help="auto uses closed forms when the spec allows")
    p.add_argument("--verbose", action="store_true")
    return p


def _run_config(ns) -> RunConfig:
    grid = GridSpec.parse(ns.grid or DEFAULT_GRIDS.get(ns.command, "0.01:10:2"))
    kw = {}
    if ns.rel_tol is not None:
        kw["rel_tol"] = ns.rel_tol
    if ns.abs_tol is not None:
        kw["abs_tol"] = ns.abs_tol
    try:
        quad = QuadratureConfig(**kw)
    except DomainError as exc:
        raise SpecError(str(exc), "--rel-tol/--abs-tol") from None
    for q in ns.q:
        if not (q > 0 and math.isfinite(q)):
            raise SpecError(f"q must be positive, got {q}", "--q")
    return RunConfig(ns.spec, ns.command, grid, list(ns.q), ns.out, quad, ns.mode, ns.verbose)


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write_json(obj, path):
    with _output(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False, default=_json_default)
        fh.write("\n")


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(f"not serialisable: {type(v).__name__}")


def _clean(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _evaluator(spec: LevyProcessSpec, rc: RunConfig):
    return ExponentEvaluator.from_spec(spec, prefer_closed_form=rc.mode == "auto")


def _both_signs(points):
    mags = sorted({abs(v) for v in points if v != 0})
    return [-v for v in reversed(mags)] + mags


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_exponent(spec, rc: RunConfig):
    ev = _evaluator(spec, rc)
    lams = rc.grid.points()
    with _output(rc.out_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "theta", "omega", "abs_psi", "err_theta", "err_omega"])
        for lam in lams:
            try:
                rt, rw = ev.results(lam)
            except (QuadratureFailure, NonIntegrable) as exc:
                w.writerow(["failure", str(exc), "", "", "", ""])
                fh.flush()
                raise
            w.writerow([fmt(lam), fmt(rt.value), fmt(rw.value), fmt(math.hypot(rt.value, rw.value)),
                        fmt(rt.error_estimate), fmt(rw.error_estimate)])
            if rc.verbose:
                log.info("lambda=%s segments=%d/%d notes=%s", fmt(lam), rt.segments_used,
                         rw.segments_used, list(rt.notes + rw.notes))
    return EXIT_OK


def cmd_resolvent(spec, rc: RunConfig):
    ev = _evaluator(spec, rc)
    qs = rc.q or [1.0]
    xs = [0.0] + _both_signs(rc.grid.points())
    queries = [(q, x) for q in qs for x in xs]
    results = map_ordered(lambda qx: r_q_result(ev, qx[0], qx[1], rc.quad), queries)
    with _output(rc.out_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q", "x", "value", "error_estimate", "truncation_point", "segments"])
        for r in results:
            w.writerow([fmt(r.q), fmt(r.x), fmt(r.value), fmt(r.error_estimate),
                        fmt(r.truncation_point), fmt(r.segments)])
            if rc.verbose and r.notes:
                log.info("q=%s x=%s notes=%s", fmt(r.q), fmt(r.x), list(r.notes))
    return EXIT_OK


def _require_T(ev, rc):
    rep = check_T(ev, rc.quad)
    if rep.status != PASS:
        print(json.dumps(_clean(rep.to_json()), indent=2, sort_keys=True), file=sys.stderr)
        raise AssumptionViolation(f"assumption (T) probe {rep.status}", rep)


def cmd_h_table(spec, rc: RunConfig):
    ev = _evaluator(spec, rc)
    _require_T(ev, rc)
    xs = _both_signs(rc.grid.points())

    def row(x):
        h = h_result(ev, x, rc.quad)
        hq = [h_q_result(ev, q, x, rc.quad) for q in rc.q]
        return h, hq

    rows = map_ordered(row, xs)
    with _output(rc.out_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["x", "h", "err"]
        for q in rc.q:
            header += [f"h_q={fmt(q)}", f"err_q={fmt(q)}"]
        w.writerow(header)
        for x, (h, hq) in zip(xs, rows):
            line = [fmt(x), fmt(h.value), fmt(h.error_estimate)]
            for r in hq:
                line += [fmt(r.value), fmt(r.error_estimate)]
            w.writerow(line)
            if rc.verbose and h.notes:
                log.info("x=%s notes=%s", fmt(x), list(h.notes))
    return EXIT_OK


def _law_for(spec, ev):
    """(rv, label) describing the exponent at infinity, or the Gaussian normalisation."""
    if ev.gaussian_coefficient > 0:
        return asy.RegularVariationSpec(2.0, ev.gaussian_coefficient, 0.0), "gaussian"
    try:
        return asy.rv_from_evaluator(ev), "closed-form stable"
    except NotApplicable:
        return asy.rv_from_spec(spec), "density"


def _both_sides(ev, rv, grid, rc):
    mags = sorted({abs(v) for v in grid}, reverse=True)
    return {side: asy.empirical_coefficient_estimate(ev, rv, side, mags, rc.quad)
            for side in ("plus", "minus")}


def _asymptotic_document(spec, ev, rv, label, reports, extra=None):
    doc = {
        "spec": spec_to_json(spec),
        "law": dict(rv.to_json(), family=label),
        "predicted": {"plus": reports["plus"].predicted, "minus": reports["minus"].predicted},
        "sides": {k: r.to_json() for k, r in reports.items()},
        "converged": all(r.converged for r in reports.values()),
    }
    if extra:
        doc.update(extra)
    return _clean(doc)


def cmd_asymptotics(spec, rc: RunConfig):
    ev = _evaluator(spec, rc)
    _require_T(ev, rc)
    rv, label = _law_for(spec, ev)
    reports = _both_sides(ev, rv, rc.grid.points(), rc)
    _write_json(_asymptotic_document(spec, ev, rv, label, reports), rc.out_path)
    return EXIT_OK


def cmd_probes(spec, rc: RunConfig):
    ev = _evaluator(spec, rc)
    doc = {
        "validation": validate_spec(spec).to_json(),
        "A": [dict(check_A(ev, q, rc.quad).to_json(), q=q) for q in (rc.q or [1.0])],
        "T": check_T(ev, rc.quad).to_json(),
        "Z": check_Z(ev, rc.quad).to_json(),
    }
    _write_json(_clean(doc), rc.out_path)
    return EXIT_OK


def cmd_verify_stable(spec, rc: RunConfig):
    gaussian = isinstance(spec.measure, ZeroMeasure) and spec.a > 0
    if not (gaussian or spec.is_strictly_stable()):
        raise SpecError("verify-stable needs a strictly stable spec (stable measure, a = 0, "
                        "b omitted or strict) or a Gaussian spec without jumps", "measure")
    ev = _evaluator(spec, rc)
    _require_T(ev, rc)
    rv, label = _law_for(spec, ev)
    reports = _both_sides(ev, rv, rc.grid.points(), rc)
    doc = _asymptotic_document(spec, ev, rv, label, reports)
    _write_json(doc, rc.out_path)
    if not doc["converged"]:
        raise VerificationFailed("coefficient estimates did not converge")
    return EXIT_OK


def cmd_verify_example(spec, rc: RunConfig):
    m = spec.measure
    if not isinstance(m, TemperedPolynomial) or spec.a != 0:
        raise SpecError("verify-example-1-4 needs a tempered measure with a = 0", "measure")
    ev = _evaluator(spec, rc)
    a_rep = check_A(ev, 1.0, rc.quad)
    t_rep = check_T(ev, rc.quad)
    probes = {"A": a_rep.to_json(), "T": t_rep.to_json()}
    if a_rep.status != PASS or t_rep.status != PASS:
        _write_json(_clean({"probes": probes}), rc.out_path)
        raise AssumptionViolation("assumption probes did not pass")
    rv = asy.rv_from_spec(spec)
    reports = _both_sides(ev, rv, rc.grid.points(), rc)
    doc = _asymptotic_document(spec, ev, rv, "tempered", reports, {"probes": probes})
    _write_json(doc, rc.out_path)
    if not doc["converged"]:
        raise VerificationFailed("coefficient estimates did not converge")
    return EXIT_OK


HANDLERS = {
    "exponent": cmd_exponent,
    "resolvent": cmd_resolvent,
    "h-table": cmd_h_table,
    "asymptotics": cmd_asymptotics,
    "probes": cmd_probes,
    "verify-stable": cmd_verify_stable,
    "verify-example-1-4": cmd_verify_example,
}


def run(rc: RunConfig) -> int:
    spec = load_spec(rc.spec_path)
    report = validate_spec(spec)
    if not report.passed:
        bad = [c for c in report.checks if not c.passed]
        raise SpecError("; ".join(f"{c.name}: {c.detail}" for c in bad), "measure")
    return HANDLERS[rc.command](spec, rc)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return run(_run_config(ns))
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except AssumptionViolation as exc:
        print(f"assumption failure: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (QuadratureFailure, NonIntegrable, DomainError, NotApplicable) as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUAD


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
