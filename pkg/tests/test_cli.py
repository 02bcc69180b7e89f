import csv
import json
import math
import subprocess
import sys

import pytest

from levy_resolvent import c_alpha
from levy_resolvent.cli import GridSpec, main
from levy_resolvent.errors import SpecError

C15 = math.sqrt(2 / math.pi)


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


@pytest.fixture
def specs(tmp_path):
    return {
        "bm": write(tmp_path, "bm.json", {"a": 0.5, "b": 0, "measure": {"kind": "zero"}}),
        "dbm": write(tmp_path, "dbm.json", {"a": 0.5, "b": 1, "measure": {"kind": "zero"}}),
        "stable": write(tmp_path, "st.json", {"a": 0, "measure": {"kind": "stable", "alpha": 1.5,
                                                                  "cTheta": 1, "skewness": 0}}),
        "stable_k": write(tmp_path, "stk.json", {"a": 0, "measure": {"kind": "stable", "alpha": 1.5,
                                                                     "kPlus": 1, "kMinus": 1}}),
        "poisson": write(tmp_path, "cp.json", {"a": 0, "measure": {"kind": "custom", "xiPlus": "exp(-x)",
                                                                   "xiMinus": "exp(-x)"}}),
        "bad": write(tmp_path, "bad.json", {"a": 0, "measure": {"kind": "stable", "alpha": 1.5, "kPlus": 1,
                                                                "kMinus": 1, "bogus": 1}}),
    }


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_grid_spec():
    g = GridSpec.parse("0.1:10:2")
    assert g.points() == pytest.approx([0.1, 10**-0.5, 1, 10**0.5, 10])
    assert GridSpec.parse("1:1e-4:1").points() == pytest.approx([1, 0.1, 0.01, 1e-3, 1e-4])
    assert GridSpec.parse("0:1:4:lin").points() == pytest.approx([0, 0.25, 0.5, 0.75, 1])
    for bad in ("1:1:3", "1:2", "1:10:0", "-1:1:2", "a:b:c", "1:10:2:log"):
        with pytest.raises(SpecError):
            GridSpec.parse(bad)


def test_exponent_brownian(specs, tmp_path):
    out = tmp_path / "e.csv"
    assert main(["--spec", specs["bm"], "--command", "exponent", "--grid", "0.1:10:3", "--out", str(out)]) == 0
    table = rows(out)
    assert table[0] == ["lambda", "theta", "omega", "abs_psi", "err_theta", "err_omega"]
    for r in table[1:]:
        lam, theta = float(r[0]), float(r[1])
        assert abs(theta - 0.5 * lam * lam) <= 1e-12


def test_exponent_numeric_matches_closed_form(specs, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--spec", specs["stable_k"], "--command", "exponent", "--out", str(a)]) == 0
    assert main(["--spec", specs["stable_k"], "--command", "exponent", "--mode", "numeric", "--out", str(b)]) == 0
    closed, numeric = rows(a)[1:], rows(b)[1:]
    gap = max(abs(float(n[1]) - float(c[1])) / float(c[1]) for c, n in zip(closed, numeric))
    assert gap < 1e-6


def test_exponent_quadrature_failure_flushes_row(specs, tmp_path, capsys):
    out = tmp_path / "e.csv"
    code = main(["--spec", specs["stable_k"], "--command", "exponent", "--mode", "numeric",
                 "--grid", "1e5:1e7:1", "--out", str(out)])
    assert code == 3
    table = rows(out)
    assert table[1][0] == "100000" and table[-1][0] == "failure"
    assert "quadrature failure" in capsys.readouterr().err


def test_malformed_json_names_field(specs, tmp_path, capsys):
    assert main(["--spec", specs["bad"], "--command", "exponent"]) == 2
    assert "measure.bogus" in capsys.readouterr().err
    broken = write(tmp_path, "broken.json", '{"a": 0.5, "measure": {"kind": "zero"')
    assert main(["--spec", broken, "--command", "exponent"]) == 2
    assert "document" in capsys.readouterr().err
    assert main(["--spec", str(tmp_path / "missing.json"), "--command", "exponent"]) == 2


def test_invalid_measure_is_spec_error(tmp_path, capsys):
    p = write(tmp_path, "s.json", {"a": 0, "measure": {"kind": "custom", "xiPlus": "x**(-3.2)"}})
    assert main(["--spec", p, "--command", "exponent"]) == 2
    assert "origin_integrability" in capsys.readouterr().err


def test_h_table_brownian(specs, tmp_path):
    out = tmp_path / "h.csv"
    code = main(["--spec", specs["bm"], "--command", "h-table", "--grid", "0.01:10:1",
                 "--q", "0.5", "--q", "2", "--out", str(out)])
    assert code == 0
    table = rows(out)
    assert table[0] == ["x", "h", "err", "h_q=0.5", "err_q=0.5", "h_q=2", "err_q=2"]
    xs = [float(r[0]) for r in table[1:]]
    assert xs == sorted(xs) and xs[0] == -10 and xs[-1] == 10
    for r in table[1:]:
        x = float(r[0])
        assert abs(float(r[1]) - abs(x)) <= 1e-6
        assert float(r[3]) == pytest.approx(1 - math.exp(-abs(x)), rel=1e-8)


def test_h_table_stable_homogeneity(specs, tmp_path):
    out = tmp_path / "h.csv"
    assert main(["--spec", specs["stable"], "--command", "h-table", "--out", str(out)]) == 0
    for r in rows(out)[1:]:
        x, h = float(r[0]), float(r[1])
        assert h / abs(x) ** 0.5 == pytest.approx(C15, rel=1e-9)


def test_h_table_assumption_failure(specs, capsys):
    assert main(["--spec", specs["poisson"], "--command", "h-table"]) == 4
    err = capsys.readouterr().err
    assert '"status": "fail"' in err and "assumption failure" in err


def test_verify_stable(specs, tmp_path):
    out = tmp_path / "v.json"
    assert main(["--spec", specs["stable"], "--command", "verify-stable", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["predicted"] == pytest.approx({"plus": C15, "minus": C15})
    assert doc["sides"]["plus"]["converged"] and doc["sides"]["minus"]["converged"]


def test_verify_gaussian(specs, tmp_path):
    out = tmp_path / "v.json"
    assert main(["--spec", specs["dbm"], "--command", "verify-stable", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["predicted"] == {"plus": 0.0, "minus": 2.0}
    assert doc["sides"]["plus"]["criterion"] == "decay"


def test_verify_failure_exit_5(specs, tmp_path):
    out = tmp_path / "v.json"
    assert main(["--spec", specs["dbm"], "--command", "verify-stable", "--grid", "10:1:1", "--out", str(out)]) == 5
    assert json.loads(out.read_text())["converged"] is False


def test_verify_wrong_family(specs):
    assert main(["--spec", specs["poisson"], "--command", "verify-stable"]) == 2
    assert main(["--spec", specs["stable"], "--command", "verify-example-1-4"]) == 2


def test_probes_and_resolvent(specs, tmp_path):
    out = tmp_path / "p.json"
    assert main(["--spec", specs["poisson"], "--command", "probes", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["A"][0]["status"] == "fail" and doc["T"]["status"] == "fail"
    out = tmp_path / "r.csv"
    assert main(["--spec", specs["bm"], "--command", "resolvent", "--q", "0.5", "--grid", "1:10:1",
                 "--out", str(out)]) == 0
    table = rows(out)
    assert table[0] == ["q", "x", "value", "error_estimate", "truncation_point", "segments"]
    assert float(table[1][2]) == pytest.approx(1.0, rel=1e-10)


def test_asymptotics_json(specs, tmp_path):
    out = tmp_path / "a.json"
    assert main(["--spec", specs["stable"], "--command", "asymptotics", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["law"]["family"] == "closed-form stable" and doc["converged"]
    assert doc["predicted"]["plus"] == pytest.approx(c_alpha(1.5))


def test_outputs_are_byte_identical(specs, tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"h{i}.csv"
        assert main(["--spec", specs["stable"], "--command", "h-table", "--q", "0.1", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_console_script(specs, tmp_path):
    out = tmp_path / "e.csv"
    proc = subprocess.run([sys.executable, "-m", "levy_resolvent", "--spec", specs["bm"],
                           "--command", "exponent", "--grid", "1:10:1", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert len(rows(out)) == 3
