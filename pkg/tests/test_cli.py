import csv
import io
import subprocess
import sys
from fractions import Fraction

import pytest

from salemperm.cli import main
from salemperm.numerals import PartitionParams
from salemperm.salem import SalemSystem, eval_f_at
from salemperm.selfaffine import _decimal, deterministic_points, off_graph


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def first_field(out):
    return out.splitlines()[0].split("\t")[0]


@pytest.mark.parametrize("argv, value", [
    (["--p", "1/2,1/4,1/4", "--theta", "2", "02(1)"], "3/8"),
    (["--p", "1/3,1/3,1/3", "--theta", "1", "1(0)"], "1/3"),
    (["--p", "1/2,1/4,1/4", "--theta", "2", "0"], "0"),
    (["--p", "1/2,1/4,1/4", "11/24"], "3/8"),
    (["--perm", "0,2,1", "--p", "1/2,1/4,1/4", "1"], "3/4"),
])
def test_eval(capsys, argv, value):
    code, out, _ = run(capsys, "eval", *argv)
    assert code == 0
    assert first_field(out) == value


def test_eval_text_has_decimal(capsys):
    _, out, _ = run(capsys, "eval", "--p", "1/2,1/4,1/4", "02(1)")
    assert out == "3/8\t0.375\n"


def test_eval_truncated_prints_bound(capsys):
    code, out, _ = run(capsys, "eval", "--p", "2/5,2/5,1/5", "--digits", "30", "1/3")
    assert code == 0
    lines = out.splitlines()
    assert lines[1].startswith("error_bound ")
    bound = Fraction(lines[1].split()[1].split("\t")[0])
    sys_ = SalemSystem(PartitionParams.parse("2/5,2/5,1/5"))
    assert (Fraction(first_field(out)), bound) == eval_f_at(Fraction(1, 3), sys_, 30)


def test_eval_csv(capsys):
    _, out, _ = run(capsys, "eval", "--format", "csv", "--p", "1/2,1/4,1/4", "02(1)")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows == [["x", "f", "decimal", "error_bound"], ["02(1)", "3/8", "0.375", "0"]]


@pytest.mark.parametrize("argv, code, token", [
    (["eval", "013"], 2, "'3'"),
    (["eval", "--p", "1/2,x,1/4", "0"], 2, "x"),
    (["eval", "--p", "1/2,1/4,1/8", "0"], 3, ""),
    (["eval", "--perm", "0,0,1", "0"], 3, ""),
    (["eval", "5/4"], 3, ""),
    (["jump", "02(1)"], 3, ""),
    (["eval", "--p", "1/2,1/2", "--theta", "2", "0"], 3, ""),
])
def test_error_exit_codes(capsys, argv, code, token):
    rc, _, err = run(capsys, *argv)
    assert rc == code
    assert token in err


def test_argparse_usage_error_is_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["eval", "--theta", "two", "0"])
    assert info.value.code == 2


@pytest.mark.parametrize("p, value", [
    ("1/3,1/3,1/3", "1/2"), ("1/2,1/3,1/6", "13/23"), ("1/2,1/4,1/4", "1/2"),
])
def test_integral(capsys, p, value):
    code, out, _ = run(capsys, "integral", "--p", p, "--samples", "20000", "--rank", "6")
    assert code == 0
    assert first_field(out) == value


def test_integral_csv(capsys):
    _, out, _ = run(capsys, "integral", "--format", "csv", "--samples", "1000", "--rank", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["method"] for r in rows] == ["closed_form", "bracket", "monte_carlo"]
    lo, hi = Fraction(rows[1]["lower"]), Fraction(rows[1]["upper"])
    assert hi - lo == Fraction(1, 27)


def test_integral_inconsistency_exits_4(capsys, monkeypatch):
    from salemperm import analysis
    monkeypatch.setattr(analysis, "integral_closed_form", lambda sys: Fraction(2))
    code, _, err = run(capsys, "integral", "--samples", "1000", "--rank", "3")
    assert code == 4 and "self-check" in err


@pytest.mark.parametrize("argv, suite, cases", [
    (["--suite", "equations", "--p", "1/2,1/4,1/4"], "equations", 1000),
    (["--suite", "collisions"], "collisions", 1000),
    (["--suite", "affine", "--theta", "1"], "affine", None),
])
def test_verify_single_suites(capsys, argv, suite, cases):
    code, out, _ = run(capsys, "verify", *argv)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["suite"] for r in rows] == [suite]
    assert rows[0]["failures"] == "0"
    if cases:
        assert int(rows[0]["cases"]) == cases


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify", "--p", "1/2,1/3,1/6")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6 and all(r["failures"] == "0" for r in rows)


def test_verify_failure_exits_4(capsys, monkeypatch):
    from salemperm import verify
    real = verify.check_functional_equation
    monkeypatch.setattr(verify, "check_functional_equation", lambda e, s, n: real(e, s, n) + 1)
    code, out, err = run(capsys, "verify", "--suite", "equations")
    assert code == 4
    assert "first failure" in err
    assert "equations,1000,1000" in out


def test_graph_depth_10(capsys, tmp_path):
    out = tmp_path / "g.csv"
    code, _, _ = run(capsys, "graph", "--depth", "10", "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "y"] and len(rows) == 1 + 59049
    # decimals are renderings; spot-check the exact points behind them
    sys_ = SalemSystem(PartitionParams.uniform(3))
    exact = deterministic_points(sys_, 10).points
    for k in range(0, 59049, 4919):
        x, y = exact[k]
        assert rows[1 + k] == [_decimal(x, 17), _decimal(y, 17)]
        assert off_graph([(x, y)], sys_) == []


def test_graph_svg_and_chaos(capsys):
    code, out, _ = run(capsys, "graph", "--format", "svg", "--chaos", "50", "--radius", "1.5")
    assert code == 0
    assert out.count("<circle") == 50 and 'r="1.5"' in out


def test_graph_export_error(capsys, tmp_path):
    code, _, err = run(capsys, "graph", "--out", str(tmp_path / "no" / "g.csv"))
    assert code == 1 and "no" in err


def test_outdir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SALEMPERM_OUTDIR", str(tmp_path))
    code, _, _ = run(capsys, "graph", "--depth", "1", "--out", "g.csv")
    assert code == 0
    assert (tmp_path / "g.csv").read_text().count("\n") == 4


def test_jump(capsys):
    code, out, _ = run(capsys, "jump", "--p", "1/2,1/4,1/4", "--theta", "2", "1(0)")
    assert code == 0
    assert out == "point 1/2\nleft 1/3\nright 3/4\njump 5/12\n"
    _, out, _ = run(capsys, "jump", "--format", "csv", "--p", "1/2,1/4,1/4", "1(0)")
    assert out.splitlines() == ["point,left,right,jump", "1/2,1/3,3/4,5/12"]


def test_cylinder(capsys):
    code, out, _ = run(capsys, "cylinder", "--p", "1/2,1/4,1/4", "--base", "02")
    assert code == 0
    fields = dict(line.split() for line in out.splitlines())
    assert (fields["length"], fields["increment"], fields["ratio"]) == ("1/8", "1/12", "2/3")
    assert run(capsys, "cylinder", "--base", "05")[0] == 2


def test_freq(capsys):
    code, out, _ = run(capsys, "freq", "--format", "csv", "-k", "300", "(012)")
    assert code == 0
    assert out.splitlines() == ["s,count,frequency", "0,100,1/3", "1,100,1/3", "2,100,1/3"]
    _, a, _ = run(capsys, "freq", "--p", "1/2,1/3,1/6", "--seed", "3")
    _, b, _ = run(capsys, "freq", "--p", "1/2,1/3,1/6", "--seed", "3")
    assert a == b and "log_ratio" in a


def test_quotient(capsys):
    code, out, _ = run(capsys, "quotient", "--n0-max", "3", "(0)")
    assert code == 0
    assert out.splitlines()[0] == "n0,quotient_num,quotient_den,log_abs"
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert [r[:3] for r in rows] == [["1", "2", "1"], ["2", "2", "1"], ["3", "2", "1"]]


def test_invert(capsys):
    code, out, _ = run(capsys, "invert", "--p", "1/2,1/4,1/4", "11/24")
    assert code == 0 and out == "02(1)\n"
    _, out, _ = run(capsys, "invert", "--p", "2/5,2/5,1/5", "--digits", "5", "1/3")
    assert out.endswith("...\n")


@pytest.mark.parametrize("argv", [
    ["eval", "--p", "1/2,1/3,1/6", "0(12)"],
    ["integral", "--samples", "5000", "--rank", "4", "--seed", "9"],
    ["graph", "--chaos", "200", "--seed", "4"],
    ["freq", "-k", "500", "--seed", "1"],
])
def test_byte_identical_reruns(capsys, argv):
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "salemperm", "eval", "--p", "1/2,1/4,1/4", "02(1)"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("3/8")
