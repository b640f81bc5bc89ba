import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from holderbound.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--json")
    return code, json.loads(text)


def schema(obj):
    if isinstance(obj, dict):
        return {k: schema(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [schema(v) for v in obj]
    return type(obj).__name__


def approx_tree(a, b):
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(approx_tree(a[k], b[k]) for k in a)
    if isinstance(a, list):
        return len(a) == len(b) and all(approx_tree(x, y) for x, y in zip(a, b))
    if isinstance(a, float) and not isinstance(b, bool):
        return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)
    return a == b


class TestIntegral:
    def test_linear_example(self):
        code, rec = run_json("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2", "--linear")
        assert code == 0
        r = rec["results"]
        assert r["lhs"] == pytest.approx(0.5, abs=1e-9)
        assert r["refined_total"] == pytest.approx(math.sqrt(1 / 24) + math.sqrt(1 / 8), abs=1e-9)
        assert r["classical"] == pytest.approx(3 ** -0.5, abs=1e-9)

    def test_matches_golden(self):
        _, rec = run_json("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2", "--linear")
        golden = json.loads((GOLDEN / "integral_x_1_linear.json").read_text())
        assert schema(rec) == schema(golden)
        assert approx_tree(rec, golden)

    def test_trig(self):
        code, rec = run_json("integral", "--f", "1", "--g", "1", "--a", "0", "--b", "1", "--p", "2", "--trig")
        assert code == 0
        r = rec["results"]
        for key in ("lhs", "refined_total", "classical"):
            assert r[key] == pytest.approx(1.0, abs=1e-9)
        assert rec["inputs"]["weights"] == ["sin(x)^2", "cos(x)^2"]

    def test_p_one(self, capsys):
        code, _ = run("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "1")
        assert code == 1
        assert "p must exceed 1" in capsys.readouterr().err

    def test_weights_and_lambda(self):
        code, rec = run_json("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2",
                             "--weights", "x^2,1 - x^2", "--lambda", "0.5")
        assert code == 0
        assert rec["results"]["split_point"] == pytest.approx(math.sqrt(1 / 48) + math.sqrt(7 / 48), abs=1e-9)
        assert rec["inputs"]["lambda"] == 0.5

    def test_bad_partition(self, capsys):
        code, _ = run("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2", "--weights", "x,x")
        assert code == 1

    def test_syntax_error(self, capsys):
        code, _ = run("integral", "--f", "ln(x", "--g", "1", "--a", "1", "--b", "2", "--p", "2")
        assert code == 1
        assert "offset 4" in capsys.readouterr().err

    def test_domain_error(self, capsys):
        code, _ = run("integral", "--f", "ln(x)", "--g", "1", "--a", "-1", "--b", "1", "--p", "2")
        assert code == 1

    def test_violation_exit_code(self):
        # a negative tolerance makes even an exact equality count as a violation
        code, _ = run("integral", "--f", "1", "--g", "1", "--a", "0", "--b", "1", "--p", "2", "--tol", "-1")
        assert code == 2

    def test_text_output(self):
        code, text = run("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2")
        assert code == 0
        assert "refined_total" in text and "chain_ok" in text and "true" in text

    def test_csv(self):
        code, text = run("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2", "--csv")
        rows = list(csv.reader(io.StringIO(text)))
        assert code == 0 and len(rows) == 2
        row = dict(zip(rows[0], rows[1]))
        assert row["mode"] == "integral" and row["chain_ok"] == "true"
        assert float(row["refined_terms_1"]) + float(row["refined_terms_2"]) == pytest.approx(float(row["refined_total"]))

    def test_env_tolerance(self, monkeypatch):
        monkeypatch.setenv("HOLDER_TOL", "0.001")
        _, rec = run_json("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2")
        assert rec["results"]["tolerance"] == 0.001
        _, rec = run_json("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2", "--tol", "0.5")
        assert rec["results"]["tolerance"] == 0.5

    def test_bad_env_tolerance(self, monkeypatch):
        monkeypatch.setenv("HOLDER_TOL", "lots")
        code, _ = run("integral", "--f", "x", "--g", "1", "--a", "0", "--b", "1", "--p", "2")
        assert code == 1


class TestSum:
    def test_linear_example(self):
        code, rec = run_json("sum", "--a", "1,2", "--b", "2,1", "--p", "2", "--linear")
        assert code == 0
        r = rec["results"]
        assert r["lhs"] == 4.0
        assert r["refined_total"] == pytest.approx((math.sqrt(54) + 2) / 2, abs=1e-12)
        assert r["classical"] == pytest.approx(5.0, abs=1e-12)

    def test_singleton(self):
        code, rec = run_json("sum", "--a", "1", "--b", "5", "--p", "2")
        assert code == 0
        r = rec["results"]
        assert r["lhs"] == r["refined_total"] == r["classical"] == 5.0

    def test_zero_entry(self):
        assert run("sum", "--a", "1,0", "--b", "1,1", "--p", "2")[0] == 1

    def test_length_mismatch(self):
        assert run("sum", "--a", "1,2", "--b", "1", "--p", "2")[0] == 1

    def test_files(self, tmp_path):
        (tmp_path / "a.txt").write_text("1\n2\n3\n")
        (tmp_path / "b.txt").write_text("3, 2, 1\n")
        (tmp_path / "w.csv").write_text("1,0,0.5\n0,1,0.5\n")
        code, rec = run_json("sum", "--a", str(tmp_path / "a.txt"), "--b", str(tmp_path / "b.txt"),
                             "--p", "3", "--weights", str(tmp_path / "w.csv"))
        assert code == 0
        assert rec["inputs"]["partition"] == "weights"
        assert rec["results"]["lhs"] == 10.0

    def test_trig(self):
        code, rec = run_json("sum", "--a", "1,2,3", "--b", "3,2,1", "--p", "2", "--trig")
        assert code == 0 and rec["results"]["chain_ok"]


class TestHH:
    def test_square(self):
        code, rec = run_json("hh", "--f", "x^2", "--fprime", "2*x", "--a", "0", "--b", "1", "--p", "2")
        assert code == 0
        r = rec["results"]
        assert r["defect"] == pytest.approx(1 / 6, abs=1e-9)
        assert r["dragomir"] == pytest.approx(1 / math.sqrt(6), abs=1e-9)
        assert r["convexity_ok"] and r["ordering_ok"]

    def test_affine(self):
        code, rec = run_json("hh", "--f", "x", "--fprime", "1", "--a", "0", "--b", "1", "--p", "2")
        assert code == 0
        r = rec["results"]
        assert r["defect"] == pytest.approx(0.0, abs=1e-12)
        assert r["dragomir"] == r["refined"]

    def test_mismatch(self, capsys):
        code, _ = run("hh", "--f", "x^2", "--fprime", "3*x", "--a", "0", "--b", "1", "--p", "2")
        assert code == 1

    def test_csv(self):
        code, text = run("hh", "--f", "x^2", "--fprime", "2*x", "--a", "0", "--b", "1", "--p", "2", "--csv")
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0][:4] == ["mode", "defect", "dragomir", "refined"]


class TestSweep:
    def test_zero_trials(self):
        assert run("sweep", "--trials", "0")[0] == 1

    def test_bad_family(self):
        assert run("sweep", "--trials", "1", "--family", "cubic")[0] == 1

    def test_json_to_stdout(self):
        code, text = run("sweep", "--trials", "5", "--family", "tuples", "--n-max", "50")
        assert code == 0
        d = json.loads(text)
        assert d["trials_run"] == 5 and d["violations"] == []

    def test_files_byte_identical(self, tmp_path):
        args = ["sweep", "--trials", "8", "--seed", "5", "--family", "mixed"]
        for name in ("one", "two"):
            code, _ = run(*args, "--out", str(tmp_path / f"{name}.json"), "--csv", str(tmp_path / f"{name}.csv"))
            assert code == 0
        assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()
        assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()
        rows = list(csv.reader(io.StringIO((tmp_path / "one.csv").read_text())))
        assert rows[0] == ["trial", "lower", "refined", "upper", "gap_refined", "gap_lhs", "ok"]
        assert len(rows) == 9

    def test_keep_reports(self):
        _, text = run("sweep", "--trials", "2", "--family", "hh", "--keep-reports")
        assert len(json.loads(text)["reports"]) == 2


def test_usage_error_exits_one(capsys):
    assert run("integral", "--f", "x")[0] == 1
    assert run()[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "holderbound", "sum", "--a", "1,2", "--b", "2,1", "--p", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "refined_total" in proc.stdout
