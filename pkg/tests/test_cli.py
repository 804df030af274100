import csv
import io

import pytest

from surfthresh.cli import parse_and_run


def run(argv, capsys):
    code = parse_and_run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


SIM = "simulate --code toric --distance 3,5 --p 0.14,0.155,0.17 --trials 1000 --seed 42 --extraction ideal".split()


def test_simulate_has_six_rows(capsys):
    code, out, _ = run(SIM, capsys)
    assert code == 0
    r = rows(out)
    assert len(r) == 6
    assert list(r[0]) == ["code", "d", "p0", "trials", "mean_ttf", "stderr", "censored"]
    assert all(float(x["mean_ttf"]) >= 1 for x in r)
    assert "# --seed=42" in out and "# --trials=1000" in out


def test_repeat_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert parse_and_run(SIM + ["--output", str(a)]) == 0
    assert parse_and_run(SIM + ["--output", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert not [p for p in tmp_path.iterdir() if p.suffix == ".tmp"]


def test_count_r1_is_zero(capsys, monkeypatch):
    monkeypatch.delenv("SURFTHRESH_REQUIRE_SEED", raising=False)
    code, out, err = run("count --code toric --distance 3 --k 1 --samples 100 --extraction ideal".split(), capsys)
    assert code == 0
    (r,) = rows(out)
    assert float(r["r_k"]) == 0.0 and r["k"] == "1"
    assert "no --seed" in err


def test_missing_seed_in_strict_mode(capsys, monkeypatch):
    monkeypatch.setenv("SURFTHRESH_REQUIRE_SEED", "1")
    code, _, err = run("count --distance 3 --k 1 --samples 100".split(), capsys)
    assert code == 1 and "--seed" in err


@pytest.mark.parametrize(
    "argv,flag",
    [
        ("simulate --distance 4 --p 0.1 --trials 5 --seed 1", "--distance"),
        ("simulate --distance 3 --p 1.5 --trials 5 --seed 1", "--p"),
        ("simulate --distance 3 --p 0.1 --trials 0 --seed 1", "--trials"),
        ("simulate --distance 3 --p x --trials 5 --seed 1", "--p"),
        ("simulate --distance 3 --p 0.1 --trials 5 --seed 1 --bogus", "--bogus"),
        ("count --distance 3 --k 40 --samples 5 --seed 1", "--k"),
        ("crossing --distance 3 --p 0.1,0.2 --trials 5 --seed 1", "--distance"),
    ],
)
def test_usage_errors(argv, flag, capsys):
    code, out, err = run(argv.split(), capsys)
    assert code == 1
    assert flag in err
    assert out == ""


def test_unwritable_output(capsys):
    code, _, err = run(SIM[:-2] + ["--trials", "3", "--output", "/nonexistent/dir/x.csv"], capsys)
    assert code == 1 and "--output" in err


def test_crossing_command(capsys):
    code, out, _ = run("crossing --distance 3,5 --p 0.05,0.25 --trials 300 --seed 4".split(), capsys)
    assert code == 0
    (r,) = rows(out)
    assert r["found"] == "1" and 0.05 < float(r["p0_cross"]) < 0.25


def test_dumps(capsys):
    code, out, _ = run("--dump-lattice --code surface --distance 3".split(), capsys)
    assert code == 0 and out.startswith("# code=surface d=3")
    code, out, _ = run("dump-syndrome --distance 3 --p 0.05 --rounds 2 --seed 2".split(), capsys)
    assert code == 0 and out.splitlines()[1].startswith("1 Z ")
    code, out, _ = run(
        "dump-graph --code surface --distance 5 --p 0.01 --extraction circuit --rounds 3 --seed 3 --prune".split(), capsys
    )
    assert code == 0 and "# nodes=" in out
