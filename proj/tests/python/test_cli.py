import json
import os
import subprocess

import pytest

CLI = os.environ.get("MSEARCH_CLI", "msearch")


def run(*args, env=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=env)


def test_enumerate():
    r = run("enumerate", "--m", "2", "--n", "4")
    assert r.returncode == 0
    assert json.loads(r.stdout)["counts"] == ["1", "1", "2", "5", "14"]
    csv = run("enumerate", "--m", "3", "--n", "3", "--format", "csv").stdout
    assert csv.splitlines()[0] == "n,tau"


def test_constants_leaves():
    r = run("constants", "--m", "2", "--toll", "leaves")
    assert r.returncode == 0
    assert json.loads(r.stdout)["d1"] == "0.25"


def test_exit_codes():
    assert run("enumerate", "--m", "2", "--n", "4", "--bogus").returncode == 2
    assert run("frobnicate").returncode == 2
    r = run("moments", "--m", "2", "--n", "4", "--toll", "power:x")
    assert r.returncode == 1
    assert "power:x" in r.stderr
    assert run("--help").returncode == 0


def test_moments_csv(tmp_path):
    out = tmp_path / "m.csv"
    r = run("moments", "--m", "2", "--toll", "leaves", "--n", "3", "--smax", "2", "--out", str(out))
    assert r.returncode == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "n,s,mu_exact,mean,var,skew,kurt"
    assert rows[-2].startswith("3,1,6/5,1.2,0.16")


def test_limits():
    r = run("limits", "--law", "space", "--m", "3", "--smax", "4", "--format", "json")
    assert r.returncode == 0
    assert json.loads(r.stdout)["kind"] == "space"


def test_simulate_byte_identical(tmp_path):
    args = ["simulate", "--m", "2", "--n", "80", "--toll", "shape", "--reps", "300", "--seed", "5"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(*args, "--out", str(a)).returncode == 0
    assert run(*args, "--threads", "3", "--out", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()
    assert "elapsed_seconds" not in a.read_text()
    tree = tmp_path / "t.json"
    assert run(*args, "--out", str(a), "--tree", str(tree), "--histogram", str(tmp_path / "h.csv")).returncode == 0
    assert json.loads(tree.read_text())["size"] == 80


def test_cache_warm_rerun(tmp_path):
    env = dict(os.environ, MSEARCH_CACHE=str(tmp_path / "cache"))
    first = run("enumerate", "--m", "3", "--n", "30", env=env)
    assert (tmp_path / "cache" / "tau-m3-n30.json").exists()
    second = run("enumerate", "--m", "3", "--n", "30", env=env)
    assert first.stdout == second.stdout
    lim1 = run("limits", "--law", "yhalf", "--smax", "4", env=env)
    lim2 = run("limits", "--law", "yhalf", "--smax", "4", env=env)
    assert lim1.returncode == 0
    assert lim1.stdout == lim2.stdout


def test_verify(tmp_path):
    report = tmp_path / "r.json"
    r = run("verify", "--only", "constants-m2", "--only", "degeneracy-dichotomy", "--report", str(report))
    assert r.returncode == 0
    data = json.loads(report.read_text())
    assert [c["check_id"] for c in data["checks"]] == ["constants-m2", "degeneracy-dichotomy"]
    assert run("verify", "--only", "enum-oracle", "--budget", "1e-9").returncode == 1
