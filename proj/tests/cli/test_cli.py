import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("LEVYOU_CLI", "levyou")
DATA = Path(__file__).resolve().parent.parent / "data"


def run(*args, out):
    return subprocess.run([CLI, *args, "--out", str(out)], capture_output=True, text=True)


def rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_analyze_modified_kolmogorov(tmp_path):
    r = run("analyze", "--config", str(DATA / "kolmogorov_modified.json"), out=tmp_path)
    assert r.returncode == 0, r.stderr
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["schema_version"] == 1
    h2 = [e for e in report["entries"] if e["id"] == "H2"][0]
    assert h2["verdict"] == "holds"
    assert report["conclusions"]["density_exists"]["value"] == "yes"
    assert "density_exists: yes" in r.stdout


def test_analyze_linear_weight_factorial_smooth(tmp_path):
    r = run("analyze", "--config", str(DATA / "factorial_linear.json"), out=tmp_path)
    assert r.returncode == 0, r.stderr
    assert json.loads((tmp_path / "report.json").read_text())["conclusions"]["density_smooth"]["value"] == "yes"


def test_malformed_config_names_field(tmp_path):
    r = run("analyze", "--config", str(DATA / "malformed.json"), out=tmp_path)
    assert r.returncode == 2
    assert "model.A" in r.stderr


def test_missing_config_file(tmp_path):
    r = run("analyze", "--config", str(tmp_path / "nope.json"), out=tmp_path)
    assert r.returncode == 2


def test_charfn_gaussian_spot_values(tmp_path):
    r = run("charfn", "--config", str(DATA / "gaussian.json"), "--z-max", "2", "--points", "3", out=tmp_path)
    assert r.returncode == 0, r.stderr
    table = rows(tmp_path / "charfn.csv")
    assert float(table[0]["z"]) == 0.0 and float(table[0]["re_phi"]) == 1.0
    assert float(table[1]["re_phi"]) == pytest.approx(0.20245, abs=5e-6)


def test_charfn_bound_columns_dominate(tmp_path):
    r = run("charfn", "--config", str(DATA / "factorial_linear.json"), "--log", "--z-min", "10", "--z-max", "1e6",
            "--points", "11", "--bounds", out=tmp_path)
    assert r.returncode == 0, r.stderr
    for row in rows(tmp_path / "charfn.csv"):
        assert float(row["abs_phi"]) <= float(row["scalar_bound"])
        assert float(row["abs_phi"]) <= float(row["estimate_bound"])


def test_density_gaussian_and_sidecar(tmp_path):
    r = run("density", "--config", str(DATA / "gaussian.json"), out=tmp_path)
    assert r.returncode == 0, r.stderr
    table = rows(tmp_path / "density.csv")
    at0 = [row for row in table if float(row["x"]) == 0.0]
    assert float(at0[0]["p"]) == pytest.approx(0.22320, abs=1e-5)
    meta = json.loads((tmp_path / "density.json").read_text())
    assert abs(meta["normalization"] - 1.0) <= 1e-3


def test_density_refused_without_force(tmp_path):
    r = run("density", "--config", str(DATA / "factorial_unit.json"), out=tmp_path)
    assert r.returncode == 3
    assert not (tmp_path / "density.csv").exists()


def test_simulate_deterministic_rows_equal(tmp_path):
    r = run("simulate", "--config", str(DATA / "deterministic.json"), out=tmp_path)
    assert r.returncode == 0, r.stderr
    lines = (tmp_path / "samples.csv").read_text().splitlines()
    assert lines[0] == "x0,x1"
    assert len(lines) == 6 and len(set(lines[1:])) == 1


def test_simulate_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("simulate", "--config", str(DATA / "gaussian.json"), "--seed", "5", out=a).returncode == 0
    assert run("simulate", "--config", str(DATA / "gaussian.json"), "--seed", "5", "--threads", "3",
               out=b).returncode == 0
    assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()
    c = tmp_path / "c"
    assert run("simulate", "--config", str(DATA / "gaussian.json"), "--seed", "6", out=c).returncode == 0
    assert (a / "samples.csv").read_bytes() != (c / "samples.csv").read_bytes()


def test_manifest(tmp_path):
    run("simulate", "--config", str(DATA / "gaussian.json"), "--seed", "9", out=tmp_path)
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["subcommand"] == "simulate" and m["seed"] == 9
    assert m["outputs"] == [str(tmp_path / "samples.csv")]
    assert {"config", "parameters", "wall_clock_seconds", "version"} <= set(m)
    assert not list(tmp_path.glob("*.tmp"))


def test_probe(tmp_path):
    r = run("probe", "--config", str(DATA / "factorial_unit.json"), out=tmp_path)
    assert r.returncode == 0, r.stderr
    ratios = [float(row["bound_ratio"]) for row in rows(tmp_path / "probe.csv")]
    assert ratios == sorted(ratios) and len(set(ratios)) == 3


@pytest.mark.parametrize("example", ["example2", "example3", "example4-first", "example4-modified",
                                     "curve-measure"])
def test_reproduce(tmp_path, example):
    r = run("reproduce", example, out=tmp_path)
    assert r.returncode == 0, r.stdout + r.stderr
    assert "FAIL" not in r.stdout


def test_reproduce_unknown(tmp_path):
    assert run("reproduce", "example9", out=tmp_path).returncode == 2
