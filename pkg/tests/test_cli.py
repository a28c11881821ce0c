import csv
import io
import json
import subprocess
import sys

import pytest

from masscap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_report_schwarzschild_json(capsys):
    code, out, _ = run(capsys, "report", "--family", "schwarzschild", "--mass", "1", "--slice", "3", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["mass"] == pytest.approx(1.0, rel=1e-12)
    assert doc["hypotheses"]["nonneg_scalar_curvature"]
    by_name = {(r["slice"], r["name"]): r for r in doc["reports"]}
    for x in (3.0, 4.0):
        for name in ("mass_capacity", "energy_willmore", "mass_energy", "capacity_radius"):
            assert by_name[(x, name)]["equality"]
            assert by_name[(x, name)]["rigidity"]
    assert doc["slices"][0]["capacity"] == pytest.approx(2.3660254037844384, rel=1e-12)


def test_report_from_file_and_csv(capsys, tmp_path):
    path = tmp_path / "prof.json"
    path.write_text(json.dumps({"family": "schwarzschild", "params": {"mass": 2}}))
    code, out, _ = run(capsys, "report", "--file", str(path), "--slice", "8", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["name"] for r in rows} >= {"mass_capacity", "capacity_radius"}


def test_report_flat(capsys):
    code, out, _ = run(capsys, "report", "--family", "flat", "--slice", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["mass"] == pytest.approx(0.0, abs=1e-12)


def test_report_negative_mass_includes_willmore_bound(capsys):
    code, out, _ = run(capsys, "report", "--family", "neg-schwarzschild", "--slice", "0.01")
    assert code == 0
    names = [r["name"] for r in json.loads(out)["reports"]]
    assert "neg_mass_willmore" in names


def test_report_two_ended_includes_mass_lower_bound(capsys):
    code, out, _ = run(capsys, "report", "--family", "isotropic-schwarzschild", "--slice", "1")
    assert code == 0
    rep = [r for r in json.loads(out)["reports"] if r["name"] == "mass_lower_bound"][0]
    assert rep["equality"]


def test_bad_inputs_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "report", "--file", str(bad))[0] == 1
    assert run(capsys, "report", "--file", str(tmp_path / "missing.json"))[0] == 1
    assert run(capsys, "report")[0] == 1
    assert run(capsys, "report", "--family", "flat", "--slice", "-1")[0] == 1
    assert run(capsys, "report", "--family", "flat", "--tol", "0")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["report", "--bogus"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1


def test_require_nonneg_curvature_exit_3(capsys):
    code, _, _ = run(capsys, "report", "--family", "gaussian", "--eps", "0.1", "--slice", "1", "--require-nonneg-R")
    assert code == 3
    code, _, _ = run(capsys, "report", "--family", "tanh", "--slice", "3", "--require-nonneg-R")
    assert code == 0


@pytest.mark.parametrize("suite", ["equality", "horn"])
def test_verify_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", "--suite", suite)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)
    code, out, _ = run(capsys, "verify", "--suite", suite, "--format", "json")
    assert json.loads(out)["passed"]


def test_sweep_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "sweep", "--count", "10", "--seed", "7", "--out", str(a))[0] == 0
    assert run(capsys, "sweep", "--count", "10", "--seed", "7", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(io.StringIO(a.read_text())))
    assert len({r["profile_id"] for r in rows}) == 10
    assert all(float(r["normalized_margin"]) >= -1e-9 for r in rows if r["hypothesis_ok"] == "true")
    assert (tmp_path / "a_margin_curves.csv").exists()
    b_curves = (tmp_path / "a_B_curves.csv").read_text().splitlines()
    assert b_curves[0] == "profile_id,t,B"
    assert len(b_curves) == 1 + 10 * 49


def test_sweep_empty(capsys):
    code, out, _ = run(capsys, "sweep", "--count", "0")
    assert code == 0
    assert out.strip() == "profile_id,slice,inequality,lhs,rhs,margin,normalized_margin,hypothesis_ok"


def test_sweep_unwritable_output(capsys, tmp_path):
    assert run(capsys, "sweep", "--count", "1", "--out", str(tmp_path / "no" / "dir.csv"))[0] == 1


def test_horn_command(capsys):
    code, out, _ = run(capsys, "horn", "--exponent", "0.8")
    assert code == 0
    assert json.loads(out)["verdict"] == "mass-nonneg-certified"
    code, out, _ = run(capsys, "horn", "--exponent", "0.5")
    assert json.loads(out)["limit"] == "divergent"
    code, out, _ = run(capsys, "horn", "--family", "horn", "--exponent", "0.8")
    assert json.loads(out)["verdict"] == "mass-nonneg-certified"


def test_horn_from_file(capsys, tmp_path):
    path = tmp_path / "horn.json"
    path.write_text(json.dumps({"b": 0.9, "grad_h_bound": {"type": "power", "coeff": 1.0, "exp": -1.0}}))
    code, out, _ = run(capsys, "horn", "--file", str(path))
    assert code == 0
    assert json.loads(out)["gradient_scaling_ok"]
    path.write_text(json.dumps({"delta": 1}))
    assert run(capsys, "horn", "--file", str(path))[0] == 1


def test_smallsphere_command(capsys):
    code, out, _ = run(capsys, "smallsphere", "--family", "plummer", "--eps", "0.1")
    assert code == 0
    doc = json.loads(out)
    assert doc["hypothesis_ok"] and doc["inequality_ok"]
    assert doc["scalar_curvature_p"] == pytest.approx(2.4 / 1.1**5, rel=1e-12)
    assert run(capsys, "smallsphere", "--family", "schwarzschild")[0] == 1
    assert run(capsys, "smallsphere", "--family", "plummer", "--rmin", "0.2", "--rmax", "0.1")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "masscap", "report", "--family", "flat", "--slice", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["profile"]["family"] == "flat"
