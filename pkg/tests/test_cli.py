"""End-to-end tests of the command-line interface.

Exit-code contract: 0 on success, 1 on validation/usage errors and failed
verification, 2 on numeric faults (with the violated invariant named in
the JSON summary).  Outputs must be byte-identical across repeated runs
with the same resolved configuration.
"""

import json
import os
import subprocess
import sys

import pytest

PKG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "src")


def run_cli(args, cwd, env_extra=None):
    env = dict(os.environ)
    env["PYTHONPATH"] = os.path.abspath(PKG_DIR)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "solitonlab.cli"] + args,
        cwd=cwd, env=env, capture_output=True, text=True, timeout=600)


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def test_profile_writes_csv_and_summary(tmp_path):
    out = tmp_path / "run"
    res = run_cli(["profile", "--n", "2", "--t-min", "-10", "--t-max", "10",
                   "--samples", "2001", "--out-dir", str(out)], tmp_path)
    assert res.returncode == 0, res.stderr
    lines = (out / "profile.csv").read_text().splitlines()
    assert len(lines) == 2002
    header = lines[0].split(",")
    names = [h.split(" ")[0] for h in header]
    assert names == ["t", "phi", "phi1", "phi2", "f", "identity_residual"]
    # units are stated in the header
    assert all("(" in h and h.endswith(")") for h in header)
    summary = read_json(out / "profile_summary.json")
    assert summary["passed"] is True
    assert summary["max_identity_residual"] < 1e-8
    # the summary embeds the fully resolved configuration
    assert summary["config"]["n"] == 2
    assert summary["config"]["samples"] == 2001
    assert summary["config"]["t_min"] == -10.0


def test_profile_rejects_bad_dimension(tmp_path):
    res = run_cli(["profile", "--n", "0", "--out-dir", str(tmp_path / "x")],
                  tmp_path)
    assert res.returncode == 1


def test_unknown_flag_prints_usage_and_exits_1(tmp_path):
    res = run_cli(["profile", "--frobnicate", "7"], tmp_path)
    assert res.returncode == 1
    assert "usage" in res.stderr.lower()


def test_unknown_subcommand_exits_1(tmp_path):
    res = run_cli(["transmogrify"], tmp_path)
    assert res.returncode == 1


def test_orbits_reports_expected_period(tmp_path):
    out = tmp_path / "orbits"
    res = run_cli(["orbits", "--n", "1", "--levels", "0.2,0.5,0.69",
                   "--step", "1e-3", "--out-dir", str(out)], tmp_path)
    assert res.returncode == 0, res.stderr
    lines = (out / "orbits.csv").read_text().splitlines()
    assert len(lines) == 4
    for line in lines[1:]:
        period = float(line.split(",")[2])
        assert abs(period - 6.28319) < 1e-4
    summary = read_json(out / "orbits_summary.json")
    assert summary["passed"] is True
    assert summary["failures"] == []


def test_geometry_summary_passes(tmp_path):
    out = tmp_path / "geom"
    res = run_cli(["geometry", "--n", "2", "--t-min", "-6", "--t-max", "6",
                   "--samples", "61", "--out-dir", str(out)], tmp_path)
    assert res.returncode == 0, res.stderr
    summary = read_json(out / "geometry_summary.json")
    assert summary["all_passed"] is True
    assert set(summary["residuals"]) == {
        "energy_identity", "energy_identity_assembled",
        "curvature_transport", "gradient_coefficient"}


def test_flow_soliton_runs_and_snapshots(tmp_path):
    out = tmp_path / "flow"
    res = run_cli(["flow", "--n", "2", "--t-min", "-10", "--t-max", "10",
                   "--samples", "201", "--d-tau", "0.01", "--tau-end", "0.1",
                   "--dump-every", "5", "--out-dir", str(out)], tmp_path)
    assert res.returncode == 0, res.stderr
    snaps = sorted(p.name for p in out.glob("flow_snapshot_*.csv"))
    assert len(snaps) >= 2
    first = (out / snaps[0]).read_text().splitlines()
    names = [h.split(" ")[0] for h in first[0].split(",")]
    assert names == ["t", "phi", "phi1", "R"]
    assert len(first) == 202


def test_flow_numeric_fault_exits_2_and_names_invariant(tmp_path):
    out = tmp_path / "fault"
    res = run_cli(["flow", "--n", "1", "--initial", "flat",
                   "--left-speed", "-50", "--t-min", "-12", "--t-max", "12",
                   "--samples", "481", "--d-tau", "0.05", "--tau-end", "2.0",
                   "--out-dir", str(out)], tmp_path)
    assert res.returncode == 2
    assert "numeric fault" in res.stderr
    fault = read_json(out / "flow_fault.json")
    assert "monotonicity" in fault["invariant"]
    assert fault["config"]["left_speed"] == -50.0


def test_embed_summary(tmp_path):
    out = tmp_path / "embed"
    res = run_cli(["embed", "--n", "1", "--level", "0.6931471805599453",
                   "--samples", "64", "--out-dir", str(out)], tmp_path)
    assert res.returncode == 0, res.stderr
    summary = read_json(out / "embed_summary.json")
    assert summary["passed"] is True
    assert summary["capacity"]["lower"] < summary["capacity"]["upper"]


def test_outputs_are_bit_identical_across_runs(tmp_path):
    out = tmp_path / "det"
    args = ["profile", "--n", "3", "--t-min", "-5", "--t-max", "5",
            "--samples", "101", "--out-dir", str(out)]
    assert run_cli(args, tmp_path).returncode == 0
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    assert run_cli(args, tmp_path).returncode == 0
    second = {p.name: p.read_bytes() for p in out.iterdir()}
    assert first == second
    assert set(first) == {"profile.csv", "profile_summary.json"}


def test_config_file_supplies_defaults_and_flags_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 3\nsamples = 11\n")
    out1 = tmp_path / "fromfile"
    res = run_cli(["profile", "--config", str(cfg), "--out-dir", str(out1)],
                  tmp_path)
    assert res.returncode == 0, res.stderr
    assert read_json(out1 / "profile_summary.json")["config"]["n"] == 3
    out2 = tmp_path / "override"
    res = run_cli(["profile", "--config", str(cfg), "--n", "2",
                   "--out-dir", str(out2)], tmp_path)
    assert res.returncode == 0, res.stderr
    summary = read_json(out2 / "profile_summary.json")
    assert summary["config"]["n"] == 2
    assert summary["config"]["samples"] == 11


def test_config_file_missing_exits_1(tmp_path):
    res = run_cli(["profile", "--config", str(tmp_path / "absent.cfg")],
                  tmp_path)
    assert res.returncode == 1


def test_output_dir_env_var(tmp_path):
    env_out = tmp_path / "envdir"
    res = run_cli(["profile", "--n", "1", "--samples", "11"], tmp_path,
                  env_extra={"SOLITONLAB_OUT": str(env_out)})
    assert res.returncode == 0, res.stderr
    assert (env_out / "profile_summary.json").exists()


def test_verify_only_c3_passes_and_tightened_tolerance_fails(tmp_path):
    out = tmp_path / "verify"
    res = run_cli(["verify-all", "--only", "C3", "--out-dir", str(out)],
                  tmp_path)
    assert res.returncode == 0, res.stderr
    assert "PASS C3" in res.stdout
    report = read_json(out / "verify_all.json")
    assert report["criteria"]["C3"]["passed"] is True
    assert report["all_passed"] is True

    res = run_cli(["verify-all", "--only", "C3", "--tol", "C3=1e-14",
                   "--out-dir", str(out)], tmp_path)
    assert res.returncode == 1
    assert "FAIL C3" in res.stdout


def test_verify_rejects_unknown_criterion(tmp_path):
    res = run_cli(["verify-all", "--only", "C99"], tmp_path)
    assert res.returncode == 1


def test_svg_output_is_written(tmp_path):
    out = tmp_path / "svg"
    res = run_cli(["profile", "--n", "1", "--samples", "51", "--svg",
                   "--out-dir", str(out)], tmp_path)
    assert res.returncode == 0, res.stderr
    svg = (out / "profile.svg").read_text()
    assert svg.startswith("<?xml")
    assert "<svg" in svg
    assert "phi" in svg
