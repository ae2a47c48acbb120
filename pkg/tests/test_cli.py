import json
import math
import subprocess
import sys

import pytest

from iteig.cli import main


CONST4 = '{"kind":"constant","value":4.0}'


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_good_profile(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code, _, _ = run_cli(["validate", "--profile", CONST4, "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["valid"] and rep["smoothness_warning"]
    assert rep["B"] == pytest.approx(2.0, abs=1e-10)
    assert set(rep["potential_norms"]) == {"sup_q", "l1_q"}
    assert rep["provenance"]["profile_hash"]


def test_validate_bad_profile_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind":"poly","coeffs":[1.0,0.0,-2.2]}')
    code, _, err = run_cli(["validate", "--profile", str(bad)], capsys)
    assert code == 2
    assert "positive" in err


def test_malformed_json_exit_2(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text('{"kind": "constant", ')
    code, _, err = run_cli(["validate", "--profile", str(bad)], capsys)
    assert code == 2
    assert "broken.json" in err


def test_usage_error_exit_2(capsys):
    assert main(["eigs", "--box", "0,1,0,1"]) == 2  # missing --profile


def test_eigs_artifact_and_conservation(tmp_path, capsys):
    out = tmp_path / "zeros.json"
    spec_out = tmp_path / "spec.json"
    code, _, _ = run_cli(["eigs", "--profile", CONST4, "--box", "0.1,10,-1,1",
                          "--out", str(out), "--spectrum-out", str(spec_out)], capsys)
    assert code == 0
    artifact = json.loads(out.read_text())
    assert artifact["total_winding"] == sum(z["mult"] for z in artifact["zeros"])
    assert artifact["provenance"]["profile_hash"]
    assert artifact["provenance"]["tolerances"]["newton_tol"] == 1e-12
    ks = [z["re"] for z in artifact["zeros"] if z["im"] == 0.0]
    assert any(abs(k - math.pi) < 1e-9 for k in ks)
    spec = json.loads(spec_out.read_text())
    assert spec["eigenvalues"]


def test_eigs_degenerate_exit_3(capsys):
    code, _, err = run_cli(["eigs", "--profile", '{"kind":"constant","value":1.0}',
                            "--box", "0.1,5,-1,1"], capsys)
    assert code == 3
    assert json.loads(err)["error"] == "DegenerateProfile"


def test_density_command_full_wedge(tmp_path, capsys):
    out = tmp_path / "density.json"
    code, _, _ = run_cli(["density", "--profile", CONST4, "--k-max", "30",
                          "--window", "5,30", "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["predicted_delta"] == pytest.approx(3.0 / math.pi, rel=1e-9)
    assert rep["axis_specialization"] is False
    assert rep["delta_hat"] == pytest.approx(3.0 / math.pi, rel=0.12)
    assert rep["counts"][0][1] <= rep["counts"][-1][1]


def test_density_command_axis_only(tmp_path, capsys):
    # real zeros of the constant-4 ball sit at multiples of pi only, so the
    # axis specialization measures 1/pi and reports the gap to the law
    out = tmp_path / "density.json"
    code, _, _ = run_cli(["density", "--profile", CONST4, "--k-max", "60",
                          "--window", "5,60", "--axis-only", "--no-strip-check",
                          "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["axis_specialization"] is True
    assert rep["delta_hat"] == pytest.approx(1.0 / math.pi, rel=0.1)
    assert rep["delta_gap"] == pytest.approx(-2.0 / math.pi, rel=0.2)


def test_density_csv_export(tmp_path, capsys):
    out = tmp_path / "density.csv"
    code, _, _ = run_cli(["density", "--profile", CONST4, "--k-max", "60",
                          "--window", "5,60", "--axis-only", "--no-strip-check",
                          "--format", "csv", "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "r,N"
    rs = [float(line.split(",")[0]) for line in lines[1:]]
    assert rs == sorted(rs)


def test_indicator_command(tmp_path, capsys):
    out = tmp_path / "ind.json"
    code, _, _ = run_cli(["indicator", "--profile", CONST4,
                          "--thetas", "1.0471975511965976,1.5707963267948966",
                          "--r-max", "120", "--n-samples", "17",
                          "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["predicted_width"] == pytest.approx(6.0, abs=1e-9)
    assert rep["width"] == pytest.approx(6.0, rel=0.03)
    for row in rep["table"]:
        assert row["h_hat"] == pytest.approx(row["predicted"], rel=0.05)


def test_invert_b_and_compare(tmp_path, capsys):
    eigs = [j * math.pi / 3.0 for j in range(1, 190)]
    spec = {"wedge": {"theta_min": -0.1, "theta_max": 0.1}, "r_max": 200.0,
            "eigenvalues": [{"re": e, "im": 0.0} for e in eigs]}
    f = tmp_path / "spec.json"
    f.write_text(json.dumps(spec))
    out = tmp_path / "b.json"
    code, _, _ = run_cli(["invert-b", "--spectrum", str(f), "--window", "50,200",
                          "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["B_hat"] == pytest.approx(2.0, abs=0.01)

    out2 = tmp_path / "cmp.json"
    code, _, _ = run_cli(["compare", "--spectrum-a", str(f), "--spectrum-b", str(f),
                          "--out", str(out2)], capsys)
    assert code == 0
    rep2 = json.loads(out2.read_text())
    assert rep2["conclusion"] == "consistent_with_equal"
    assert rep2["same_B"] is True


def test_sl_eigs_command(tmp_path, capsys):
    out = tmp_path / "sl.json"
    code, _, _ = run_cli(["sl-eigs", "--profile", CONST4, "--k-max", "6",
                          "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    # constant 4: zeros of j1(2k), first at 4.4934.../2
    assert rep["eigenvalues"][0] == pytest.approx(4.493409457909064 / 2, abs=1e-8)


def test_artifacts_are_byte_identical_across_runs(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        code, _, _ = run_cli(["eigs", "--profile", CONST4, "--box", "0.1,8,-1,1",
                              "--out", str(out)], capsys)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_parallel_map_matches_sequential():
    from iteig._parallel import parallel_map
    items = list(range(24))
    assert parallel_map(_square, items, workers=2) == [x * x for x in items]
    assert parallel_map(_square, items, workers=1) == [x * x for x in items]


def _square(x):
    return x * x


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "iteig", "validate",
                           "--profile", CONST4],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["valid"] is True


def test_worker_count_does_not_change_artifacts(tmp_path):
    import os
    args = ["-m", "iteig", "indicator", "--profile", CONST4,
            "--thetas", "1.0471975511965976,1.5707963267948966",
            "--r-max", "60", "--n-samples", "9"]
    outs = []
    for workers in ("1", "3"):
        env = dict(os.environ, ITE_THREADS=workers)
        out = tmp_path / f"ind_{workers}.json"
        proc = subprocess.run([sys.executable] + args + ["--out", str(out)],
                              capture_output=True, text=True, env=env)
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
