import json
import os

from steinlab.cli import main


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_verify_small_suite_exit_zero(tmp_path):
    cfg = _write(tmp_path, "v.json", {"suite": ["exp_weighted_default",
                                               "poincare_rayleigh_default"]})
    out = tmp_path / "out"
    code = main(["verify", "--config", cfg, "--out", str(out), "--seed", "7",
                 "--budget-scale", "0.2"])
    assert code == 0
    assert (out / "suite.csv").exists()
    assert (out / "summary.json").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "verify"
    assert manifest["seed"] == 7
    assert set(manifest["outputs"]) == {"suite.csv", "summary.json"}
    summary = json.loads((out / "summary.json").read_text())
    assert summary["all_pass"] is True
    head = (out / "suite.csv").read_text().splitlines()[0]
    assert head == "name,lhs,rhs,margin,std_error,pass"


def test_verify_seed_reruns_byte_identical(tmp_path):
    cfg = _write(tmp_path, "v.json", {"suite": ["exp_weighted_default"]})
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        code = main(["verify", "--config", cfg, "--out", str(out), "--seed", "7"])
        assert code == 0
        outs.append((out / "suite.csv").read_bytes())
    assert outs[0] == outs[1]


def test_verify_config_error_moment_guard(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.json", {"suite": [
        {"check": "stable_lp_poincare",
         "params": {"p": 1.2, "p1": 1.9, "alpha": 1.7}}]})
    code = main(["verify", "--config", cfg, "--out", str(tmp_path / "o"), "--seed", "1"])
    assert code == 2
    assert "moment guard" in capsys.readouterr().err


def test_verify_unknown_bundle_exit_two(tmp_path):
    cfg = _write(tmp_path, "bad.json", {"suite": ["no_such_bundle"]})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_clt_gaussian_flat_exit_zero(tmp_path):
    cfg = _write(tmp_path, "g.json", {
        "spec": {"kind": "gaussian", "Sigma": [1.0, 0.0, 0.0, 1.0], "d": 2},
        "Sigma": "I", "n_grid": [1, 4], "m": 256, "reps": 2})
    out = tmp_path / "out"
    code = main(["clt", "--config", cfg, "--out", str(out), "--seed", "3"])
    assert code == 0
    doc = json.loads((out / "summary.json").read_text())
    for row in doc["rows"]:
        assert abs(row["w1_hat"] - row["w1_floor"]) < 0.2


def test_clt_missing_poincare_constant_exit_two(tmp_path, capsys):
    cfg = _write(tmp_path, "m.json", {
        "spec": {"kind": "exp_power", "delta": 0.5, "d": 1},
        "n_grid": [1, 4], "m": 128, "reps": 2})
    code = main(["clt", "--config", cfg, "--out", str(tmp_path / "o")])
    assert code == 2
    assert "poincare_rayleigh" in capsys.readouterr().err


def test_clt_uniform_builtin_config_small(tmp_path):
    cfg = _write(tmp_path, "u.json", {
        "spec": {"kind": "uniform_product", "d": 1},
        "n_grid": [1, 4, 16], "m": 512, "reps": 2})
    out = tmp_path / "out"
    code = main(["clt", "--config", cfg, "--out", str(out), "--seed", "5",
                 "--jobs", "2"])
    assert code == 0
    lines = (out / "suite.csv").read_text().splitlines()
    assert lines[0] == "n,w1_hat,w1_floor,bound,std_error"


def test_stein_command(tmp_path):
    cfg = _write(tmp_path, "s.json", {"suite": ["gaussian_self", "gaussian_norm_constant"]})
    out = tmp_path / "out"
    code = main(["stein", "--config", cfg, "--out", str(out), "--seed", "2",
                 "--budget-scale", "0.1"])
    assert code == 0
    rows = json.loads((out / "summary.json").read_text())["results"]
    names = {r["name"] for r in rows}
    assert "stein_gaussian_self_discrepancy" in names


def test_semigroup_command(tmp_path):
    cfg = _write(tmp_path, "sg.json", {"suite": ["bismut_characters"]})
    out = tmp_path / "out"
    code = main(["semigroup", "--config", cfg, "--out", str(out), "--seed", "2"])
    assert code == 0
    rows = json.loads((out / "summary.json").read_text())["results"]
    assert rows[0]["lhs"] < 1e-6


def test_builtin_config_resolution(tmp_path):
    # builtin names resolve through the packaged configs
    out = tmp_path / "out"
    code = main(["semigroup", "--config", "semigroup-default", "--out", str(out),
                 "--seed", "1"])
    assert code == 0


def test_missing_config_exit_two(tmp_path):
    assert main(["verify", "--config", "/does/not/exist.json",
                 "--out", str(tmp_path / "o")]) == 2


def test_no_writes_outside_out_dir(tmp_path, monkeypatch):
    cfg = _write(tmp_path, "v.json", {"suite": ["exp_weighted_default"]})
    workdir = tmp_path / "cwd"
    workdir.mkdir()
    monkeypatch.chdir(workdir)
    out = tmp_path / "out"
    before = set(os.listdir(workdir))
    assert main(["verify", "--config", cfg, "--out", str(out), "--seed", "1"]) == 0
    assert set(os.listdir(workdir)) == before
    assert set(os.listdir(out)) == {"suite.csv", "summary.json", "manifest.json"}
