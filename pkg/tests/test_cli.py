import json

import pytest

from wavelab.cli import RunConfig, ConfigError, main


def _read(path):
    return path.read_text(encoding="utf-8")


def test_build_example_files(tmp_path):
    out = tmp_path / "run1"
    assert main(["build", "--bank", "example", "--r", "1", "--grid", "512", "--out", str(out)]) == 0
    for name in ("p.csv", "h11.csv", "h12.csv", "h21.csv", "g1.csv", "g2.csv",
                 "phi1.csv", "phi2.csv", "psi.csv", "bank.json"):
        assert (out / name).is_file(), name
    summary = json.loads(_read(out / "build_summary.json"))
    assert summary["off_window_max"]["phi1_below_0.01"]
    assert summary["off_window_max"]["phi2_below_0.002"]
    phi1 = _read(out / "phi1.csv").splitlines()
    assert phi1[0] == "x,value" and float(phi1[1].split(",")[0]) == -1.0


def test_build_journe_jumps_at_sevenths(tmp_path):
    out = tmp_path / "j"
    assert main(["build", "--bank", "journe", "--grid", "7001", "--out", str(out)]) == 0
    rows = [line.split(",") for line in _read(out / "phi1.csv").splitlines()[1:]]
    x = [float(r[0]) for r in rows]
    v = [float(r[1]) for r in rows]
    values = set(v)
    assert values <= {0.0, 1.0}
    jumps = [(x[i] + x[i + 1]) / 2 for i in range(len(v) - 1) if v[i] != v[i + 1]]
    for jump in jumps:
        # every jump lies within one grid step of a multiple of 1/14
        assert min(abs(jump - k / 14) for k in range(-14, 15)) < 2.0 / 7000


def test_sample_rows(tmp_path, capsys):
    out = tmp_path / "psi.csv"
    code = main(["sample", "--bank", "journe", "--target", "psi_hat", "--window", "-3", "3",
                 "--grid", "4096", "--out", str(out)])
    assert code == 0
    lines = _read(out).splitlines()
    assert lines[0] == "x,value" and len(lines) == 4097


def test_sample_stdout_json(capsys):
    code = main(["sample", "--bank", "classical:shannon", "--target", "psi_hat",
                 "--window", "-2", "2", "--grid", "64", "--format", "json", "--out", "-"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["x"]) == 64 and "re" in payload


def test_sample_dimension_journe(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["sample", "--bank", "journe", "--target", "dimension", "--grid", "256",
                 "--out", str(out)]) == 0
    vals = {float(line.split(",")[1]) for line in _read(out).splitlines()[1:]}
    assert vals <= {0.0, 1.0, 2.0}


def test_unknown_target_is_usage_error(capsys):
    code = main(["sample", "--bank", "journe", "--target", "nope", "--out", "-"])
    assert code == 2
    assert "unknown target" in capsys.readouterr().err


def test_invalid_config_rejected(tmp_path, capsys):
    assert main(["build", "--r", "-1", "--out", str(tmp_path)]) == 2
    assert main(["build", "--grid", "10", "--out", str(tmp_path)]) == 2
    assert main(["verify", "--tol", "0", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit):
        main(["build", "--bank", "daubechies"])
    with pytest.raises(ConfigError):
        RunConfig(grade="smooth").validate()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bank": "journe", "grid": 128, "target": "phi2_hat",
                               "window": [-2, 2]}))
    out = tmp_path / "a.csv"
    assert main(["sample", "--config", str(cfg), "--grid", "100", "--out", str(out)]) == 0
    assert len(_read(out).splitlines()) == 101
    cfg.write_text(json.dumps({"banana": 1}))
    assert main(["sample", "--config", str(cfg), "--out", "-"]) == 2


def test_verify_journe_passes_and_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "--bank", "journe", "--seed", "3", "--out", str(a)]) == 0
    assert main(["verify", "--bank", "journe", "--seed", "3", "--out", str(b)]) == 0
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for rel in files:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel
    rep = json.loads(_read(a / "reports" / "generalized_filter_equations.json"))
    assert rep["max_residual"] == 0.0 and rep["pass"]
    assert rep["grid"]["seed"] == 3


def test_verify_tiny_tolerance_fails_with_explanation(tmp_path, capsys):
    code = main(["verify", "--bank", "classical:haar", "--tol", "1e-20", "--out", str(tmp_path)])
    assert code == 1
    err = capsys.readouterr().err
    assert "checks failed" in err and "cannot be certified" in err


def test_report_command(tmp_path, capsys):
    main(["verify", "--bank", "classical:shannon", "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["report", "--out", str(tmp_path)]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["report", "--out", str(tmp_path / "missing")]) == 2
