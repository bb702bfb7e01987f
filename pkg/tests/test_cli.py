import json
import subprocess
import sys

import pytest

CFG = {
    "domain": "disk",
    "degree_max": 8,
    "samples": {"interior": [["0.35", "0.2"]], "exterior": [["1.5", "0.3"]],
                "n_values": [4, 8], "jitter_count": 2,
                "jitter_box": ["0.32", "0.45", "0.1", "0.3"]},
    "raster": {"nx": 6, "ny": 6, "pad": "0.15"},
}


def _run(args, cwd):
    return subprocess.run([sys.executable, "-m", "bergman_lab.cli"] + args,
                          capture_output=True, text=True, cwd=cwd)


@pytest.fixture(scope="module")
def outdir(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    cfg = base / "cfg.json"
    cfg.write_text(json.dumps(CFG))
    out = base / "out"
    for sub in ("ortho", "tables", "zeros", "asymptotics", "continuation"):
        r = _run([sub, "--config", str(cfg), "--out", str(out)], base)
        assert r.returncode == 0, f"{sub}: {r.stderr}"
    return out


def test_artifacts_present(outdir):
    names = {p.name for p in outdir.iterdir()}
    assert {"config.json", "system.json", "lambda.csv", "identity.csv",
            "alpha.csv", "h_table.csv", "zeros.csv", "deviations.csv",
            "profile.csv", "raster.csv"} <= names


def test_csv_conventions(outdir):
    for p in outdir.glob("*.csv"):
        data = p.read_bytes()
        assert b"\r" not in data, f"{p.name}: CRLF line ending"
        text = data.decode("ascii")  # raises if any non-ascii byte sneaks in
        lines = text.strip().split("\n")
        assert not lines[0][0].isdigit(), f"{p.name}: missing header"
        width = lines[0].count(",")
        assert all(ln.count(",") == width for ln in lines), p.name
        # decimal separator is '.' (never ','), so every numeric field parses
        import mpmath as mp
        for ln in lines[1:]:
            for field in ln.split(","):
                try:
                    mp.mpf(field)
                except ValueError:
                    assert field in ("interior", "exterior", "omega-star",
                                     "True", "False"), (p.name, field)


def test_config_echo_normalized(outdir):
    doc = json.loads((outdir / "config.json").read_text())
    assert doc["domain"] == "disk"
    assert doc["degree_max"] == 8
    assert "precision_bits" in doc


def test_bad_config_exit_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"domain": "heptagon-ish"}))
    r = _run(["ortho", "--config", str(cfg)], tmp_path)
    assert r.returncode == 2


def test_invalid_json_exit_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    r = _run(["ortho", "--config", str(cfg)], tmp_path)
    assert r.returncode == 2


def test_computation_error_exit_1(tmp_path):
    # an interior sample below the annulus floor cannot be continued
    bad = dict(CFG)
    bad["samples"] = {"interior": [["0.05", "0.0"]], "exterior": [],
                      "n_values": [4], "jitter_count": 0}
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(bad))
    r = _run(["asymptotics", "--config", str(cfg), "--out",
              str(tmp_path / "out")], tmp_path)
    assert r.returncode == 1
