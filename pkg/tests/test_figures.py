"""Figure rendering from the committed sample CSVs.

The four committed specs in tests/data point at CSVs produced by the
command-line runner on the square.  Rendering must succeed for every
kind, be byte-deterministic within a session, and match the pinned
reference checksums when the installed matplotlib matches the pinned
version (PNG bytes are not stable across matplotlib releases).
"""

import hashlib
import json
import os
import subprocess
import sys

import pytest

matplotlib = pytest.importorskip("matplotlib")

from bergman_lab import figures  # noqa: E402

HERE = os.path.dirname(__file__)
DATA = os.path.join(HERE, "data")
ROOT = os.path.dirname(HERE)
KINDS = ("zeros", "decay", "profile", "raster")


def _spec_path(kind):
    return os.path.join(DATA, f"fig_{kind}.json")


def _load_spec(kind, tmp_path):
    spec = figures.FigureSpec.from_json(_spec_path(kind))
    spec.input = os.path.join(ROOT, spec.input)
    spec.output = str(tmp_path / f"{kind}.png")
    return spec


def _sha256(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


@pytest.mark.parametrize("kind", KINDS)
def test_kind_renders(kind, tmp_path):
    spec = _load_spec(kind, tmp_path)
    out = figures.render(spec)
    assert os.path.exists(out)
    with open(out, "rb") as f:
        head = f.read(8)
    assert head == b"\x89PNG\r\n\x1a\n"
    assert os.path.getsize(out) > 1000


@pytest.mark.parametrize("kind", KINDS)
def test_render_is_deterministic(kind, tmp_path):
    spec = _load_spec(kind, tmp_path)
    first = _sha256(figures.render(spec))
    spec.output = str(tmp_path / f"{kind}_again.png")
    second = _sha256(figures.render(spec))
    assert first == second


def test_reference_checksums(tmp_path):
    with open(os.path.join(DATA, "figure_checksums.json"),
              encoding="utf-8") as f:
        ref = json.load(f)
    if matplotlib.__version__ != ref["matplotlib"]:
        pytest.skip(f"checksums pinned at matplotlib {ref['matplotlib']}, "
                    f"installed {matplotlib.__version__}")
    for kind in KINDS:
        spec = _load_spec(kind, tmp_path)
        assert _sha256(figures.render(spec)) == ref["checksums"][kind], kind


def test_script_invocation(tmp_path):
    spec = figures.FigureSpec.from_json(_spec_path("decay"))
    raw = {
        "kind": "decay",
        "input": os.path.join(ROOT, spec.input),
        "output": str(tmp_path / "cli_decay.png"),
    }
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(raw))
    proc = subprocess.run(
        [sys.executable, "-m", "bergman_lab.figures",
         "--spec", str(spec_file)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert os.path.exists(raw["output"])


def test_missing_column_names_it(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("n,re\n1,0.5\n")
    raw = {"kind": "zeros", "input": str(bad),
           "output": str(tmp_path / "x.png")}
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(raw))
    proc = subprocess.run(
        [sys.executable, "-m", "bergman_lab.figures",
         "--spec", str(spec_file)],
        capture_output=True, text=True)
    assert proc.returncode != 0
    assert "im" in proc.stderr


def test_unknown_kind_rejected(tmp_path):
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(
        {"kind": "pie", "input": "x.csv", "output": "x.png"}))
    proc = subprocess.run(
        [sys.executable, "-m", "bergman_lab.figures",
         "--spec", str(spec_file)],
        capture_output=True, text=True)
    assert proc.returncode != 0
    assert "pie" in proc.stderr
