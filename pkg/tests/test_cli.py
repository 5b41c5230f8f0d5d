import csv
import io
import json
import math
import subprocess
import sys

import pytest

from circlerenorm import __version__
from circlerenorm.cli import main

from conftest import GOLDEN


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_staircase_zero_coupling(capsys):
    code, out, _ = run(capsys, "staircase", "--b", "0", "--a-range", "0:1:11")
    assert code == 0
    table = rows(out)
    assert table[0] == ["a", "rot_lo", "rot_hi"]
    assert len(table) == 12
    for a, lo, hi in table[1:]:
        assert float(lo) == float(hi) == pytest.approx(float(a), abs=1e-12)


def test_boundary_closed_form(capsys):
    code, out, _ = run(capsys, "boundary", "--p", "0", "--q", "1", "--b", "0.5")
    assert code == 0
    _, lo, hi = map(float, rows(out)[1])
    assert lo == pytest.approx(-0.5 / (2 * math.pi), abs=1e-8)
    assert hi == pytest.approx(0.5 / (2 * math.pi), abs=1e-8)


def test_brjuno_json_header(capsys):
    code, out, _ = run(capsys, "brjuno", "--alpha", "golden", "--depth", "60")
    doc = json.loads(out)
    assert code == 0
    assert doc["value"] == pytest.approx(math.log(1 / GOLDEN) / (1 - GOLDEN), abs=1e-8)
    assert doc["tool_version"] == __version__ and doc["subcommand"] == "brjuno"
    assert doc["config_echo"]["depth"] == 60


def test_rot_exact_rational(capsys):
    code, out, _ = run(capsys, "rot", "--arnold", "0.5", "0.7")
    assert code == 0
    doc = json.loads(out)
    assert doc["exact"] is True
    assert doc["lower"] == doc["upper"] == "1/2"


def test_domain_error_exit_code(capsys):
    code, out, err = run(capsys, "rot", "--arnold", "0.3", "1.5")
    assert code == 1
    assert json.loads(err)["error"] == "NonMonotoneMap"


def test_usage_errors(capsys, tmp_path):
    code, _, err = run(capsys, "rot", "--map", str(tmp_path / "missing.json"))
    assert code == 2 and "does not exist" in err
    with pytest.raises(SystemExit) as info:
        main(["staircase", "--b", "0"])
    assert info.value.code == 2


def test_map_file_and_sidecar(capsys, tmp_path):
    spec = tmp_path / "map.json"
    spec.write_text(json.dumps({"kind": "rotation", "alpha": GOLDEN}))
    out = tmp_path / "part.csv"
    code, _, _ = run(capsys, "partition", "--map", str(spec), "--level", "4", "--out", str(out))
    assert code == 0
    table = rows(out.read_text())
    assert table[0] == ["label", "l", "left", "right", "length"]
    assert len(table) == 14
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["n_long"] == 8 and meta["n_short"] == 5
    assert meta["subcommand"] == "partition"


def test_measure_and_renorm(capsys, tmp_path):
    code, out, _ = run(capsys, "measure", "--arnold", "0.3", "0.5", "--grid", "256",
                       "--sidecar", str(tmp_path / "m.json"))
    assert code == 0
    weights = [float(w) for _, w in rows(out)[1:]]
    assert len(weights) == 256 and sum(weights) / 256 == pytest.approx(1.0)
    assert json.loads((tmp_path / "m.json").read_text())["invariance_residual"] <= 1e-6
    code, out, _ = run(capsys, "renorm", "--tongue", "golden", "--levels", "12",
                       "--sidecar", str(tmp_path / "r.json"))
    assert code == 0
    assert json.loads((tmp_path / "r.json").read_text())["k"] == 1


def test_triple_lift(capsys):
    code, out, _ = run(capsys, "triple", "lift", "--mu1", "-0.01")
    doc = json.loads(out)
    assert code == 0
    assert doc["a"] < 0 and doc["residual"] <= 1e-6
    code, out, _ = run(capsys, "triple", "lift", "--tongue", "golden")
    assert json.loads(out)["a"] == 0.0


def test_tongue_curve(capsys):
    code, out, _ = run(capsys, "tongue", "--alpha", "golden", "--b-grid", "0:0.5:3", "--tol", "1e-9")
    assert code == 0
    table = rows(out)[1:]
    assert float(table[0][1]) == pytest.approx(GOLDEN, abs=1e-9)


def test_smoothness_command(capsys, tmp_path):
    code, out, _ = run(capsys, "smoothness", "--alpha", "golden", "--jmax", "11", "--tol", "1e-6",
                       "--qcap", "10000", "--sidecar", str(tmp_path / "s.json"))
    assert code in (0, 1)
    assert len(rows(out)) == 10
    assert "divided_diffs" in json.loads((tmp_path / "s.json").read_text())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "circlerenorm", "brjuno", "--alpha", "silver"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["subcommand"] == "brjuno"
