import json
import subprocess
import sys

import pytest

from sfcalc import config as cfg
from sfcalc.cli import main
from sfcalc.errors import ConfigError


def write(tmp_path, text, name="job.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_reproduce_example_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["reproduce-example", "-o", str(a)]) == 0
    assert main(["reproduce-example", "-o", str(b)]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()
    report = json.loads((tmp_path / "a.json").read_text())
    assert all(c["passed"] for c in report["checks"])
    assert "PASS" in capsys.readouterr().out


def test_spectrum_of_diagonal_matrix(tmp_path):
    job = write(tmp_path, """
task = "spectrum"

[operator]
kind = "matrix"
n = 2
entries = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0]]

[output]
path = "%s"
""" % (tmp_path / "spec").as_posix())
    assert main(["-i", job]) == 0
    report = json.loads((tmp_path / "spec.json").read_text())
    spheres = sorted(tuple(round(v, 12) for v in s) for s in report["results"]["spectrum"]["spheres"])
    assert spheres == [(0.0, 1.0), (1.0, 0.0)]


def test_apply_intrinsic_job(tmp_path):
    job = write(tmp_path, """
task = "apply-intrinsic"

[operator]
kind = "random"
size = 2

[function]
name = "polynomial"
coeffs = [1, 0, 1]

[contour]
nodes = 128
""")
    assert main(["-i", job, "-o", str(tmp_path / "out")]) == 0


def test_diagonal_operator_job(tmp_path):
    job = write(tmp_path, """
task = "apply-intrinsic"

[operator]
kind = "diagonal"
symbols = [[1, 0, 0, 0], [-2, 0, 0, 0], [0.5, 0, 0, 0]]
closure = { intervals = [["-inf", "inf"]], infinity = true }

[function]
name = "rational"
numerator = [1]
denominator = [1, 0, 1]

[contour]
clearance = 0.5
nodes = 512
""")
    assert main(["-i", job]) == 0


def test_verify_with_seed(capsys):
    assert main(["verify", "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "resolvent_equation_left" in out


def test_project_task(tmp_path):
    job = write(tmp_path, """
task = "project"
selected = [[1.0, 0.0]]

[operator]
kind = "matrix"
n = 2
entries = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0]]
""")
    assert main(["-i", job, "--clearance", "0.3"]) == 0


def test_malformed_toml_reports_line(tmp_path, capsys):
    job = write(tmp_path, 'task = "spectrum"\n[operator\nkind = 1\n')
    assert main(["-i", job]) == 2
    assert "line 2" in capsys.readouterr().err


def test_unknown_function_names_field(tmp_path, capsys):
    job = write(tmp_path, """task = "apply-left"
[operator]
kind = "random"
[function]
name = "sinh"
""")
    assert main(["-i", job]) == 2
    err = capsys.readouterr().err
    assert "function.name" in err and "line 5" in err


@pytest.mark.parametrize("text, field", [
    ('task = "nope"', "task"),
    ('task = "spectrum"\nextra = 1', "extra"),
    ('task = "verify"\n[contour]\nnodes = 4', "contour.nodes"),
    ('task = "verify"\n[contour]\nclearance = -1.0', "contour.clearance"),
    ('task = "project"\n[operator]\nkind = "random"', "selected"),
    ('task = "verify"\nseed = "x"', "seed"),
])
def test_config_errors(text, field):
    with pytest.raises(ConfigError) as info:
        cfg.loads(text)
    assert info.value.field == field


def test_parse_unit():
    assert cfg.parse_unit("J").vector.tolist() == [0.0, 1.0, 0.0]
    assert cfg.parse_unit("0,0,2").vector.tolist() == [0.0, 0.0, 1.0]
    with pytest.raises(ConfigError):
        cfg.parse_unit("0,0,0")


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "sfcalc", "reproduce-example"], capture_output=True, text=True)
    assert out.returncode == 0
