import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from twistor_limits import __version__
from twistor_limits.cli import main, parse_manifest, run
from twistor_limits.exceptions import ParseError, SchemaError, VersionError

MANIFESTS = Path(__file__).resolve().parent.parent / "manifests"
X = [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]]


def doc(*tasks, version=1):
    return json.dumps({"version": version, "tasks": list(tasks)})


def test_minimal_manifest():
    m = parse_manifest(doc({"kind": "char-curve", "input": {"X": X}}))
    assert len(m.tasks) == 1 and m.tasks[0].id == "task0"


def test_unknown_kind_names_task():
    with pytest.raises(SchemaError, match="task 1"):
        parse_manifest(doc({"kind": "char-curve", "input": {"X": X}},
                           {"kind": "frobnicate", "input": {}}))


def test_ragged_matrix():
    with pytest.raises(SchemaError):
        parse_manifest(doc({"kind": "char-curve", "input": {"X": [[[1, 0], [0, 0]], [[1, 0]]]}}))


@pytest.mark.parametrize("task", [
    {"kind": "char-curve", "input": {"X": X}, "colour": 1},
    {"kind": "char-curve", "input": {"X": X, "Z": X}},
    {"kind": "char-curve", "input": {"X": X}, "output": {"format": "x"}},
    {"kind": "char-curve", "input": {"X": [[1, 0]]}},
    {"kind": "minitwistor", "input": {"point": [1, 2, 3]}},
    {"kind": "cocycle", "input": {"s": 1, "zeta": 1, "w": [0, 0], "t": 0}},
])
def test_strictness(task):
    with pytest.raises(SchemaError):
        parse_manifest(doc(task))


def test_parse_errors_carry_position():
    with pytest.raises(ParseError, match="line 2"):
        parse_manifest('{"version": 1,\n "tasks": [,]}')
    with pytest.raises(ParseError):
        parse_manifest('{"version": 1, "tasks": [], "x": NaN}')


def test_version_error():
    with pytest.raises(VersionError):
        parse_manifest(doc(version=2))


def _run_file(path, out_dir):
    return run(parse_manifest(Path(path).read_text(encoding="utf-8")), out_dir=str(out_dir))


def test_example_manifest(tmp_path):
    status, report = _run_file(MANIFESTS / "example.json", tmp_path)
    assert status == 0
    assert "hypercomplex: true; char poly = (ζ−η)²; vanishing: pass" in report
    assert "limit curve: w = 1+2i + (6)ζ + (-1+2i)ζ²" in report
    lines = (tmp_path / "monopole-123.csv").read_text().splitlines()
    assert lines[0] == "task_id,zeta_re,zeta_im,w_or_eta_re,w_or_eta_im,t"
    assert lines[1] == "monopole-123,1.0,0.0,6.0,4.0,0.0"


def test_determinism_and_parallel(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    m = parse_manifest((MANIFESTS / "example.json").read_text(encoding="utf-8"))
    ra = run(m, out_dir=str(a))
    rb = run(m, out_dir=str(b), parallel=True)
    assert ra == rb
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b)) and names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_degenerate_manifest(tmp_path):
    status, report = _run_file(MANIFESTS / "degenerate.json", tmp_path)
    assert status == 1 and "DegeneratePencil" in report
    assert not list(tmp_path.iterdir())


def test_failed_check_removes_stale_csv(tmp_path):
    (tmp_path / "sing.csv").write_text("stale")
    task = {"id": "sing", "kind": "check-pluricomplex",
            "input": {"X": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}, "output": {"csv": "sing.csv"}}
    status, report = run(parse_manifest(doc(task)), out_dir=str(tmp_path))
    assert status == 1 and "vanishing: fail" in report
    assert not (tmp_path / "sing.csv").exists()


def test_main_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1, "tasks": [{"kind": "nope", "input": {}}]}')
    assert main(["validate", str(bad)]) == 2
    assert main(["validate", str(MANIFESTS / "example.json")]) == 0
    assert main(["run", str(MANIFESTS / "degenerate.json"), "--out-dir", str(tmp_path)]) == 1
    assert "DegeneratePencil" in capsys.readouterr().out
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_console_script(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "twistor_limits.cli", "run", str(MANIFESTS / "example.json"),
         "--out-dir", str(tmp_path)],
        capture_output=True, text=True, encoding="utf-8",
    )
    assert out.returncode == 0 and "all passed" in out.stdout
