import io
import json
import subprocess
import sys

import pytest

from dtmotive.cli import main
from dtmotive.reduced import unregister_plugin
from dtmotive.dsl import builtin


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_dt_c3_text():
    code, out = run("dt", "builtin:c3", "--framing", "1", "--box", "2", "--method", "both")
    assert code == 0
    assert "L^(3/2)" in out and "L^3 + L^2 + L" in out
    assert "residuals: all zero" in out


def test_dt_json_is_deterministic():
    _, a = run("dt", "builtin:c3", "--box", "2", "--format", "json")
    _, b = run("dt", "builtin:c3", "--box", "2", "--format", "json")
    assert a == b
    data = json.loads(a)
    assert data["raw"]["1"] == {"num": ["0", "0", "0", "1"], "den": ["1"]}
    assert data["methods_agree"] and data["residuals_zero"] and data["laurent"]


def test_check_orbifold_exit_zero():
    code, out = run("check", "builtin:orbifold", "--n", "2", "--framing", "1,0", "--box", "1,1")
    assert code == 0
    assert "orbifold product formula (n=2): match" in out


def test_validate_reports_reused_arrow(tmp_path):
    path = tmp_path / "bad.quiver"
    path.write_text("quiver bad\nvertex 0\narrow x: 0 -> 0\narrow y: 0 -> 0\nlinear: x\nreduced: x*y\n")
    code, out = run("validate", str(path), "--format", "json")
    assert code == 2
    assert [v["rule"] for v in json.loads(out)["violations"]] == ["arrow of L occurs in R"]


def test_parse_error_exit_two(tmp_path, capsys):
    path = tmp_path / "bad.quiver"
    path.write_text("quiver bad\nvertex 0\narrow x: 0 -> 1\n")
    code, _ = run("validate", str(path))
    assert code == 2
    assert "line 3" in capsys.readouterr().err


def test_usage_errors():
    assert run("dt", "builtin:c3")[0] == 2
    assert run("dt", "builtin:c3", "--box", "x")[0] == 2
    assert run("oracle", "orbifold", "--box", "1")[0] == 2
    assert run("dt", "builtin:c3", "--box", "2", "--framing", "0")[0] == 2
    assert run("dt", "builtin:orbifold", "--n", "2", "--box", "1,1", "--engine", "plugin")[0] == 2


def test_infeasible_exit_two(capsys):
    code, _ = run("reduced", "builtin:c3", "--dim", "2", "--prime-limit", "7")
    assert code == 2
    assert "prime limit" in capsys.readouterr().err


def test_reduced_and_oracle():
    code, out = run("reduced", "builtin:orbifold", "--n", "2", "--dim", "1,1")
    assert code == 0 and "L^5 + L^4 - L^3" in out
    code, out = run("oracle", "orbifold", "--n", "1", "--box", "2", "--format", "json")
    assert code == 0 and set(json.loads(out)["series"]) == {"0", "1", "2"}


def test_euler_with_plugin():
    try:
        code, out = run("euler", "builtin:c3", "--box", "6", "--engine", "plugin", "--format", "json")
    finally:
        unregister_plugin(builtin("c3"))
    assert code == 0
    assert json.loads(out)["euler"] == {"0": 1, "1": -1, "2": 3, "3": -6, "4": 13, "5": -24, "6": 48}


def test_cache_directory(tmp_path):
    args = ("reduced", "builtin:c3", "--dim", "2", "--cache", str(tmp_path), "--format", "json")
    code, cold = run(*args)
    assert code == 0 and len(list(tmp_path.iterdir())) == 1
    assert run(*args) == (0, cold)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dtmotive", "check", "builtin:c3", "--box", "2"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert "orbifold product formula (n=1): match" in proc.stdout
