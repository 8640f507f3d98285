import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from fnforms.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload) if not isinstance(payload, str) else payload, encoding="utf-8")
    return str(p)


def test_curvature_golden():
    code, out, err = run("curvature", str(GOLDEN / "connA.json"), "--apply", "(z)", "--apply", "(1) z")
    assert code == 0 and err == ""
    assert out == (GOLDEN / "connA_curvature.txt").read_text()


def test_curvature_plain(conn_a_path):
    code, out, _ = run("curvature", str(conn_a_path))
    assert out == "R = (1) x^y (*) d/z\nRbar = 0\n" and code == 0


def test_not_idempotent(tmp_path):
    p = write(tmp_path, "bad.json", {"dim": 2, "coords": ["x", "y"], "phi": [["1", "0"], ["0", "2"]]})
    code, out, err = run("curvature", p)
    assert code == 2 and out == ""
    assert err == "error[not-idempotent]: phi is not idempotent\n"


@pytest.mark.parametrize(
    "payload,prefix",
    [
        ("{nope", "error[parse]:"),
        ({"coords": ["x", "y"], "phi": [["x^"]]}, "error[parse]:"),
    ],
)
def test_parse_errors(tmp_path, payload, prefix):
    code, _, err = run("curvature", write(tmp_path, "c.json", payload))
    assert code == 2 and err.startswith(prefix) and err.count("\n") == 1


def test_error_prefixes_are_distinct(tmp_path, conn_a_path):
    seen = {}
    seen["parse"] = run("curvature", write(tmp_path, "c.json", "{"))[2]
    seen["not-idempotent"] = run("curvature", write(tmp_path, "d.json", {"coords": ["x"], "phi": [["2"]]}))[2]
    seen["unknown-suite"] = run("verify", "nosuch")[2]
    seen["degree"] = run("bracket", "alg", "(1) (*) d/x", "(1) x (*) d/y", "--coords", "x,y")[2]
    seen["not-equivariant"] = run("bracket", "hat", "(1) x^y (*) d/z", "(1) x (*) d/x", "--conn", str(conn_a_path))[2]
    seen["not-in-der-h"] = run("decompose", str(conn_a_path), "[d,h*]", "--h")[2]
    for code, msg in seen.items():
        assert msg.startswith(f"error[{code}]:"), msg


def test_bracket_commands(conn_a_path):
    code, out, _ = run("bracket", "fn", "(y) (*) d/x", "(x z) (*) d/y", "--coords", "x,y,z")
    assert code == 0 and out == "[K,L] = (-x z) (*) d/x + (y z) (*) d/y\n"
    code, out, _ = run("bracket", "alg", "(1) x (*) d/y", "(1) y (*) d/x", "--coords", "x,y")
    assert code == 0
    code, out, _ = run("bracket", "hat", "(1) x (*) d/x", "(1) x (*) d/x", "--conn", str(conn_a_path))
    assert code == 0 and out == "[K,L] = 0\n"
    code, _, err = run("bracket", "fn", "(1) x (*) d/y", "(1) (*) d/x")
    assert code == 2 and "--coords" in err


def test_decompose_commands(conn_a_path):
    code, out, _ = run("decompose", str(conn_a_path), "[d,h*]")
    assert code == 0
    assert out == "K = (-x) y (*) d/z + (1) z (*) d/z\nL = (1) x^y (*) d/z\n"
    code, out, _ = run("decompose", str(conn_a_path), "d^h", "--h")
    assert out == "K = (1) x (*) d/x + (1) y (*) d/y + (x) y (*) d/z\nL = 0\n"
    code, out, _ = run("decompose", str(conn_a_path), "theta(X).h* + 2*i_h(M)", "--form", "X=(y) (*) d/x", "--form", "M=(1) x (*) d/z")
    assert code == 0 and out == "K = (y) (*) d/x\nL = (2) x (*) d/z\n"
    code, _, err = run("decompose", str(conn_a_path), "[d,")
    assert code == 2 and err.startswith("error[parse]")


def test_lift(tmp_path):
    p = write(tmp_path, "b.json", {"base_coords": ["x", "y"], "fiber_coords": ["z"], "gamma": [["0", "x"]]})
    code, out, _ = run("lift", p, "(1) x (*) d/y")
    assert code == 0 and out == "chi_*K = (1) x (*) d/y + (x) x (*) d/z\n"
    code, _, err = run("lift", p, "(z) x (*) d/y")
    assert code == 2 and err.startswith("error[parse]")


def test_verify_pass_and_out(tmp_path):
    target = tmp_path / "r.txt"
    code, out, _ = run("verify", "prop25", "--trials", "2", "--out", str(target))
    assert code == 0 and out == "PASS 2/2\n"
    text = target.read_text()
    assert text.startswith("suite=prop25 seed=0 dims=3 trials=2\n") and text.endswith("PASS 2/2\n")


def test_verify_rejects_bad_flags():
    with pytest.raises(SystemExit) as e:
        run("verify", "bianchi", "--dims", "9")
    assert e.value.code == 2
    with pytest.raises(SystemExit):
        run("verify", "bianchi", "--trials", "0")


def test_module_entry_point(conn_a_path):
    res = subprocess.run(
        [sys.executable, "-m", "fnforms", "curvature", str(conn_a_path)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "R = (1) x^y (*) d/z"
