import json
import math
import subprocess
import sys

import pytest

from semitoric import cli
from semitoric.acceptance import cut_flip_pair
from semitoric.rational_geometry import hull
from semitoric.semitoric_polygon import Mark, MarkedWeightedPolygon


def _write(tmp_path, name, mp):
    p = tmp_path / name
    p.write_text(cli.dumps(mp))
    return str(p)


def _err(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


@pytest.mark.parametrize("text,env,want", [
    ("9/20sqrt(2b)", {"b": 2}, 9 / (20 * 2)),
    ("3/(8sqrt(6))", None, 3 / (8 * math.sqrt(6))),
    ("2^3 - 1", None, 7.0),
    ("-pi/2", None, -math.pi / 2),
    ("2 alpha beta", {"alpha": 1.5, "beta": 2}, 6.0),
    ("1e-3", None, 1e-3),
])
def test_eval_expr(text, env, want):
    assert cli.eval_expr(text, env) == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("bad", ["", "2+", "foo(1)", "x", "(1", "1)"])
def test_eval_expr_rejects(bad):
    with pytest.raises(ValueError):
        cli.eval_expr(bad)


def test_chop_and_exit_codes(tmp_path, capsys):
    sq = _write(tmp_path, "sq.json", MarkedWeightedPolygon(hull([(0, 0), (2, 0), (2, 2), (0, 2)])))
    assert cli.main(["polygon", "chop", sq, "--vertex", "2,2", "--lambda", "1/2"]) == cli.EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert len(out["polygon"]) == 5
    # too large a chop is infeasible
    assert cli.main(["polygon", "chop", sq, "--vertex", "2,2", "--lambda", "2"]) == cli.EXIT_INFEASIBLE
    assert _err(capsys)["exit"] == 3
    # not a corner in any representative
    assert cli.main(["polygon", "chop", sq, "--vertex", "1,2", "--lambda", "1/2"]) == cli.EXIT_INFEASIBLE
    assert cli.main(["polygon", "chop", str(tmp_path / "nope.json"), "--vertex", "0,0", "--lambda", "1"]) == 2


def test_mark_outside_is_input_error(tmp_path, capsys):
    bad = MarkedWeightedPolygon(hull([(0, 0), (2, 0), (2, 2), (0, 2)]), (Mark((5, 1), 1),))
    p = _write(tmp_path, "bad.json", bad)
    assert cli.main(["polygon", "validate", p]) == cli.EXIT_INPUT


def test_orbit_equal_cut_flip(tmp_path, capsys):
    left, right = cut_flip_pair()
    a, b = _write(tmp_path, "l.json", left), _write(tmp_path, "r.json", right)
    assert cli.main(["polygon", "orbit-equal", a, b]) == 0
    assert json.loads(capsys.readouterr().out) is True


def test_classify_w1(capsys):
    rc = cli.main(["classify", "--system", "w1-moving", "--alpha", "1", "--beta", "2",
                   "--gamma", "9/20sqrt(2b)", "--t", "0.5"])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    pts = {p["point"]: p["type"] for p in rep["verdicts"][0]["points"]}
    assert pts["C"] == "FocusFocus"
    assert rep["config"]["system"] is not None


def test_classify_transition_times(capsys):
    assert cli.main(["classify", "--system", "w1-switch", "--alpha", "1", "--beta", "3",
                     "--gamma", "3/(8sqrt(6))", "--transition-times"]) == 0
    tt = json.loads(capsys.readouterr().out)["transition_times"]
    assert tt["bisection"][0] == pytest.approx(4 / 11, abs=1e-9)
    assert tt["bisection"][1] == pytest.approx(4 / 5, abs=1e-9)


def test_parameter_window_rejected(capsys):
    rc = cli.main(["classify", "--system", "w1-moving", "--alpha", "1", "--beta", "2", "--gamma", "1", "--t", "0.5"])
    assert rc == cli.EXIT_INPUT


def test_pipeline_cli(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    assert cli.main(["pipeline", "--n", "2", "--alpha", "1", "--beta", "1", "--log", str(log)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert all(rep["checks"].values())
    assert len(log.read_text().splitlines()) == rep["steps"]
    rc = cli.main(["pipeline", "--n", "1", "--alpha", "1/4", "--beta", "4", "--lambdas", "1/2", "--y", "2"])
    assert rc == cli.EXIT_INFEASIBLE


def test_heights_cli(capsys):
    assert cli.main(["heights", "--R1", "1", "--R2", "2", "--gamma", "0.35", "--audit"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["w2"]["h1"] == pytest.approx(1.4761904761904763, abs=1e-9)
    assert rep["s2xs2"]["h1"] == pytest.approx(1.2739589509524687, abs=1e-9)
    assert cli.main(["heights", "--compare", "--alpha", "3", "--beta", "2"]) == cli.EXIT_INPUT


def test_outputs_deterministic(tmp_path, capsys):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert cli.main(["figures", "--system", "w2-2param", "--s1", "0.5", "--s2", "0.5",
                         "--resolution", "8", "--cut-flip", "--out", str(d)]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in d1.iterdir())
    assert names == sorted(p.name for p in d2.iterdir())
    for n in names:
        assert (d1 / n).read_bytes() == (d2 / n).read_bytes()


def test_atomic_write_leaves_no_temp(tmp_path):
    p = tmp_path / "sub" / "x.txt"
    cli.atomic_write(p, "one")
    cli.atomic_write(p, "two")
    assert p.read_text() == "two"
    assert [q.name for q in p.parent.iterdir()] == ["x.txt"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "semitoric", "validate-all", "--only", "7", "--quick"],
                       capture_output=True, text=True, timeout=300)
    assert r.returncode == 0
    assert r.stdout.startswith("[PASS] criterion 7")
