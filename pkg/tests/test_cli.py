import io
import json
import subprocess
import sys

import pytest

from spevents.cli import main
from spevents.figures import BUILTIN_INSTANCES, builtin_text


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_run_bell_pair_json():
    code, out = run(["run", "--builtin", "bell_pair", "--boundary", "closed"])
    assert code == 0
    d = json.loads(out)
    assert d["passed"] and d["boundary_mode"] == "closed"
    assert [e["shape"]["canonical_name"] for e in d["events"]] == ["V"]
    assert d["joint_probability"] == pytest.approx(0.5)
    assert [n["time"] for n in d["nodes"]] == ["fundamental"] * 3


def test_run_text_and_svg(tmp_path):
    svg = tmp_path / "swap.svg"
    code, out = run(["run", "--builtin", "swap_bs", "--boundary", "halfopen", "--format", "text", "--svg", str(svg)])
    assert code == 0 and "shape W" in out and "shape V" in out
    assert svg.read_text().startswith("<?xml")


def test_run_file(tmp_path):
    f = tmp_path / "s.sc"
    f.write_text(builtin_text("single_prep_measure"))
    code, out = run(["run", str(f), "--boundary", "open"])
    assert code == 0 and json.loads(out)["events"][0]["shape"]["canonical_name"] == "I"


def test_boundary_is_required(capsys):
    with pytest.raises(SystemExit) as e:
        main(["run", "--builtin", "bell_pair"])
    assert e.value.code == 2


def test_parse_error_exit(tmp_path, capsys):
    f = tmp_path / "bad.sc"
    f.write_text("particle a at (0,0) vel 0\nnode warp at (1,0) on a\n")
    code, _ = run(["run", str(f), "--boundary", "closed"])
    err = json.loads(capsys.readouterr().err)
    assert code == 2 and err["error"] == "parse" and err["line"] == 2


def test_missing_file(tmp_path, capsys):
    code, _ = run(["fmt", str(tmp_path / "nope.sc")])
    assert code == 2 and json.loads(capsys.readouterr().err)["error"] == "parse"


def test_validation_error_exit(tmp_path, capsys):
    f = tmp_path / "off.sc"
    f.write_text("particle a at (0,0) vel 1\nnode detector at (5,100) on a\n")
    code, _ = run(["run", str(f), "--boundary", "closed"])
    err = json.loads(capsys.readouterr().err)
    assert code == 1 and err["error"] == "validation"
    assert err["violations"][0]["rule"] == "geometry"


def test_contradiction_exit(tmp_path, capsys):
    f = tmp_path / "c.sc"
    f.write_text(
        "particle a at (0,0) vel -1\nparticle b at (0,0) vel 1\n"
        "node pair at (0,0) on a,b kind=PsiMinus\n"
        "node detector at (1,-1) on a outcome=1\nnode detector at (1,1) on b outcome=1\n"
    )
    code, _ = run(["run", str(f), "--boundary", "closed"])
    assert code == 1 and json.loads(capsys.readouterr().err)["error"] == "contradiction"


def test_unknown_builtin(capsys):
    code, _ = run(["fmt", "--builtin", "nope"])
    err = json.loads(capsys.readouterr().err)
    assert code == 2 and err["error"] == "lookup" and "bell_pair" in err["valid"]


@pytest.mark.parametrize("name", BUILTIN_INSTANCES)
def test_fmt_is_canonical(name, tmp_path):
    code, once = run(["fmt", "--builtin", name])
    f = tmp_path / "x.sc"
    f.write_text(once)
    code2, twice = run(["fmt", str(f)])
    assert code == code2 == 0 and once == twice


def test_verify_suite():
    code, out = run(["verify", "--suite", "pbr"])
    d = json.loads(out)
    assert code == 0 and d["passed"]
    assert {v["name"] for v in d["verdicts"]} == {"phi_table_zeros", "pbr_witness", "merged_event_gap"}


def test_seeded_run_is_reproducible():
    a = run(["run", "--builtin", "bell_pair", "--boundary", "closed", "--seed", "3"])
    b = run(["run", "--builtin", "bell_pair", "--boundary", "closed", "--seed", "3"])
    assert a == b


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "spevents", "run", "--builtin", "bell_pair", "--boundary", "closed", "--format", "text"],
        capture_output=True, text=True,
    )
    assert r.returncode == 0 and "shape V" in r.stdout
