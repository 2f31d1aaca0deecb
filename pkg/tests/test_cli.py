import io as stdio
import json

import jsonschema
import pytest

from cxc.cli import SCHEMA_PATH, run_cli

from conftest import GOLDEN

SCHEMA = json.loads(SCHEMA_PATH.read_text())


def run(*argv):
    out = stdio.StringIO()
    code = run_cli([str(a) for a in argv], stdout=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--json")
    report = json.loads(text)
    jsonschema.validate(report, SCHEMA)
    assert report["result"]["exit_code"] == code
    return code, report


def g(name):
    return GOLDEN / name


def test_minset_pendant():
    code, rep = run_json("minset", g("pendant.cxc"))
    assert code == 0
    assert rep["result"]["translation_length"] == 1
    assert rep["result"]["min_orbits"] == ["a"]


def test_is_cat0_hexagon():
    code, rep = run_json("is-cat0", g("hexagon.cxc"))
    assert code == 1
    assert rep["witnesses"]["median_triple"] == [0, 2, 4]


def test_distance_grid():
    code, rep = run_json("distance", g("grid.cxc"), 0, 8)
    assert code == 0
    assert rep["result"]["distance"] == 4 == rep["result"]["walls_cross_check"]
    code, text = run("distance", g("grid.cxc"), 0, 8)
    assert "4" in text


@pytest.mark.parametrize("argv,code", [
    (("validate", "grid.cxc"), 0),
    (("links", "cube-boundary.cxc"), 1),
    (("links", "pendant.cxc"), 0),
    (("is-cat0", "median-7.cxc"), 0),
    (("is-cat0", "ladder.cxc"), 0),
    (("walls", "flipped-strip.cxc"), 1),
    (("walls", "ladder.cxc"), 0),
    (("distance", "ladder.cxc", "a@0", "b@3"), 0),
    (("classify", "square-identity.cxc"), 0),
    (("classify", "square-rotation.cxc", "--power-bound", "2"), 1),
    (("classify", "square-rotation.cxc", "--power-bound", "1"), 3),
    (("classify", "glide.cxc", "--power-bound", "1"), 1),
    (("classify", "pendant.cxc"), 0),
    (("verify-min", "pendant.cxc", "--loop-samples", "20"), 0),
    (("axis", "pendant.cxc"), 0),
    (("axis", "square-identity.cxc"), 1),
    (("contract-loop", "square.cxc", 0, 1, 3, 2, 0), 0),
    (("contract-loop", "hexagon.cxc", 0, 1, 2, 3, 4, 5, 0), 3),
    (("contract-loop", "square.cxc", 0, 3), 2),
    (("distance", "missing.cxc", 0, 1), 2),
    (("minset", "square.cxc"), 2),
    (("distance", "grid.cxc", 0, 99), 2),
])
def test_exit_codes_and_schema(argv, code):
    cmd, name, *rest = argv
    got, rep = run_json(cmd, g(name), *rest)
    assert got == code
    if code == 1:
        assert rep["witnesses"]


def test_classify_reports():
    _, rep = run_json("classify", g("glide.cxc"), "--power-bound", "1")
    assert rep["result"]["kind"] == "InversionDetected" and rep["result"]["power"] == 1
    _, rep = run_json("classify", g("pendant.cxc"))
    assert rep["certificates"]["axis"] == ["a@0", "a@1"]


def test_parse_error_is_input_error(tmp_path):
    bad = tmp_path / "bad.cxc"
    bad.write_text("cxc 1 finite\ncube q : 0 1 2\n")
    code, rep = run_json("validate", bad)
    assert code == 2 and "2:1" in rep["result"]["error"]


def test_validate_reports_gluing_violation(tmp_path):
    bad = tmp_path / "bad.cxc"
    bad.write_text("cxc 1 finite\ncube a : 0 1 2 3\ncube b : 0 3 4 5\n")
    code, rep = run_json("validate", bad)
    assert code == 1 and "gluing" in rep["result"]["rules_violated"]


def test_gen_round_trip(tmp_path):
    out = tmp_path / "x.cxc"
    code, _ = run("gen", "expansion", "--seed", 4, "--param", "steps=6", "-o", out)
    assert code == 0
    first = out.read_text()
    run("gen", "expansion", "--seed", 4, "--param", "steps=6", "-o", out)
    assert out.read_text() == first
    assert run("validate", out)[0] == 0
    code, rep = run_json("gen", "periodic-glide", "--param", "power=2")
    assert "aut shift 2 perm ()" in rep["result"]["document"]


def test_usage_errors():
    assert run("bogus")[0] == 2
    assert run("validate")[0] == 2


def test_growth_cap_flag():
    code, rep = run_json("distance", g("line.cxc"), "a@0", "a@40", "--growth-cap", "10")
    assert code == 3
