import io
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedgeo.algebra import Chart
from gradedgeo.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run_command
from gradedgeo.errors import ManifestError, ParseError, ResolutionError
from gradedgeo.manifest import fixture_names, fixture_path, load_document, load_manifest
from gradedgeo.parser import format_series, parse_expression

from generators import random_chart, random_series

U = Chart("U", [("t", (0, 0)), ("z", (1, 1)), ("theta1", (0, 1)), ("theta2", (1, 0))], 2, 6)
t, z, th1, th2 = (U.coordinate(c) for c in ("t", "z", "theta1", "theta2"))


# parser ---------------------------------------------------------------------

def test_parse_examples():
    f = parse_expression("t + theta1*theta2", U)
    assert f == t + th1 * th2
    assert set(f.terms) == {(0, 0, 0), (0, 1, 1)}
    assert parse_expression("theta1*theta1", U) == U.zero()
    assert parse_expression("theta1*z", U) == -(z * th1)
    assert parse_expression("theta2*theta1", U) == parse_expression("theta1*theta2", U)


def test_precedence_and_numbers():
    assert parse_expression("2*t^2 - -3", U) == 2 * t * t + 3
    assert parse_expression("(1 + z)^2", U) == 1 + 2 * z + z * z
    assert parse_expression("1.5e1*t", U) == 15 * t
    assert parse_expression("t/2", U) == t / 2
    assert parse_expression("(1+z*z)^-1 * (1+z^2)", U) == U.one()


def test_parse_errors_carry_positions():
    with pytest.raises(ResolutionError) as e:
        parse_expression("t + q", U)
    assert e.value.position == 4
    with pytest.raises(ParseError) as e:
        parse_expression("t +* z", U)
    assert e.value.position == 3
    with pytest.raises(ParseError):
        parse_expression("t^1.5", U)
    with pytest.raises(ParseError):
        parse_expression("", U)
    with pytest.raises(ParseError):
        parse_expression("1/theta1", U)
    with pytest.raises(ResolutionError):
        parse_expression("frob(t)", U)


def test_function_calls_round_trip():
    V = Chart("V", [("x", (0, 0)), ("z", (1, 1))], 2, 4, {"x": (0.5, 2.0)})
    for text in ("sin(x) + cos(x)*z", "atan2(x, 1 + x^2) + pi", "1/(1 + x^2) * z^2", "exp(x)*z + exp(x + z*z)"):
        f = parse_expression(text, V)
        assert parse_expression(format_series(f), V) == f


@given(st.integers(0, 10**9))
def test_print_parse_round_trip(seed):
    rng = random.Random(seed)
    ch = random_chart(rng, rng.choice([1, 2, 3]), rng.randint(1, 4), nbase=rng.randint(0, 2), T=4)
    f = random_series(rng, ch)
    assert parse_expression(format_series(f), ch) == f


# manifests ------------------------------------------------------------------

def _doc(name):
    return json.loads(fixture_path(name).read_text())


def test_fixtures_load():
    assert {"circle_z22.json", "susy.json", "broken.json"} <= set(fixture_names())
    c = load_manifest("circle_z22.json")
    assert sorted(c.charts) == ["U1", "U2"]
    phi = c.atlas.transition("U1", "U2")
    for name in ("z", "eta", "chi"):
        assert phi.images[name] == phi.source.coordinate(name)
    s = load_manifest("susy.json")
    assert s.law.name == "susy_z22" and s.bundle is not None and s.section is not None
    assert load_manifest("susy.json", truncation=3).truncation == 3


def test_dangling_reference():
    doc = _doc("circle_z22.json")
    doc["overlaps"][0]["pair"] = ["U1", "U9"]
    with pytest.raises(ManifestError) as e:
        load_document(doc)
    assert "U9" in str(e.value) and e.value.path.startswith("$.overlaps[0]")


def test_schema_violation_names_path():
    doc = _doc("circle_z22.json")
    doc["charts"][1]["coordinates"][0] = ["theta2", [0, 2]]
    with pytest.raises(ManifestError) as e:
        load_document(doc)
    assert e.value.path.startswith("$.charts[1]")


def test_bad_expression_in_manifest():
    doc = _doc("circle_z22.json")
    doc["overlaps"][0]["images"]["z"] = "z + nonsense"
    with pytest.raises(ManifestError) as e:
        load_document(doc)
    assert "nonsense" in str(e.value)


def test_missing_file():
    with pytest.raises(ManifestError):
        load_manifest("/nowhere/else.json")


# CLI ------------------------------------------------------------------------

def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_cli_circle_and_susy():
    assert _run("check-cocycle", "circle_z22.json")[0] == EXIT_OK
    assert _run("check-atlas", "circle_z22.json")[0] == EXIT_OK
    assert _run("check-group", "susy.json", "--truncation", "4")[0] == EXIT_OK
    assert _run("check-action", "susy.json", "--freeness")[0] == EXIT_OK
    assert _run("trivialize", "susy.json")[0] == EXIT_OK


def test_cli_broken_fixture_names_triple():
    code, out, _ = _run("check-cocycle", "broken.json", "--json")
    assert code == EXIT_FAIL
    rep = json.loads(out)
    wheres = {tuple(f["where"]) for r in rep["reports"] for f in r["failures"] if f["check"] == "triple"}
    assert ("U1", "U2", "U3") in wheres
    code, out, _ = _run("check-cocycle", "broken.json")
    assert code == EXIT_FAIL and "triple [U1,U2,U3]" in out


def test_cli_usage_errors():
    assert _run()[0] == EXIT_USAGE
    assert _run("check-atlas")[0] == EXIT_USAGE
    assert _run("check-atlas", "missing-file.json")[0] == EXIT_USAGE
    assert _run("check-group", "circle_z22.json")[0] == EXIT_USAGE
    assert _run("check-atlas", "circle_z22.json", "--samples", "0")[0] == EXIT_USAGE


def test_cli_eval_and_weight():
    code, out, _ = _run("eval", "xi2*xi1", "--chart", "U1", "--manifest", "susy.json")
    assert code == EXIT_OK
    code, out, _ = _run("eval", "xi1*z", "--chart", "U1", "--manifest", "susy.json", "--json")
    assert json.loads(out)["series"] == "-z*xi1"
    code, out, _ = _run("weight", "x + xi1", "--chart", "U1", "--manifest", "susy.json")
    assert code == EXIT_OK and out.strip() == "weight 1"
    code, out, _ = _run("weight", "x + x*xi1", "--chart", "U1", "--manifest", "susy.json")
    assert code == EXIT_FAIL and out.strip() == "not homogeneous"
    code, out, _ = _run("weight", "x^2*xi1", "--chart", "U1", "--manifest", "susy.json", "--coordinates", "xi1")
    assert out.strip() == "weight 1"
    assert _run("eval", "q", "--chart", "U1", "--manifest", "susy.json")[0] == EXIT_USAGE


def test_cli_constructions_round_trip(tmp_path):
    for cmd, src in (("glue", "susy.json"), ("build-tangent", "susy.json"), ("build-frame", "susy.json")):
        target = tmp_path / f"{cmd}.json"
        code, _, _ = _run(cmd, src, "--truncation", "4", "-o", str(target))
        assert code == EXIT_OK, cmd
        follow = "check-atlas" if cmd == "glue" else "check-cocycle"
        assert _run(follow, str(target), "--truncation", "4")[0] == EXIT_OK, cmd


def test_cli_associated_glue(tmp_path):
    doc = _doc("susy.json")
    doc["group"] = {"builtin": "gl", "r": 1, "q": [1, 0, 0]}
    doc.pop("bundle_transitions")
    doc.pop("section")
    doc["action"] = {"builtin": "linear"}
    U = [c["name"] for c in doc["charts"]]
    doc["bundle_transitions"] = [{"pair": [a, b], "matrix": [["1", "0"], ["0", "1"]]}
                                 for a in U for b in U if a != b]
    p = tmp_path / "gl.json"
    p.write_text(json.dumps(doc))
    assert _run("glue", str(p), "--associated", "--truncation", "4")[0] == EXIT_OK


def test_cli_trivialize_rejection(tmp_path):
    doc = _doc("susy.json")
    doc["section"]["U2"]["t"] = doc["section"]["U2"]["t"] + " + 1"
    p = tmp_path / "bad_section.json"
    p.write_text(json.dumps(doc))
    code, out, _ = _run("trivialize", str(p), "--json")
    assert code == EXIT_FAIL
    payload = json.loads(out)
    assert payload["witness"] == ["U1", "U2"]


def test_cli_json_is_deterministic():
    a = _run("check-cocycle", "susy.json", "--json", "--truncation", "4")[1]
    b = _run("check-cocycle", "susy.json", "--json", "--truncation", "4")[1]
    assert a == b and json.loads(a)["ok"]
