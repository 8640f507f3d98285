import json
import random

import pytest

from fnforms import Chart, ChartMismatch, DegreeError, NotIdempotent, ParseError, load_bundle, load_connection, parse_form, render_form
from fnforms.io import connection_to_dict, parse_vector_form
from fnforms.sampling import random_form, random_vector_form

C = Chart(("x", "y", "z"))


@pytest.mark.parametrize(
    "text",
    [
        "(x y - 1)",
        "(1) z",
        "(1/2 x^2) x + (-3) z",
        "(1) x^y (*) d/z + (2 x) y^z (*) d/x",
        "(1) (*) d/y",
    ],
)
def test_form_text_roundtrip(text):
    assert render_form(parse_form(C, text)) == text


def test_unsorted_indices_resolve_sign():
    assert parse_form(C, "(1) y^x") == parse_form(C, "(-1) x^y")


def test_zero_needs_degree():
    with pytest.raises(ParseError):
        parse_form(C, "0")
    z = parse_vector_form(C, "2:0")
    assert z.is_zero() and z.degree == 2


@pytest.mark.parametrize(
    "bad,err",
    [
        ("(x) x^x", ParseError),
        ("(q)", ParseError),
        ("(x", ParseError),
        ("(x) x + (1) x^y", DegreeError),
        ("(1) x + (1) x (*) d/y", ParseError),
        ("x dy", ParseError),
    ],
)
def test_form_parse_errors(bad, err):
    with pytest.raises(err):
        parse_form(C, bad)


def test_random_roundtrip():
    rng = random.Random(4)
    for k in range(4):
        w = random_form(rng, C, k)
        K = random_vector_form(rng, C, k)
        if not w.is_zero():
            assert parse_form(C, render_form(w)) == w
        if not K.is_zero():
            assert parse_form(C, render_form(K)) == K


def test_load_connection(conn_a_path, conn_a):
    c = load_connection(conn_a_path)
    assert c.phi == conn_a.phi
    assert connection_to_dict(c) == json.loads(conn_a_path.read_text())


@pytest.mark.parametrize(
    "payload,err",
    [
        ("{", ParseError),
        ("[]", ParseError),
        ('{"coords": ["x"]}', ParseError),
        ('{"dim": 2, "coords": ["x"], "phi": [["0"]]}', ParseError),
        ('{"coords": ["x", "y"], "phi": [["0"]]}', ParseError),
        ('{"coords": ["x", "y"], "phi": [["1", "0"], ["0", "q"]]}', ParseError),
        ('{"coords": ["x", "y"], "phi": [["1", "0"], ["0", "2"]]}', NotIdempotent),
    ],
)
def test_bad_connection_specs(tmp_path, payload, err):
    p = tmp_path / "c.json"
    p.write_text(payload)
    with pytest.raises(err):
        load_connection(p)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_connection(tmp_path / "nope.json")


def test_load_bundle(tmp_path):
    p = tmp_path / "b.json"
    p.write_text(json.dumps({"base_coords": ["x", "y"], "fiber_coords": ["z"], "gamma": [["0", "x"]]}))
    pb = load_bundle(p)
    assert pb.m == 2 and pb.s == 1
    p.write_text(json.dumps({"base_coords": ["x", "y"], "fiber_coords": ["y"], "gamma": [["0", "x"]]}))
    with pytest.raises(ChartMismatch):
        load_bundle(p)
    p.write_text(json.dumps({"base_coords": ["x", "y"], "fiber_coords": ["z"], "gamma": [["0"]]}))
    with pytest.raises(ParseError):
        load_bundle(p)
