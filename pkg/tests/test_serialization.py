import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from instances import nlp_instances
from so2calc.catalog import box, example_theta, orthant_product
from so2calc.chain_rules import PointData, linear_map
from so2calc.plq import Indicator
from so2calc.polyhedra import Polyhedron
from so2calc.second_order import PolyUnion
from so2calc.serialization import (
    ParseError,
    Report,
    dec_inner,
    dec_mat,
    dec_polyhedron,
    dec_problem,
    dec_q,
    dec_theta,
    dec_union,
    dec_verdict,
    dec_vec,
    enc_inner,
    enc_polyhedron,
    enc_problem,
    enc_theta,
    enc_union,
    enc_vec,
    enc_verdict,
    load_json_text,
)
from so2calc.tilt import tilt_verdict_composite, tilt_verdict_nlp

rationals = st.fractions(max_denominator=50)


@given(st.lists(rationals, max_size=6))
def test_vector_round_trip(v):
    assert dec_vec(enc_vec(v), "v") == tuple(v)


def test_rational_inputs():
    assert dec_q("-3/9", "q") == Fraction(-1, 3)
    assert dec_q(4, "q") == 4
    for bad in (0.5, True, "x", None, "1/0"):
        with pytest.raises(ParseError):
            dec_q(bad, "q")


def test_ragged_matrix():
    with pytest.raises(ParseError, match="different lengths"):
        dec_mat([["1", "2"], ["3"]], "M")


def test_polyhedron_round_trip():
    P = box(3)
    assert dec_polyhedron(enc_polyhedron(P), "P").equals(P)
    assert dec_polyhedron(enc_polyhedron(P, generators=True), "P").equals(P)
    V = dec_polyhedron({"dim": 2, "vertices": [["0", "0"]], "rays": [["1", "0"]]}, "P")
    assert V.equals(Polyhedron(2, [((-1, 0), 0)], [((0, 1), 0)]))
    with pytest.raises(ParseError):
        dec_polyhedron({"dim": 2}, "P")
    with pytest.raises(ParseError):
        dec_polyhedron({"dim": 2, "ineqs": [[["1"], "0"]]}, "P")


def test_theta_round_trip():
    for theta in (example_theta(), Indicator(orthant_product(2, 1))):
        back = dec_theta(enc_theta(theta))
        assert type(back) is type(theta)
        assert back.domain().equals(theta.domain())
    with pytest.raises(ParseError, match="unknown function type"):
        dec_theta({"type": "norm"})


def test_inner_round_trip():
    h = linear_map([[1, 2], [0, 1]])
    back = dec_inner(enc_inner(h), "inner")
    assert back.jacobian((0, 0)) == h.jacobian((0, 0))
    pd = PointData((1,), (2,), ((3,),), (((4,),),))
    back = dec_inner(enc_inner(pd), "inner")
    assert back.values == (2,) and back.jac == ((3,),)


@pytest.mark.parametrize("name,spec", nlp_instances(), ids=[n for n, _ in nlp_instances()])
def test_problem_round_trip(name, spec):
    back = dec_problem(json.loads(json.dumps(enc_problem(spec))))
    assert tilt_verdict_nlp(back).certificate() == tilt_verdict_nlp(spec).certificate()


def test_union_round_trip():
    U = PolyUnion(2, [Polyhedron.nonnegative_orthant(2), Polyhedron(2, [], [((1, 1), 0)])])
    assert dec_union(enc_union(U)).equals(U)


def test_verdict_round_trip():
    spec = dict(nlp_instances())["saddle diag(1,-1), x1 <= 0"]
    v = tilt_verdict_composite(spec)
    back = dec_verdict(json.loads(json.dumps(enc_verdict(v))))
    assert back.certificate() == v.certificate()
    assert back.value_witness == v.value_witness


def test_report_is_deterministic_and_round_trips():
    r = Report("repro", "pass", {"b": 1, "a": [1, 2]}, {"checks": {"x": True}}, ["line"])
    text = r.dumps()
    assert text == Report.loads(text).dumps()
    assert text.index('"command"') < text.index('"inputs"') < text.index('"status"')
    assert "timings" not in json.loads(text)


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as info:
        load_json_text('{\n  "a": 1,\n  "b": \n}', "f.json")
    assert info.value.line == 4 and "f.json" in str(info.value)


def test_problem_errors_carry_the_path():
    with pytest.raises(ParseError, match=r"problem\.kind"):
        dec_problem({"kind": "qp"})
