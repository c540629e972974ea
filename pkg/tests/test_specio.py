import json

import pytest
from hypothesis import given

from atdm.benchmarks import BENCHMARKS
from atdm.engine import solve
from atdm.errors import SpecParseError
from atdm.specio import (
    dump_problem,
    load_problem,
    problem_from_dict,
    problem_to_dict,
    series_from_json,
    series_to_json,
)

from conftest import series


@given(series())
def test_series_json_round_trip(s):
    assert series_from_json(series_to_json(s)) == s
    assert series_from_json(str(s)) == s


@pytest.mark.parametrize("bid", list(BENCHMARKS))
def test_problem_round_trip(bid, tmp_path):
    spec = BENCHMARKS[bid].spec
    path = tmp_path / "p.json"
    path.write_text(dump_problem(spec, note="x"))
    back, raw = load_problem(path)
    assert raw["note"] == "x"
    assert problem_to_dict(back) == problem_to_dict(spec)
    assert solve(back, 3).u_components == solve(spec, 3).u_components


def test_term_object_form():
    s = series_from_json([{"coeff": "3/2", "xpow": 2, "tpow": "1+1*B",
                           "gnum": ["3"], "gden": [{"a": "2", "b": "1"}]}])
    assert str(s) == "3 * x^2 * t^(1+1*B) * G()/G(2+1*B)"


@pytest.mark.parametrize("bad", [
    "not json",
    json.dumps([1, 2]),
    json.dumps({"f0": [{"xpow": 1}]}),
    json.dumps({"f0": [{"coeff": 1.5}]}),
    json.dumps({"f0": [{"coeff": "1", "xpow": "2"}]}),
    json.dumps({"f0": [{"coeff": "1", "tpow": "1+Q"}]}),
    json.dumps({"linear_u": [{"coeff": "1"}]}),
    json.dumps({"linear_u": [{"var": "u", "singular_form": "curl"}]}),
    json.dumps({"nonlinear_u": {"products": [{"factors": [{"var": "w"}, {"var": "u"}]}]}}),
    json.dumps({"nonlinear_u": {"outer": "sin", "products": []}}),
    json.dumps({"source_placement": "elsewhere"}),
    json.dumps({"f0": "1 * x^2 * t^(1)"}),
])
def test_malformed_problems_rejected(bad, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(bad)
    with pytest.raises(SpecParseError):
        load_problem(path)


def test_defaults():
    spec = problem_from_dict({})
    assert spec.is_linear and spec.source_placement == "in_w1"
