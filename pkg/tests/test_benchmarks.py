import json
from decimal import Decimal
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import sympy_oracle as oracle
from atdm.benchmarks import (
    BENCHMARKS,
    POINT_TABLES,
    ErrorTable,
    L2Row,
    PointRow,
    absolute_error_table,
    best_beta_for_column,
    calibrate_N,
    from_csv,
    from_json,
    get_benchmark,
    l2_as_float_log10,
    l2_increment,
    l2_increment_table,
    load_fixture,
    lrpsm_comparison,
    reference_ae,
    to_csv,
    to_json,
)
from atdm.engine import solve
from atdm.errors import InsufficientComponents, NoCalibration
from atdm.specio import load_problem, problem_to_dict

from importlib import resources


@pytest.mark.parametrize("bid", list(BENCHMARKS))
def test_engine_agrees_with_sympy_oracle(bid):
    us, vs = oracle.components(bid, 6)
    sol = solve(BENCHMARKS[bid].spec, 6, beta=1)
    pt = {oracle.x: sp.Rational(7, 3), oracle.t: sp.Rational(3, 10)}
    for ref, comp in zip(us + vs, sol.u_components + sol.v_components):
        assert comp(7 / 3, 0.3, 1.0) == pytest.approx(float(ref.subs(pt)), rel=1e-12, abs=1e-14)


def test_increment_frozen_against_oracle():
    # sqrt|u_26(4, 0.1)| from the sympy iteration: 9.93030033539631e-24
    sol = solve(BENCHMARKS["EX1"].spec, 27, beta=1)
    got = l2_increment(sol, 25, 0.1, [4.0])
    assert abs(float(got) / 9.93030033539631e-24 - 1) < 1e-10


def test_increment_table_shape_and_ordering():
    table = l2_increment_table(BENCHMARKS["EX1"], [0.1, 0.5], [25, 50])
    assert table.l2(0.1, 50) < table.l2(0.1, 25) < table.l2(0.5, 25)
    assert l2_as_float_log10(table.l2(0.1, 50)) == pytest.approx(-52.8126, abs=1e-3)
    grid = l2_increment_table(BENCHMARKS["EX1"], [0.1], [25], norm="grid_l2")
    assert float(grid.l2(0.1, 25)) == pytest.approx(9.80794339121e-48, rel=1e-9)


def test_increment_errors():
    sol = solve(BENCHMARKS["EX1"].spec, 3, beta=1)
    with pytest.raises(InsufficientComponents):
        l2_increment(sol, 2, 0.1, [4.0])
    with pytest.raises(ValueError):
        l2_increment(sol, 0, 0.1, [1.0, 2.0])
    with pytest.raises(ValueError):
        l2_increment(sol, 0, 0.1, [1.0], norm="max")


@pytest.mark.parametrize("table_id,N", [("table2", 7), ("table4", 5), ("table5", 4)])
def test_calibrated_truncation_orders(table_id, N):
    cal = calibrate_N(BENCHMARKS[POINT_TABLES[table_id]], reference_ae(table_id, "ae_beta_1"))
    assert cal.N == N
    assert cal.deviation < 2e-8


def test_calibration_can_fail():
    with pytest.raises(NoCalibration):
        calibrate_N(BENCHMARKS["EX3"], [("u", 0.1, 0.5)], n_range=range(2, 4))


@pytest.mark.parametrize("table_id,N,tol", [("table2", 7, 3e-8), ("table4", 5, 3e-9),
                                             ("table5", 4, 3e-9)])
@pytest.mark.parametrize("beta", [0.97, 0.98])
def test_fractional_columns_reproduced(table_id, N, tol, beta):
    b = BENCHMARKS[POINT_TABLES[table_id]]
    refs = reference_ae(table_id, f"ae_beta_{beta}")
    table = absolute_error_table(b, [beta], sorted({t for _, t, _ in refs}), N)
    for var, t, ae in refs:
        row = next(r for r in table.column(var, beta) if r.t == t)
        assert abs(row.abs_error - ae) < tol


@pytest.mark.parametrize("table_id,var,want", [("table4", "u", 0.9), ("table4", "v", 0.9),
                                                ("table5", "u", 0.9), ("table2", "u", 0.9),
                                                ("table2", "v", 0.99)])
def test_column_labelled_099_identified(table_id, var, want):
    N = {"table2": 7, "table4": 5, "table5": 4}[table_id]
    refs = [(t, ae) for v, t, ae in reference_ae(table_id, "ae_beta_0.99") if v == var]
    beta, dev = best_beta_for_column(BENCHMARKS[POINT_TABLES[table_id]], N, var, refs,
                                     [0.9, 0.95, 0.99])
    assert beta == want
    assert dev < 2e-8


def test_lrpsm_table_proposed_columns_reproduced():
    table = lrpsm_comparison(BENCHMARKS["EX2"], N=5)
    fixture = load_fixture("table3")
    assert len(fixture) == 22
    for rec in fixture:
        for beta in (0.5, 0.7, 0.9):
            row = next(r for r in table.column(rec["variable"], beta)
                       if r.x == pytest.approx(float(rec["x"])))
            printed = float(rec[f"proposed_{beta}"])
            # rows from x = 0.3 on are printed to only 7-8 significant digits
            if float(rec["x"]) <= 0.2:
                assert abs(row.abs_error - printed) < 2e-10
            assert abs(row.abs_error - printed) < 1e-7 * printed
            assert row.reference == float(rec[f"lrpsm_{beta}"])


@pytest.mark.parametrize("bid", list(BENCHMARKS))
def test_shipped_problem_files_match_builtins(bid):
    path = resources.files("atdm.data").joinpath(f"{bid.lower()}.json")
    spec, raw = load_problem(path)
    assert problem_to_dict(spec) == problem_to_dict(BENCHMARKS[bid].spec)
    assert Fraction(raw["table_x"]) == BENCHMARKS[bid].table_x


def test_lookup_errors():
    with pytest.raises(KeyError):
        get_benchmark("ex9")
    with pytest.raises(KeyError):
        load_fixture("table9")
    with pytest.raises(ValueError):
        absolute_error_table(BENCHMARKS["EX1"], [1.0], [0.5], 3)
    assert get_benchmark("ex2") is BENCHMARKS["EX2"]


finite = st.floats(-1e3, 1e3, allow_nan=False)
point_rows = st.builds(PointRow, st.sampled_from(["u", "v"]), st.floats(0, 0.35),
                       st.sampled_from([0.5, 0.97, 1.0]), st.floats(0, 4), finite, finite,
                       st.none() | st.floats(0, 1))
l2_rows = st.builds(L2Row, st.sampled_from([0.1, 0.5]), st.integers(1, 500),
                    st.builds(lambda m, e: Decimal(f"{m}E{e}"),
                              st.integers(100000000, 999999999), st.integers(-800, -1)))


@given(st.lists(point_rows, max_size=5), st.lists(l2_rows, max_size=3))
def test_json_round_trip_is_exact(rows, l2):
    table = ErrorTable(tuple(rows), tuple(l2), {"k": 1})
    back = from_json(to_json(table))
    assert back.rows == table.rows and back.l2_rows == table.l2_rows
    assert back.metadata == {"k": 1}


@given(st.lists(point_rows, max_size=5), st.lists(l2_rows, max_size=3))
def test_csv_round_trip_to_ten_decimals(rows, l2):
    table = ErrorTable(tuple(rows), tuple(l2))
    back = from_csv(to_csv(table))
    assert len(back.rows) == len(rows)
    for a, b in zip(rows, back.rows):
        assert a.variable == b.variable
        for f in ("t", "beta", "x", "exact", "approx"):
            assert abs(getattr(a, f) - getattr(b, f)) <= 5.1e-11
    assert [r.l2_increment for r in back.l2_rows] == [r.l2_increment for r in l2]
    assert to_csv(back) == to_csv(from_csv(to_csv(back)))


def test_csv_rejects_unknown_header():
    with pytest.raises(ValueError):
        from_csv("a,b\n1,2\n")


def test_regenerated_point_table_serializes(tmp_path):
    table = absolute_error_table(BENCHMARKS["EX3"], [1.0], [0.1, 0.2], 4)
    p = tmp_path / "t.json"
    p.write_text(to_json(table))
    assert json.loads(p.read_text())["rows"][0]["variable"] == "u"
