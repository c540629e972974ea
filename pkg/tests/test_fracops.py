from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from atdm.errors import InvalidSPower, MissingInitialData, NonIntegerExponent
from atdm.fracops import (
    FracOrder,
    TransformSeries,
    TransformTerm,
    aboodh,
    aboodh_derivative_rule,
    aboodh_inverse,
    caputo,
    composite_fractional_integral,
    rl_integral,
)
from atdm.fracseries import Series, Term, collect, diff_t, equal_numeric
from atdm.specfun import LinExp

from conftest import poly_t, series

orders = st.sampled_from([FracOrder.beta(), FracOrder.beta_plus_one()])
mus = st.builds(LinExp, st.builds(Fraction, st.integers(0, 4), st.integers(1, 3)),
                st.integers(0, 2)).filter(lambda m: not m.is_zero)


def at_zero(s: Series) -> Series:
    return collect(Series(tm for tm in s.terms if tm.tpow.is_zero))


@given(series(), mus, mus)
def test_integral_semigroup(s, m1, m2):
    assert rl_integral(rl_integral(s, m1), m2) == rl_integral(s, m1 + m2)


@given(series(), orders)
def test_caputo_inverts_integral(s, order):
    assert caputo(rl_integral(s, order), order) == s


@given(series(), mus)
def test_composite_route_equals_direct_integral(s, mu):
    assert composite_fractional_integral(s, mu) == rl_integral(s, mu)


@given(series())
def test_caputo_order_one_is_derivative(s):
    # beta = 1 turns the order-beta Caputo derivative into d/dt
    from atdm.fracseries import substitute_beta

    lhs = substitute_beta(caputo(s, FracOrder.beta()), 1)
    assert lhs == substitute_beta(diff_t(s), 1)


@given(poly_t())
def test_aboodh_round_trip(s):
    assert aboodh_inverse(aboodh(s)) == s


@given(series())
def test_generalized_aboodh_round_trip(s):
    assert aboodh_inverse(aboodh(s, generalized=True)) == s


@given(poly_t())
def test_derivative_rule_first_order(s):
    lhs = aboodh(diff_t(s))
    rhs = aboodh_derivative_rule(1, [at_zero(s)], aboodh(s))
    assert lhs == rhs


@given(poly_t())
def test_derivative_rule_second_order(s):
    ds = diff_t(s)
    lhs = aboodh(diff_t(ds))
    rhs = aboodh_derivative_rule(2, [at_zero(s), at_zero(ds)], aboodh(s))
    assert lhs == rhs


def test_aboodh_of_monomials():
    t3 = Series.monomial(1, 0, LinExp(3))
    assert aboodh(t3) == TransformSeries([TransformTerm(Fraction(6), 0, LinExp(5))])
    assert aboodh(Series.const(1)).eval(1.0, 2.0, 1.0) == pytest.approx(0.25)


def test_aboodh_rejects_fractional_without_extension():
    with pytest.raises(NonIntegerExponent):
        aboodh(Series.monomial(1, 0, LinExp(0, 1)))


def test_inverse_rejects_small_s_powers():
    with pytest.raises(InvalidSPower):
        aboodh_inverse(TransformSeries([TransformTerm(Fraction(1), 0, LinExp(1))]))
    with pytest.raises(InvalidSPower):
        aboodh_inverse(TransformSeries([TransformTerm(Fraction(1), 0, LinExp(3, -2))]))


def test_derivative_rule_needs_initial_data():
    with pytest.raises(MissingInitialData):
        aboodh_derivative_rule(2, [Series.const(1)], aboodh(Series.const(1)))
    with pytest.raises(ValueError):
        aboodh_derivative_rule(0, [], aboodh(Series.const(1)))


def test_only_beta_orders_admitted():
    with pytest.raises(ValueError):
        FracOrder(LinExp(2, 1))
    assert FracOrder.beta_plus_one().ceiling == 2


def test_caputo_annihilates_low_integer_powers(samples):
    s = Series.const(3) + Series.monomial(2, 1, LinExp(1))
    assert not caputo(s, FracOrder.beta_plus_one())
    assert not caputo(Series.const(5), FracOrder.beta())
    # t -> t^(1-beta) / Gamma(2-beta)
    want = Series([Term.make(1, 0, LinExp(1, -1), (), (LinExp(2, -1),))])
    assert equal_numeric(caputo(Series.monomial(1, 0, LinExp(1)), FracOrder.beta()), want,
                         [(x, t, b) for x, t, b in samples if b < 1], 1e-12)
