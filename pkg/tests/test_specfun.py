import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from atdm.errors import NoConvergence, NonPositiveGammaArgument
from atdm.specfun import LinExp, gamma_ratio, log_gamma_ratio, mittag_leffler

from conftest import tpows

betas = st.floats(0.05, 1.0)
small = st.integers(-3, 6)


def test_gamma_ratio_integer_values():
    assert gamma_ratio([LinExp(5)], [LinExp(3)], 1.0) == pytest.approx(12.0)
    assert gamma_ratio([LinExp(1, 1)], [], 1.0) == pytest.approx(1.0)
    assert gamma_ratio([], [LinExp(1, 2)], 0.5) == pytest.approx(1.0)


@given(tpows, tpows, betas)
def test_gamma_ratio_matches_mpmath(p, q, beta):
    p, q = p + 1, q + 1
    want = mpmath.gamma(p.value(beta)) / mpmath.gamma(q.value(beta))
    assert gamma_ratio([p], [q], beta) == pytest.approx(float(want), rel=1e-12)


@given(tpows, betas)
def test_gamma_recurrence(g, beta):
    g = g + 1
    assert gamma_ratio([g + 1], [g], beta) == pytest.approx(g.value(beta), rel=1e-12)


@given(tpows, tpows, betas)
def test_log_ratio_antisymmetric(p, q, beta):
    p, q = p + 1, q + 1
    assert log_gamma_ratio([p], [q], beta) == pytest.approx(-log_gamma_ratio([q], [p], beta),
                                                            abs=1e-10)


def test_gamma_ratio_large_arguments():
    got = gamma_ratio([LinExp(150, Fraction(1, 2))], [LinExp(149, 1)], 0.3)
    want = mpmath.gamma(150.15) / mpmath.gamma(149.3)
    assert got == pytest.approx(float(want), rel=1e-11)


def test_gamma_ratio_rejects_nonpositive():
    with pytest.raises(NonPositiveGammaArgument):
        gamma_ratio([LinExp(-1, 1)], [], 0.5)


@given(small, small, st.integers(-4, 4), st.integers(1, 5))
def test_linexp_text_round_trip(a, b, p, q):
    e = LinExp(Fraction(a, 1), Fraction(p, q))
    assert LinExp.parse(str(e)) == e
    assert hash(LinExp.parse(str(e))) == hash(e)


def test_linexp_positivity():
    assert LinExp(0, 1).positive_on_unit()
    assert not LinExp(-1, 1).positive_on_unit()
    assert LinExp(1, -1).nonnegative_on_unit()


@given(st.floats(-20, 20))
def test_mittag_leffler_one_is_exp(x):
    # the stopping rule bounds the absolute tail (default tol 1e-15)
    assert mittag_leffler(1.0, x) == pytest.approx(math.exp(x), rel=1e-12, abs=1e-14)


@given(st.floats(0, 30))
def test_mittag_leffler_two_is_cosh(x):
    assert mittag_leffler(2.0, x) == pytest.approx(math.cosh(math.sqrt(x)), rel=1e-12)


def test_mittag_leffler_half_frozen():
    # E_{1/2}(z) = exp(z^2) erfc(-z); frozen from mpmath
    assert mittag_leffler(0.5, 1.0) == pytest.approx(5.0089800807622834, rel=1e-13)
    assert mittag_leffler(0.5, -1.0) == pytest.approx(0.42758357615580705, rel=1e-12)
    assert mittag_leffler(0.5, -5.0) == pytest.approx(0.11070463773306863, rel=1e-12)


def test_mittag_leffler_errors():
    with pytest.raises(NoConvergence):
        mittag_leffler(0.1, 50.0, max_terms=20)
    with pytest.raises(ValueError):
        mittag_leffler(0.0, 1.0)
