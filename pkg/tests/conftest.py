from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from atdm.fracseries import Series, Term, collect, random_samples
from atdm.specfun import LinExp

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

coeffs = st.builds(Fraction, st.integers(-9, 9).filter(bool), st.integers(1, 6))
tpows = st.builds(LinExp, st.integers(0, 3), st.integers(0, 2))


@st.composite
def terms(draw, max_xpow: int = 3):
    tpow = draw(tpows)
    gden = (tpow + 1,) if not tpow.is_integer and draw(st.booleans()) else ()
    return Term.make(draw(coeffs), draw(st.integers(0, max_xpow)), tpow, (), gden)


@st.composite
def series(draw, max_terms: int = 3, max_xpow: int = 3):
    return collect(Series(draw(st.lists(terms(max_xpow), min_size=0, max_size=max_terms))))


@st.composite
def poly_t(draw, max_terms: int = 3):
    """Series with integer t-powers only (Aboodh transformable without extension)."""
    ts = draw(st.lists(st.tuples(coeffs, st.integers(0, 3), st.integers(0, 4)),
                       min_size=1, max_size=max_terms))
    return collect(Series(Term.make(c, m, LinExp(n, 0)) for c, m, n in ts))


@pytest.fixture(scope="session")
def samples():
    return random_samples(16, np.random.default_rng(7), x_range=(0.5, 2.0),
                          t_range=(0.05, 1.0), beta_range=(0.1, 1.0))
