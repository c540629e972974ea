from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from atdm.adomian import (
    DerivFactor,
    NonlinearitySpec,
    Product,
    adomian_oracle,
    adomian_poly,
    compositions,
)
from atdm.errors import InsufficientComponents
from atdm.fracseries import ZERO_SERIES, mul, sum_series

from conftest import series

comps = st.lists(series(max_terms=2), min_size=4, max_size=4)
factors = st.builds(DerivFactor, st.sampled_from(["u", "v"]), st.integers(0, 2), st.integers(0, 1))
products = st.builds(lambda fs, k: NonlinearitySpec((Product(k, fs),)),
                     st.lists(factors, min_size=2, max_size=3), st.integers(-3, 3).filter(bool))


@given(products, comps, comps, st.integers(0, 3))
def test_poly_matches_oracle(spec, uc, vc, n):
    assert adomian_poly(spec, uc, vc, n) == adomian_oracle(spec, uc, vc, n)


@given(products, comps, comps)
def test_grades_sum_to_full_nonlinearity(spec, uc, vc):
    k = len(spec.products[0].factors)
    pad = [ZERO_SERIES] * (3 * k + 1)
    total = sum_series(adomian_poly(spec, uc + pad, vc + pad, n) for n in range(3 * k + 1))
    assert total == spec.evaluate(sum_series(uc), sum_series(vc))


@given(st.integers(0, 6), st.integers(1, 4))
def test_composition_count(n, parts):
    got = list(compositions(n, parts))
    assert len(got) == comb(n + parts - 1, parts - 1)
    assert all(sum(c) == n for c in got)
    assert got == sorted(got)


@given(comps, comps)
def test_quadratic_first_polys(uc, vc):
    spec = NonlinearitySpec.product(DerivFactor("u"), DerivFactor("v", 1))
    vx = [DerivFactor("v", 1).apply(w) for w in vc]
    assert adomian_poly(spec, uc, vc, 0) == mul(uc[0], vx[0])
    assert adomian_poly(spec, uc, vc, 1) == mul(uc[0], vx[1]) + mul(uc[1], vx[0])


def test_errors():
    spec = NonlinearitySpec.product(DerivFactor("u"), DerivFactor("u"))
    with pytest.raises(InsufficientComponents):
        adomian_poly(spec, [ZERO_SERIES], [ZERO_SERIES], 1)
    with pytest.raises(ValueError):
        adomian_poly(spec, [ZERO_SERIES], [ZERO_SERIES], -1)
    with pytest.raises(ValueError):
        DerivFactor("w")
    with pytest.raises(ValueError):
        DerivFactor("u", 3)
    with pytest.raises(ValueError):
        Product(1, (DerivFactor("u"),))
