"""Fractional calculus on :class:`~atdm.fracseries.Series`.

Riemann-Liouville integral, Caputo derivative, and the Aboodh transform pair
``A[u](s) = (1/s) * integral_0^inf u(t) exp(-s t) dt``.  On the power-term
class used here ``A^{-1}[s**-mu * A[f]]`` is exactly the Riemann-Liouville
integral of order ``mu``; :func:`composite_fractional_integral` goes through
the transform domain so that equivalence can be checked directly.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    InvalidExponent,
    InvalidSPower,
    MissingInitialData,
    NonIntegerExponent,
)
from .fracseries import ZERO, Series, Term, collect
from .specfun import LinExp

BETA = LinExp(0, 1)
BETA_PLUS_ONE = LinExp(1, 1)


@dataclass(frozen=True)
class FracOrder:
    """Operator order ``mu`` with integer ceiling ``m``; only ``beta``
    (m = 1) and ``beta + 1`` (m = 2) are admitted."""

    mu: LinExp

    def __post_init__(self):
        if self.mu not in (BETA, BETA_PLUS_ONE):
            raise ValueError(f"unsupported fractional order {self.mu}; use beta or beta+1")

    @property
    def ceiling(self) -> int:
        return 1 if self.mu == BETA else 2

    @classmethod
    def beta(cls) -> "FracOrder":
        return cls(BETA)

    @classmethod
    def beta_plus_one(cls) -> "FracOrder":
        return cls(BETA_PLUS_ONE)

    def __str__(self) -> str:
        return str(self.mu)


def _mu(order) -> LinExp:
    if isinstance(order, FracOrder):
        return order.mu
    return LinExp.of(order)


def rl_integral_term(tm: Term, mu: LinExp) -> Term | None:
    g = tm.tpow
    return Term.make(tm.coeff, tm.xpow, g + mu,
                     tm.gnum + (g + 1,), tm.gden + (g + 1 + mu,))


def rl_integral(s: Series, order) -> Series:
    """``t**g -> Gamma(g+1)/Gamma(g+1+mu) * t**(g+mu)`` term by term."""
    mu = _mu(order)
    if mu.is_zero:
        return collect(s)
    return collect(Series(rl_integral_term(tm, mu) for tm in s.terms))


def caputo(s: Series, order: FracOrder) -> Series:
    """Caputo derivative of order ``beta`` or ``beta + 1`` in t.

    Integer powers below the ceiling are annihilated; everything else follows
    ``t**g -> Gamma(g+1)/Gamma(g+1-mu) * t**(g-mu)``.
    """
    if not isinstance(order, FracOrder):
        order = FracOrder(LinExp.of(order))
    mu, m = order.mu, order.ceiling
    out = []
    for tm in s.terms:
        g = tm.tpow
        if g.is_integer and g.a < m:
            continue
        new = g - mu
        if new.b == 0 and new.a < 0:
            raise InvalidExponent(
                f"Caputo derivative of order {mu} maps t^({g}) to t^({new})"
            )
        out.append(Term.make(tm.coeff, tm.xpow, new, tm.gnum + (g + 1,),
                             tm.gden + (new + 1,)))
    return collect(Series(out))


# -- Aboodh transform ----------------------------------------------------

@dataclass(frozen=True)
class TransformTerm:
    """``coeff * x**xpow * prod Gamma(num)/prod Gamma(den) / s**spow``."""

    coeff: Fraction
    xpow: int
    spow: LinExp
    gnum: tuple = ()
    gden: tuple = ()

    @property
    def key(self):
        return (self.xpow, self.spow, self.gnum, self.gden)

    def __str__(self) -> str:
        parts = [str(self.coeff)]
        if self.xpow:
            parts.append(f"x^{self.xpow}")
        if not self.spow.is_zero:
            parts.append(f"s^-({self.spow})")
        if self.gnum or self.gden:
            parts.append("G({})/G({})".format(",".join(map(str, self.gnum)),
                                              ",".join(map(str, self.gden))))
        return " * ".join(parts)


class TransformSeries:
    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[TransformTerm] = ()):
        acc: dict = defaultdict(Fraction)
        for tm in terms:
            if tm is not None:
                acc[tm.key] += tm.coeff
        items = [TransformTerm(c, *k) for k, c in acc.items() if c != 0]
        items.sort(key=lambda tm: (tm.xpow, tm.spow.a, tm.spow.b, tm.gnum, tm.gden))
        object.__setattr__(self, "terms", tuple(items))

    def __setattr__(self, name, value):
        raise AttributeError("TransformSeries is immutable")

    def __eq__(self, other):
        if not isinstance(other, TransformSeries):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "TransformSeries") -> "TransformSeries":
        return TransformSeries(self.terms + other.terms)

    def __neg__(self) -> "TransformSeries":
        return TransformSeries(TransformTerm(-tm.coeff, tm.xpow, tm.spow, tm.gnum, tm.gden)
                               for tm in self.terms)

    def __sub__(self, other: "TransformSeries") -> "TransformSeries":
        return self + (-other)

    def times_s_power(self, k) -> "TransformSeries":
        """Multiply by ``s**k``."""
        k = LinExp.of(k)
        return TransformSeries(TransformTerm(tm.coeff, tm.xpow, tm.spow - k, tm.gnum, tm.gden)
                               for tm in self.terms)

    def __repr__(self) -> str:
        return f"TransformSeries({str(self)!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(tm) for tm in self.terms)

    def eval(self, x: float, s: float, beta: float) -> float:
        from .specfun import gamma_ratio

        total = []
        for tm in self.terms:
            v = float(tm.coeff) * (x**tm.xpow if tm.xpow else 1.0)
            v *= s ** (-tm.spow.value(beta))
            if tm.gnum or tm.gden:
                v *= gamma_ratio(tm.gnum, tm.gden, beta)
            total.append(v)
        return math.fsum(total)


def aboodh(s: Series, generalized: bool = False) -> TransformSeries:
    """Aboodh transform term by term: ``t**n -> n! / s**(n+2)``.

    With ``generalized=True`` fractional powers map by
    ``t**g -> Gamma(g+1) / s**(g+2)``; otherwise they raise.
    """
    out = []
    for tm in s.terms:
        g = tm.tpow
        if g.is_integer and g.a >= 0:
            n = int(g.a)
            out.append(TransformTerm(tm.coeff * math.factorial(n), tm.xpow, g + 2,
                                     tm.gnum, tm.gden))
        elif generalized and g.positive_on_unit():
            t = Term.make(tm.coeff, tm.xpow, ZERO, tm.gnum + (g + 1,), tm.gden)
            out.append(TransformTerm(t.coeff, t.xpow, g + 2, t.gnum, t.gden))
        else:
            raise NonIntegerExponent(f"forward transform of t^({g}) is not supported")
    return TransformSeries(out)


def aboodh_inverse(ts: TransformSeries) -> Series:
    """``1/s**p -> t**(p-2) / Gamma(p-1)`` for ``p >= 2`` on (0, 1]."""
    out = []
    for tm in ts.terms:
        p = tm.spow
        if p.a < 2 or p.a + p.b < 2:
            raise InvalidSPower(f"s-power {p} is below 2 somewhere on (0, 1]")
        g = p - 2
        out.append(Term.make(tm.coeff, tm.xpow, g, tm.gnum, tm.gden + (g + 1,)))
    return collect(Series(out))


def aboodh_derivative_rule(n: int, u_initial: Sequence[Series],
                           U: TransformSeries) -> TransformSeries:
    """Transform of the n-th t-derivative:
    ``s**n U(s) - sum_{j<n} u^{(j)}(0) / s**(2 - n + j)``."""
    if n < 1:
        raise ValueError("derivative order must be at least 1")
    if len(u_initial) < n:
        raise MissingInitialData(f"need {n} initial series, got {len(u_initial)}")
    result = U.times_s_power(n)
    for j in range(n):
        init = u_initial[j]
        if not init.is_t_free:
            raise ValueError("initial data must not depend on t")
        p = LinExp(2 - n + j, 0)
        result = result - TransformSeries(
            TransformTerm(tm.coeff, tm.xpow, p) for tm in init.terms
        )
    return result


def composite_fractional_integral(s: Series, order) -> Series:
    """``A^{-1}[ s**-mu * A[s] ]``; equals :func:`rl_integral` on this class."""
    mu = _mu(order)
    image = aboodh(s, generalized=True)
    return aboodh_inverse(image.times_s_power(-mu))
