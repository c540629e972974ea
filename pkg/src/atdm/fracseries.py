"""Sparse sums of generalized power terms.

A term is ``coeff * x**m * t**(a + b*beta) * prod Gamma(num) / prod Gamma(den)``
with an exact rational coefficient.  Sums of such terms are closed under
addition, multiplication, x- and t-differentiation, and (see :mod:`atdm.fracops`)
fractional integration, so every component of the decomposition stays exact
and generic in beta.
"""
from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import NonPositiveGammaArgument, SingularEvaluation, SpecParseError
from .specfun import LinExp, _frac, gamma_ratio, log_gamma_ratio

GammaArgs = tuple  # sorted tuple of LinExp

ONE = LinExp(1, 0)
ZERO = LinExp(0, 0)


def _normalize_gammas(coeff: Fraction, gnum: Iterable, gden: Iterable):
    """Cancel shared arguments and fold integer-argument Gammas into coeff."""
    num = [LinExp.of(g) for g in gnum]
    den = [LinExp.of(g) for g in gden]
    kept_num = []
    for g in num:
        if g.is_integer:
            if g.a <= 0:
                raise NonPositiveGammaArgument(f"Gamma({g}) has a pole")
            coeff *= math.factorial(int(g.a) - 1)
            continue
        kept_num.append(g)
    kept_den = []
    for g in den:
        if g.is_integer:
            if g.a <= 0:
                raise NonPositiveGammaArgument(f"Gamma({g}) has a pole")
            coeff /= math.factorial(int(g.a) - 1)
            continue
        kept_den.append(g)

    # constant rational arguments are shifted into (0, 1]:
    # Gamma(r + n) = Gamma(r) * r (r+1) ... (r+n-1)
    for lst, sign in ((kept_num, 1), (kept_den, -1)):
        for i, g in enumerate(lst):
            if g.is_constant and g.a > 1:
                r, rising = _shift_down(g.a)
                coeff = coeff * rising if sign > 0 else coeff / rising
                lst[i] = LinExp(r, 0)

    remaining = list(kept_den)
    out_num = []
    for g in kept_num:
        try:
            remaining.remove(g)
        except ValueError:
            out_num.append(g)
    for g in out_num + remaining:
        if g.is_constant:
            if g.a <= 0:
                raise NonPositiveGammaArgument(f"Gamma({g}) has a non-positive argument")
        elif not g.positive_on_unit():
            raise NonPositiveGammaArgument(
                f"Gamma({g}) is not positive for every beta in (0, 1]"
            )
    return coeff, tuple(sorted(out_num)), tuple(sorted(remaining))


def _shift_down(a: Fraction) -> tuple[Fraction, Fraction]:
    """``(r, rising)`` with ``r`` in (0, 1] and ``Gamma(a) = Gamma(r) * rising``."""
    n = math.ceil(a) - 1
    r = a - n
    rising = Fraction(1)
    for i in range(n):
        rising *= r + i
    return r, rising


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    xpow: int = 0
    tpow: LinExp = ZERO
    gnum: GammaArgs = ()
    gden: GammaArgs = ()

    @classmethod
    def make(cls, coeff, xpow: int = 0, tpow=ZERO, gnum=(), gden=()) -> "Term | None":
        """Build a normalized term; returns None for a zero coefficient."""
        coeff = _frac(coeff)
        if coeff == 0:
            return None
        coeff, num, den = _normalize_gammas(coeff, gnum, gden)
        return cls(coeff, int(xpow), LinExp.of(tpow), num, den)

    @cached_property
    def key(self):
        return (self.xpow, self.tpow, self.gnum, self.gden)

    def sort_key(self):
        return (self.xpow, self.tpow.a, self.tpow.b, self.gnum, self.gden)

    def log_abs(self, x: float, t: float, beta: float) -> tuple[int, float]:
        """Sign and log-magnitude of the term value; (0, -inf) if it vanishes."""
        sign = 1 if self.coeff > 0 else -1
        c = abs(self.coeff)
        logv = math.log(c.numerator) - math.log(c.denominator)
        if self.xpow:
            if x == 0:
                if self.xpow < 0:
                    raise SingularEvaluation("negative power of x evaluated at x = 0")
                return 0, -math.inf
            if x < 0 and self.xpow % 2:
                sign = -sign
            logv += self.xpow * math.log(abs(x))
        gamma = self.tpow.value(beta)
        if gamma != 0:
            if t == 0:
                if gamma < 0:
                    raise SingularEvaluation("negative power of t evaluated at t = 0")
                return 0, -math.inf
            logv += gamma * math.log(t)
        if self.gnum or self.gden:
            logv += log_gamma_ratio(self.gnum, self.gden, beta)
        return sign, logv

    def eval(self, x: float, t: float, beta: float) -> float:
        sign, logv = self.log_abs(x, t, beta)
        if sign == 0:
            return 0.0
        if self.gnum or self.gden:
            # direct product is more accurate when it does not overflow
            if abs(logv) < 600 and abs(self.coeff) < 10**300:
                g = gamma_ratio(self.gnum, self.gden, beta)
                return float(self.coeff) * _pow(x, self.xpow) * _tpow(t, self.tpow.value(beta)) * g
        return sign * math.exp(logv)

    def __str__(self) -> str:
        parts = [str(self.coeff)]
        if self.xpow:
            parts.append(f"x^{self.xpow}")
        if not self.tpow.is_zero:
            parts.append(f"t^({self.tpow})")
        if self.gnum or self.gden:
            num = ",".join(str(g) for g in self.gnum)
            den = ",".join(str(g) for g in self.gden)
            parts.append(f"G({num})/G({den})")
        return " * ".join(parts)


def _pow(x: float, m: int) -> float:
    if m == 0:
        return 1.0
    if x == 0 and m < 0:
        raise SingularEvaluation("negative power of x evaluated at x = 0")
    return x**m


def _tpow(t: float, gamma: float) -> float:
    if gamma == 0:
        return 1.0
    if t == 0:
        if gamma < 0:
            raise SingularEvaluation("negative power of t evaluated at t = 0")
        return 0.0
    return t**gamma


class Series:
    """Immutable sum of :class:`Term`.  Construction does not merge terms;
    every arithmetic operation returns a collected result."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Term] = ()):
        object.__setattr__(self, "terms", tuple(t for t in terms if t is not None))

    def __setattr__(self, name, value):
        raise AttributeError("Series is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c) -> "Series":
        return cls([Term.make(c)])

    @classmethod
    def monomial(cls, coeff, xpow: int = 0, tpow=ZERO, gnum=(), gden=()) -> "Series":
        return cls([Term.make(coeff, xpow, tpow, gnum, gden)])

    # -- container protocol -------------------------------------------
    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return collect(self).terms == collect(other).terms

    def __hash__(self):
        return hash(collect(self).terms)

    def __repr__(self) -> str:
        return f"Series({to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)

    # -- arithmetic sugar ---------------------------------------------
    def __add__(self, other) -> "Series":
        return add(self, _as_series(other))

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return scale(self, -1)

    def __sub__(self, other) -> "Series":
        return add(self, scale(_as_series(other), -1))

    def __rsub__(self, other) -> "Series":
        return add(_as_series(other), scale(self, -1))

    def __mul__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            return scale(self, other)
        return mul(self, _as_series(other))

    __rmul__ = __mul__

    def __call__(self, x: float, t: float, beta: float) -> float:
        return eval_series(self, x, t, beta)

    # -- structural queries -------------------------------------------
    @property
    def is_t_free(self) -> bool:
        return all(tm.tpow.is_zero and not tm.gnum and not tm.gden for tm in self.terms)

    def min_tpow_a(self) -> Fraction | None:
        if not self.terms:
            return None
        return min(tm.tpow.a for tm in self.terms)


def _as_series(value) -> Series:
    if isinstance(value, Series):
        return value
    return Series.const(value)


ZERO_SERIES = Series()


# -- operations ---------------------------------------------------------

def collect(s: Series) -> Series:
    """Merge terms sharing ``(xpow, tpow, gnum, gden)``; drop zeros; sort."""
    acc: dict = defaultdict(Fraction)
    for tm in s.terms:
        acc[tm.key] += tm.coeff
    terms = [Term(c, *k) for k, c in acc.items() if c != 0]
    terms.sort(key=Term.sort_key)
    return Series(terms)


def add(s1: Series, s2: Series) -> Series:
    return collect(Series(s1.terms + s2.terms))


def sum_series(items: Iterable[Series]) -> Series:
    terms: list[Term] = []
    for s in items:
        terms.extend(s.terms)
    return collect(Series(terms))


def scale(s: Series, k) -> Series:
    k = _frac(k)
    if k == 0:
        return ZERO_SERIES
    return Series(Term(tm.coeff * k, tm.xpow, tm.tpow, tm.gnum, tm.gden) for tm in s.terms)


def mul_terms(a: Term, b: Term) -> Term | None:
    return Term.make(a.coeff * b.coeff, a.xpow + b.xpow, a.tpow + b.tpow,
                     a.gnum + b.gnum, a.gden + b.gden)


def mul(s1: Series, s2: Series) -> Series:
    if not s1.terms or not s2.terms:
        return ZERO_SERIES
    return collect(Series(mul_terms(a, b) for a in s1.terms for b in s2.terms))


def mul_x(s: Series, m: int) -> Series:
    """Multiply by ``x**m`` (m may be negative)."""
    return Series(Term(tm.coeff, tm.xpow + m, tm.tpow, tm.gnum, tm.gden) for tm in s.terms)


def diff_x(s: Series) -> Series:
    out = []
    for tm in s.terms:
        if tm.xpow == 0:
            continue
        out.append(Term(tm.coeff * tm.xpow, tm.xpow - 1, tm.tpow, tm.gnum, tm.gden))
    return collect(Series(out))


def diff_t(s: Series) -> Series:
    """``t**g -> g * t**(g-1)`` with a beta-dependent ``g`` kept as
    ``Gamma(g+1)/Gamma(g)`` so coefficients stay rational."""
    out = []
    for tm in s.terms:
        g = tm.tpow
        if g.is_zero:
            continue
        if g.is_constant:
            out.append(Term.make(tm.coeff * g.a, tm.xpow, g - 1, tm.gnum, tm.gden))
        else:
            out.append(Term.make(tm.coeff, tm.xpow, g - 1,
                                 tm.gnum + (g + 1,), tm.gden + (g,)))
    return collect(Series(out))


def eval_series(s: Series, x: float, t: float, beta: float) -> float:
    """Numeric value of a series; terms are summed with ``math.fsum``."""
    return math.fsum(tm.eval(x, t, beta) for tm in s.terms)


# ``eval`` is the public name; the builtin is only shadowed inside this module
# via the alias below.
eval = eval_series  # noqa: A001


def eval_mp(s: Series, x, t, beta, dps: int = 30):
    """Evaluate in mpmath with an unbounded exponent range.

    Needed for quantities like ``t**750 / Gamma(752)`` which underflow doubles.
    """
    import mpmath

    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        t = mpmath.mpf(t)
        beta = mpmath.mpf(beta)
        total = mpmath.mpf(0)
        for tm in s.terms:
            g = tm.tpow.a + tm.tpow.b * beta
            if tm.xpow < 0 and x == 0:
                raise SingularEvaluation("negative power of x evaluated at x = 0")
            val = mpmath.mpf(tm.coeff.numerator) / tm.coeff.denominator
            val *= x**tm.xpow if tm.xpow else 1
            if g != 0:
                if t == 0:
                    continue
                val *= t**g
            lg = mpmath.fsum(mpmath.loggamma(a.a + a.b * beta) for a in tm.gnum)
            lg -= mpmath.fsum(mpmath.loggamma(a.a + a.b * beta) for a in tm.gden)
            total += val * mpmath.exp(lg)
        return +total


def equal_numeric(s1: Series, s2: Series, samples: Sequence[tuple[float, float, float]],
                  tol: float) -> bool:
    for x, t, beta in samples:
        v1 = eval_series(s1, x, t, beta)
        v2 = eval_series(s2, x, t, beta)
        if not abs(v1 - v2) <= tol * (1 + abs(v1)):
            return False
    return True


def random_samples(n: int, rng: np.random.Generator | None = None,
                   x_range=(0.5, 4.0), t_range=(0.01, 1.0),
                   beta_range=(0.1, 1.0)) -> list[tuple[float, float, float]]:
    rng = rng or np.random.default_rng(0)
    xs = rng.uniform(*x_range, size=n)
    ts = rng.uniform(*t_range, size=n)
    bs = rng.uniform(*beta_range, size=n)
    return [(float(x), float(t), float(b)) for x, t, b in zip(xs, ts, bs)]


def substitute_beta(s: Series, beta) -> Series:
    """Replace beta by an exact rational, folding what becomes integer."""
    beta = _frac(beta)

    def fix(g: LinExp) -> LinExp:
        return LinExp(g.exact_value(beta), 0)

    return collect(Series(
        Term.make(tm.coeff, tm.xpow, fix(tm.tpow),
                  tuple(fix(g) for g in tm.gnum), tuple(fix(g) for g in tm.gden))
        for tm in s.terms
    ))


class CompiledSeries:
    """Series frozen at one beta for vectorized evaluation on grids."""

    def __init__(self, s: Series, beta: float):
        self.beta = beta
        n = len(s.terms)
        self.log_c = np.empty(n)
        self.sign = np.empty(n)
        self.xpow = np.empty(n, dtype=int)
        self.tpow = np.empty(n)
        for i, tm in enumerate(s.terms):
            c = abs(tm.coeff)
            lg = log_gamma_ratio(tm.gnum, tm.gden, beta) if (tm.gnum or tm.gden) else 0.0
            self.log_c[i] = math.log(c.numerator) - math.log(c.denominator) + lg
            self.sign[i] = 1.0 if tm.coeff > 0 else -1.0
            self.xpow[i] = tm.xpow
            self.tpow[i] = tm.tpow.value(beta)

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        xb, tb = np.broadcast_arrays(x, t)
        out = np.zeros(xb.shape)
        if self.log_c.size == 0:
            return out
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            X = xb[..., None]
            T = tb[..., None]
            if np.any((X == 0) & (self.xpow < 0)):
                raise SingularEvaluation("negative power of x evaluated at x = 0")
            xp = np.where(self.xpow == 0, 1.0, X ** self.xpow.astype(float))
            tp = np.where(self.tpow == 0, 1.0, np.where(T > 0, T, 0.0) ** self.tpow)
            vals = self.sign * np.exp(self.log_c) * xp * tp
        return vals.sum(axis=-1)


# -- canonical text form ------------------------------------------------

def to_text(s: Series) -> str:
    s = collect(s)
    if not s.terms:
        return "0"
    return " + ".join(str(tm) for tm in s.terms)


_TERM_RE = re.compile(
    r"^(?P<coeff>-?\d+(?:/\d+)?)"
    r"(?:\s*\*\s*x\^(?P<xpow>-?\d+))?"
    r"(?:\s*\*\s*t\^\((?P<tpow>[^)]*)\))?"
    r"(?:\s*\*\s*G\((?P<gnum>[^)]*)\)/G\((?P<gden>[^)]*)\))?$"
)


def parse_text(text: str) -> Series:
    """Parse the canonical text form produced by :func:`to_text`."""
    text = text.strip()
    if text == "0":
        return ZERO_SERIES
    terms = []
    for chunk in text.split(" + "):
        m = _TERM_RE.match(chunk.strip())
        if not m:
            raise SpecParseError(f"cannot parse term {chunk!r}")
        gnum = tuple(LinExp.parse(g) for g in m["gnum"].split(",")) if m["gnum"] else ()
        gden = tuple(LinExp.parse(g) for g in m["gden"].split(",")) if m["gden"] else ()
        terms.append(Term.make(Fraction(m["coeff"]), int(m["xpow"] or 0),
                               LinExp.parse(m["tpow"]) if m["tpow"] else ZERO,
                               gnum, gden))
    return collect(Series(terms))
