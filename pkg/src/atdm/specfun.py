"""Gamma ratios with arguments linear in the fractional order, and the
one-parameter Mittag-Leffler function.

Every Gamma argument in the package has the form ``a + b*beta`` with rational
``a`` and ``b``; :class:`LinExp` carries that pair exactly.  Ratios are
evaluated in log space because coefficients such as ``2**100`` routinely sit
over ``Gamma(2 + 100*beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import mpmath

from .errors import NoConvergence, NonPositiveGammaArgument

Rational = Union[int, Fraction]

# pairs of Gamma arguments whose constant parts differ by at most this many
# integers are evaluated as rising factorials instead of through lgamma
_MAX_PAIR_SHIFT = 64


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


@dataclass(frozen=True, order=True)
class LinExp:
    """Exact value ``a + b*beta``."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        # hashed constantly as part of term keys; Fraction hashing is slow
        object.__setattr__(self, "_hash", hash((self.a, self.b)))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def of(cls, value) -> "LinExp":
        if isinstance(value, LinExp):
            return value
        return cls(_frac(value), Fraction(0))

    def value(self, beta: float) -> float:
        return float(self.a) + float(self.b) * beta

    def exact_value(self, beta: Fraction) -> Fraction:
        return self.a + self.b * beta

    @property
    def is_constant(self) -> bool:
        return self.b == 0

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def is_integer(self) -> bool:
        return self.b == 0 and self.a.denominator == 1

    def positive_on_unit(self) -> bool:
        """True when ``a + b*beta > 0`` for every ``beta`` in (0, 1]."""
        at_one = self.a + self.b
        if at_one <= 0:
            return False
        return self.a > 0 or (self.a == 0 and self.b > 0)

    def nonnegative_on_unit(self) -> bool:
        return self.a >= 0 and self.a + self.b >= 0

    def __add__(self, other) -> "LinExp":
        other = LinExp.of(other)
        return LinExp(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other) -> "LinExp":
        other = LinExp.of(other)
        return LinExp(self.a - other.a, self.b - other.b)

    def __rsub__(self, other) -> "LinExp":
        return LinExp.of(other) - self

    def __neg__(self) -> "LinExp":
        return LinExp(-self.a, -self.b)

    def __mul__(self, k) -> "LinExp":
        k = _frac(k)
        return LinExp(self.a * k, self.b * k)

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*B"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}*B"

    def __repr__(self) -> str:
        return f"LinExp({self})"

    @classmethod
    def parse(cls, text: str) -> "LinExp":
        """Inverse of ``str``: accepts ``'3'``, ``'2*B'``, ``'1+2*B'``, ``'1/2-B'``."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty LinExp literal")
        # split into signed chunks
        chunks, start = [], 0
        for i in range(1, len(s)):
            if s[i] in "+-" and s[i - 1] not in "+-*/":
                chunks.append(s[start:i])
                start = i
        chunks.append(s[start:])
        a = Fraction(0)
        b = Fraction(0)
        for ch in chunks:
            if ch.endswith("B"):
                body = ch[:-1].rstrip("*")
                if body in ("", "+"):
                    b += 1
                elif body == "-":
                    b -= 1
                else:
                    b += Fraction(body)
            else:
                a += Fraction(ch)
        return cls(a, b)


def _check_args(args: Iterable[LinExp], beta: float) -> None:
    for arg in args:
        if arg.value(beta) <= 0:
            raise NonPositiveGammaArgument(
                f"Gamma argument {arg} is not positive at beta={beta}"
            )


def _split_ratio(numerators, denominators, beta: float) -> tuple[float, float]:
    """Return ``(scale, log_rest)`` with ratio = scale * exp(log_rest).

    Numerator/denominator arguments with equal beta-coefficient and an integer
    offset are matched and evaluated as finite products, which keeps
    ``Gamma(z + k)/Gamma(z)`` exact to rounding for large ``z``.
    """
    nums = [LinExp.of(v) for v in numerators]
    dens = [LinExp.of(v) for v in denominators]
    _check_args(nums, beta)
    _check_args(dens, beta)

    scale = 1.0
    log_acc = 0.0
    unmatched_dens = list(dens)
    rest_nums = []
    for n in nums:
        match = None
        for idx, d in enumerate(unmatched_dens):
            shift = n.a - d.a
            if n.b == d.b and shift.denominator == 1 and abs(shift) <= _MAX_PAIR_SHIFT:
                match = idx
                break
        if match is None:
            rest_nums.append(n)
            continue
        d = unmatched_dens.pop(match)
        k = int(n.a - d.a)
        z = d.value(beta)
        if k > 0:
            for i in range(k):
                scale *= z + i
        elif k < 0:
            for i in range(1, -k + 1):
                scale /= z - i
        if not 1e-200 < abs(scale) < 1e200:
            log_acc += math.log(scale)
            scale = 1.0

    log_rest = log_acc
    log_rest += math.fsum(math.lgamma(n.value(beta)) for n in rest_nums)
    log_rest -= math.fsum(math.lgamma(d.value(beta)) for d in unmatched_dens)
    return scale, log_rest


def log_gamma_ratio(numerators, denominators, beta: float) -> float:
    """Natural log of ``prod Gamma(num) / prod Gamma(den)`` (always positive)."""
    scale, log_rest = _split_ratio(numerators, denominators, beta)
    return math.log(scale) + log_rest


def gamma_ratio(numerators, denominators, beta: float) -> float:
    """``prod Gamma(num) / prod Gamma(den)`` for arguments linear in beta.

    >>> gamma_ratio([4], [2], 1.0)
    6.0
    """
    scale, log_rest = _split_ratio(numerators, denominators, beta)
    return scale * math.exp(log_rest)


def mittag_leffler(beta: float, x: float, tol: float = 1e-15,
                   max_terms: int = 10_000) -> float:
    """One-parameter Mittag-Leffler function ``sum x**j / Gamma(beta*j + 1)``.

    Plain series summation.  The loop stops once the latest term and a
    geometric bound on the remaining tail are both below ``tol``; when the
    partial sums cancel heavily (negative ``x``) the same number of terms is
    re-summed in extended precision.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if x == 0:
        return 1.0

    log_abs_x = math.log(abs(x))
    negative = x < 0
    terms = []
    for j in range(max_terms):
        lg_j = math.lgamma(beta * j + 1)
        mag = math.exp(j * log_abs_x - lg_j)
        terms.append(-mag if negative and j % 2 else mag)
        # ratio |T_{j+1}| / |T_j|; nonincreasing in j by log-convexity of Gamma
        ratio = math.exp(log_abs_x + lg_j - math.lgamma(beta * (j + 1) + 1))
        if mag < tol and ratio < 1 and mag * ratio / (1 - ratio) < tol:
            break
    else:
        raise NoConvergence(
            f"Mittag-Leffler series for beta={beta}, x={x} needs more than {max_terms} terms"
        )

    peak = max(abs(t) for t in terms)
    if peak * len(terms) * 2.0**-52 < tol:
        return math.fsum(terms)

    digits = int(math.log10(peak)) + int(-math.log10(tol)) + 10
    with mpmath.workdps(max(digits, 20)):
        bx = mpmath.mpf(x)
        bb = mpmath.mpf(beta)
        total = mpmath.fsum(bx**j / mpmath.gamma(bb * j + 1) for j in range(len(terms)))
        return float(total)
