"""Adomian polynomials for multilinear nonlinearities.

A nonlinearity is a sum of products of derivative factors such as
``v * u_x`` or ``v * u_x * u_tx``.  For a product of ``m`` factors the n-th
Adomian polynomial is the convolution over compositions
``k_1 + ... + k_m = n`` of the factor-wise derivatives of the components.
:func:`adomian_oracle` recomputes the same quantity by expanding the
nonlinearity on formal grade-carrying sums and reading off grade ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import InsufficientComponents
from .fracseries import ZERO_SERIES, Series, collect, diff_t, diff_x, mul, scale, sum_series
from .specfun import _frac

VARS = ("u", "v")


@dataclass(frozen=True)
class DerivFactor:
    var: str
    dx: int = 0
    dt: int = 0

    def __post_init__(self):
        if self.var not in VARS:
            raise ValueError(f"factor variable must be 'u' or 'v', got {self.var!r}")
        if not 0 <= self.dx <= 2 or not 0 <= self.dt <= 1:
            raise ValueError("derivative orders out of range (dx <= 2, dt <= 1)")

    def apply(self, w: Series) -> Series:
        for _ in range(self.dt):
            w = diff_t(w)
        for _ in range(self.dx):
            w = diff_x(w)
        return w

    def __str__(self) -> str:
        sub = "x" * self.dx + "t" * self.dt
        return f"{self.var}_{sub}" if sub else self.var


@dataclass(frozen=True)
class Product:
    scale: Fraction
    factors: tuple[DerivFactor, ...]

    def __post_init__(self):
        object.__setattr__(self, "scale", _frac(self.scale))
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise ValueError("a nonlinear product needs at least two factors")

    def __str__(self) -> str:
        return f"{self.scale}*" + "*".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class NonlinearitySpec:
    products: tuple[Product, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "products", tuple(self.products))

    @classmethod
    def product(cls, *factors: DerivFactor, scale=1) -> "NonlinearitySpec":
        return cls((Product(scale, factors),))

    def __bool__(self) -> bool:
        return bool(self.products)

    def __str__(self) -> str:
        return " + ".join(str(p) for p in self.products) or "0"

    def evaluate(self, u: Series, v: Series) -> Series:
        """The nonlinearity applied directly to full (non-decomposed) fields."""
        return adomian_poly(self, [u], [v], 0)


def compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Compositions of n into ``parts`` nonnegative integers, lexicographic."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def _check(u_components, v_components, n):
    if n < 0:
        raise ValueError("n must be nonnegative")
    if len(u_components) < n + 1 or len(v_components) < n + 1:
        raise InsufficientComponents(
            f"A_{n} needs {n + 1} components of each unknown, got "
            f"{len(u_components)} and {len(v_components)}"
        )


def adomian_poly(spec: NonlinearitySpec, u_components: Sequence[Series],
                 v_components: Sequence[Series], n: int) -> Series:
    _check(u_components, v_components, n)
    comps = {"u": u_components, "v": v_components}
    cache: dict = {}

    def factor_value(f: DerivFactor, k: int) -> Series:
        key = (f, k)
        if key not in cache:
            cache[key] = f.apply(comps[f.var][k])
        return cache[key]

    pieces = []
    for prod in spec.products:
        acc = []
        for ks in compositions(n, len(prod.factors)):
            vals = [factor_value(f, k) for f, k in zip(prod.factors, ks)]
            if not all(vals):
                continue
            term = vals[0]
            for v in vals[1:]:
                term = mul(term, v)
            acc.append(term)
        pieces.append(scale(sum_series(acc), prod.scale))
    return sum_series(pieces)


def adomian_oracle(spec: NonlinearitySpec, u_components: Sequence[Series],
                   v_components: Sequence[Series], n: int) -> Series:
    """Brute-force route: substitute ``sum_k p**k w_k`` for each field,
    expand the full product as a polynomial in ``p`` and take the ``p**n``
    coefficient (which is ``(1/n!) d^n/dp^n`` at ``p = 0``)."""
    _check(u_components, v_components, n)
    grades = graded_expansion(spec, u_components[: n + 1], v_components[: n + 1])
    return collect(grades[n]) if n < len(grades) else ZERO_SERIES


def graded_expansion(spec: NonlinearitySpec, u_components: Sequence[Series],
                     v_components: Sequence[Series]) -> list[Series]:
    """All grades of ``N(sum p**k u_k, sum p**k v_k)`` (grade = list index)."""
    grades: list[Series] = []
    for prod in spec.products:
        poly: list[Series] = [Series.const(prod.scale)]
        for f in prod.factors:
            graded = [f.apply(w) for w in (u_components if f.var == "u" else v_components)]
            out = [ZERO_SERIES] * (len(poly) + len(graded) - 1)
            for i, a in enumerate(poly):
                for j, b in enumerate(graded):
                    out[i + j] = out[i + j] + mul(a, b)
            poly = out
        for g, s in enumerate(poly):
            if g < len(grades):
                grades[g] = grades[g] + s
            else:
                grades.append(s)
    return grades
