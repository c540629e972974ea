"""Decomposition recurrence for two coupled unknowns.

Problems are held in normal form::

    D^{beta+1} u = sum(linear_u) + outer_u(N_u) + source_u
    D^{beta}   v = sum(linear_v) + outer_v(N_v) + source_v

with u(x,0) = f0, u_t(x,0) = f1, v(x,0) = g0.  Applying the transform,
dividing by ``s**mu`` and inverting gives

    u_0 = f0 + t*f1 [+ J^{beta+1} source_u],   v_0 = g0 [+ J^{beta} source_v]
    u_{j+1} = J^{beta+1}[ Lin_u(u_j, v_j) + outer_u(A_j) (+ source_u at j=0) ]
    v_{j+1} = J^{beta}  [ Lin_v(u_j, v_j) + outer_v(B_j) (+ source_v at j=0) ]

where the bracketed source terms go to whichever slot ``source_placement``
selects.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .adomian import NonlinearitySpec, adomian_poly
from .errors import DivergentComponent, InsufficientComponents
from .fracops import FracOrder, caputo, rl_integral
from .fracseries import (
    ZERO_SERIES,
    CompiledSeries,
    Series,
    collect,
    diff_t,
    diff_x,
    eval_series,
    mul,
    mul_x,
    substitute_beta,
    sum_series,
)
from .specfun import _frac

SINGULAR_FORMS = ("none", "div_x2_x2", "div_x_x")
OUTER_FORMS = ("none", "dx", "div_x_x", "div_x2_x2")
PLACEMENTS = ("in_w0", "in_w1")

U_ORDER = FracOrder.beta_plus_one()
V_ORDER = FracOrder.beta()


def div_x2_x2(w: Series) -> Series:
    """``(1/x**2) d/dx (x**2 dw/dx) = w_xx + (2/x) w_x``."""
    wx = diff_x(w)
    return diff_x(wx) + mul_x(wx, -1) * 2


def div_x_x(w: Series) -> Series:
    """``(1/x) d/dx (x w) = w_x + w/x``."""
    return diff_x(w) + mul_x(w, -1)


def apply_outer(form: str, w: Series) -> Series:
    if form == "none":
        return w
    if form == "dx":
        return diff_x(w)
    if form == "div_x_x":
        return div_x_x(w)
    if form == "div_x2_x2":
        return div_x2_x2(w)
    raise ValueError(f"unknown operator form {form!r}")


@dataclass(frozen=True)
class LinearTermSpec:
    """``coeff(x) * op(d_t^dt w)`` where ``op`` is ``d_x^dx`` or one of the
    radial forms.  With a radial form ``dx`` must be 0: the form supplies its
    own x-derivatives and ``dt`` is applied to the operand first."""

    var: str
    coeff: Series = field(default_factory=lambda: Series.const(1))
    dx: int = 0
    dt: int = 0
    singular_form: str = "none"

    def __post_init__(self):
        if self.var not in ("u", "v"):
            raise ValueError("var must be 'u' or 'v'")
        if self.singular_form not in SINGULAR_FORMS:
            raise ValueError(f"unknown singular form {self.singular_form!r}")
        if not 0 <= self.dx <= 2 or not 0 <= self.dt <= 1:
            raise ValueError("derivative orders out of range (dx <= 2, dt <= 1)")
        if self.singular_form != "none" and self.dx != 0:
            raise ValueError("radial forms carry their own x-derivatives; set dx=0")
        if not self.coeff.is_t_free:
            raise ValueError("linear coefficients must depend on x only")

    def apply(self, w: Series) -> Series:
        for _ in range(self.dt):
            w = diff_t(w)
        if self.singular_form == "none":
            for _ in range(self.dx):
                w = diff_x(w)
        else:
            w = apply_outer(self.singular_form, w)
        return mul(self.coeff, w)


@dataclass(frozen=True)
class ProblemSpec:
    name: str = "problem"
    f0: Series = ZERO_SERIES
    f1: Series = ZERO_SERIES
    g0: Series = ZERO_SERIES
    source_u: Series = ZERO_SERIES
    source_v: Series = ZERO_SERIES
    linear_u: tuple[LinearTermSpec, ...] = ()
    linear_v: tuple[LinearTermSpec, ...] = ()
    nonlinear_u: NonlinearitySpec = NonlinearitySpec()
    nonlinear_v: NonlinearitySpec = NonlinearitySpec()
    nonlinear_u_outer: str = "none"
    nonlinear_v_outer: str = "none"
    source_placement: str = "in_w1"

    def __post_init__(self):
        object.__setattr__(self, "linear_u", tuple(self.linear_u))
        object.__setattr__(self, "linear_v", tuple(self.linear_v))
        if self.source_placement not in PLACEMENTS:
            raise ValueError(f"source_placement must be one of {PLACEMENTS}")
        for form in (self.nonlinear_u_outer, self.nonlinear_v_outer):
            if form not in OUTER_FORMS:
                raise ValueError(f"unknown outer form {form!r}")
        for s in (self.f0, self.f1, self.g0):
            if not s.is_t_free:
                raise ValueError("initial data must depend on x only")

    @property
    def u_order(self) -> FracOrder:
        return U_ORDER

    @property
    def v_order(self) -> FracOrder:
        return V_ORDER

    @property
    def is_linear(self) -> bool:
        return not self.nonlinear_u and not self.nonlinear_v

    def rhs(self, u: Series, v: Series, include_sources: bool = True) -> tuple[Series, Series]:
        """Right-hand sides of both equations evaluated on full fields."""
        ru = [t.apply(u if t.var == "u" else v) for t in self.linear_u]
        rv = [t.apply(u if t.var == "u" else v) for t in self.linear_v]
        if self.nonlinear_u:
            ru.append(apply_outer(self.nonlinear_u_outer, self.nonlinear_u.evaluate(u, v)))
        if self.nonlinear_v:
            rv.append(apply_outer(self.nonlinear_v_outer, self.nonlinear_v.evaluate(u, v)))
        if include_sources:
            ru.append(self.source_u)
            rv.append(self.source_v)
        return sum_series(ru), sum_series(rv)


@dataclass(frozen=True)
class ComponentSolution:
    u_components: tuple[Series, ...]
    v_components: tuple[Series, ...]
    u_order: FracOrder = U_ORDER
    v_order: FracOrder = V_ORDER
    beta_symbolic: bool = True
    beta: Fraction | None = None

    def __len__(self) -> int:
        return len(self.u_components)

    def u_prefix(self, n: int) -> Series:
        return sum_series(self.u_components[:n])

    def v_prefix(self, n: int) -> Series:
        return sum_series(self.v_components[:n])

    def extend(self, u: Series, v: Series) -> "ComponentSolution":
        return ComponentSolution(self.u_components + (u,), self.v_components + (v,),
                                 self.u_order, self.v_order, self.beta_symbolic, self.beta)

    def check_beta(self, beta: float) -> None:
        if self.beta is not None and abs(float(self.beta) - beta) > 1e-12:
            raise ValueError(f"components were frozen at beta={self.beta}, not {beta}")


def initial_components(spec: ProblemSpec) -> tuple[Series, Series]:
    u0 = spec.f0 + mul(Series.monomial(1, 0, 1), spec.f1)
    v0 = collect(spec.g0)
    if spec.source_placement == "in_w0":
        u0 = u0 + rl_integral(spec.source_u, spec.u_order)
        v0 = v0 + rl_integral(spec.source_v, spec.v_order)
    return u0, v0


def _check_admissible(s: Series, which: str, j: int) -> Series:
    for tm in s.terms:
        if not tm.tpow.nonnegative_on_unit():
            raise DivergentComponent(
                f"{which}_{j} has t-exponent {tm.tpow} outside the admissible range"
            )
    return s


def next_components(spec: ProblemSpec, current: ComponentSolution,
                    j: int) -> tuple[Series, Series]:
    if j < 0:
        raise ValueError("j must be nonnegative")
    if len(current) < j + 1:
        raise InsufficientComponents(f"components 0..{j} are required, have {len(current)}")
    uj = current.u_components[j]
    vj = current.v_components[j]

    ru = [t.apply(uj if t.var == "u" else vj) for t in spec.linear_u]
    rv = [t.apply(uj if t.var == "u" else vj) for t in spec.linear_v]
    if spec.nonlinear_u:
        a_j = adomian_poly(spec.nonlinear_u, current.u_components, current.v_components, j)
        ru.append(apply_outer(spec.nonlinear_u_outer, a_j))
    if spec.nonlinear_v:
        b_j = adomian_poly(spec.nonlinear_v, current.u_components, current.v_components, j)
        rv.append(apply_outer(spec.nonlinear_v_outer, b_j))
    if spec.source_placement == "in_w1" and j == 0:
        ru.append(spec.source_u)
        rv.append(spec.source_v)

    u_next = rl_integral(sum_series(ru), spec.u_order)
    v_next = rl_integral(sum_series(rv), spec.v_order)
    return (_check_admissible(u_next, "u", j + 1), _check_admissible(v_next, "v", j + 1))


def solve(spec: ProblemSpec, n_components: int, beta=None) -> ComponentSolution:
    """Components ``0 .. n_components-1`` of both unknowns.

    With ``beta`` given (converted to an exact rational) every component is
    frozen at that order as soon as it is produced.  Gamma factors then
    collapse into rational coefficients and the term count stays small,
    which matters for the nonlinear benchmarks past eight components.
    """
    if n_components < 1:
        raise ValueError("n_components must be at least 1")
    fixed = None if beta is None else _frac(beta)
    if fixed is not None and not 0 < fixed <= 1:
        raise ValueError("beta must lie in (0, 1]")

    def freeze(s: Series) -> Series:
        return s if fixed is None else substitute_beta(s, fixed)

    u0, v0 = initial_components(spec)
    sol = ComponentSolution((freeze(u0),), (freeze(v0),), beta_symbolic=fixed is None,
                            beta=fixed)
    for j in range(n_components - 1):
        u, v = next_components(spec, sol, j)
        sol = sol.extend(freeze(u), freeze(v))
    return sol


def truncated_eval(sol: ComponentSolution, N: int, x: float, t: float,
                   beta: float) -> tuple[float, float]:
    """Values of the N-term prefix sums ``sum_{k<N} u_k`` and ``sum_{k<N} v_k``."""
    if N > len(sol):
        raise InsufficientComponents(f"N={N} exceeds the {len(sol)} computed components")
    sol.check_beta(beta)
    u = math.fsum(eval_series(c, x, t, beta) for c in sol.u_components[:N])
    v = math.fsum(eval_series(c, x, t, beta) for c in sol.v_components[:N])
    return u, v


def truncated_compiled(sol: ComponentSolution, N: int, beta: float):
    """Vectorized evaluators ``(U(x, t), V(x, t))`` for the N-term prefix sums."""
    if N > len(sol):
        raise InsufficientComponents(f"N={N} exceeds the {len(sol)} computed components")
    sol.check_beta(beta)
    return CompiledSeries(sol.u_prefix(N), beta), CompiledSeries(sol.v_prefix(N), beta)


def residual_series(spec: ProblemSpec, u: Series, v: Series) -> tuple[Series, Series]:
    """``D^mu w - RHS`` for both equations with (u, v) substituted symbolically."""
    ru, rv = spec.rhs(u, v)
    return caputo(u, spec.u_order) - ru, caputo(v, spec.v_order) - rv


def residual_prefix_series(spec: ProblemSpec, sol: ComponentSolution,
                           N: int) -> tuple[Series, Series]:
    """Residual series of the N-term prefix; frozen at ``sol.beta`` if set."""
    if N > len(sol):
        raise InsufficientComponents(f"N={N} exceeds the {len(sol)} computed components")
    res_u, res_v = residual_series(spec, sol.u_prefix(N), sol.v_prefix(N))
    if sol.beta is not None:
        res_u, res_v = substitute_beta(res_u, sol.beta), substitute_beta(res_v, sol.beta)
    return res_u, res_v


def residual(spec: ProblemSpec, sol: ComponentSolution, N: int, x: float, t: float,
             beta: float) -> tuple[float, float]:
    sol.check_beta(beta)
    res_u, res_v = residual_prefix_series(spec, sol, N)
    return abs(eval_series(res_u, x, t, beta)), abs(eval_series(res_v, x, t, beta))


def residual_grid(spec: ProblemSpec, sol: ComponentSolution, N: int, x, t, beta: float):
    """Vectorized ``(|res_u|, |res_v|)`` on arrays ``x``, ``t`` (one symbolic pass)."""
    sol.check_beta(beta)
    res_u, res_v = residual_prefix_series(spec, sol, N)
    return (abs(CompiledSeries(res_u, beta)(x, t)), abs(CompiledSeries(res_v, beta)(x, t)))


def components_text(sol: ComponentSolution, n: int | None = None) -> str:
    """Canonical-text dump, one ``u_j = ...`` / ``v_j = ...`` line each."""
    n = len(sol) if n is None else min(n, len(sol))
    lines = []
    for j in range(n):
        lines.append(f"u_{j} = {sol.u_components[j]}")
        lines.append(f"v_{j} = {sol.v_components[j]}")
    return "\n".join(lines) + "\n"


def scale_problem(spec: ProblemSpec, lam) -> ProblemSpec:
    """Scale initial data and sources by ``lam`` (linearity checks)."""
    return replace(spec, f0=spec.f0 * lam, f1=spec.f1 * lam, g0=spec.g0 * lam,
                   source_u=spec.source_u * lam, source_v=spec.source_v * lam)
