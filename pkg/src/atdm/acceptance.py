"""Executable acceptance checks.

Each ``check_*`` function runs one criterion at its stated tolerance and
returns a :class:`CheckResult`; nothing here asserts.  ``run_all`` is what
``atdm verify`` and the acceptance test module call.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from math import gamma as G
from typing import Callable

import numpy as np

from .adomian import DerivFactor, NonlinearitySpec, adomian_oracle, adomian_poly
from .benchmarks import (
    BENCHMARKS,
    L2_JS,
    L2_TS,
    best_beta_for_column,
    calibrate_N,
    l2_increment_table,
    load_fixture,
    reference_ae,
)
from .engine import residual_grid, solve, truncated_compiled, truncated_eval
from .fracops import (
    FracOrder,
    aboodh,
    aboodh_inverse,
    caputo,
    composite_fractional_integral,
    rl_integral,
)
from .fracseries import Series, Term, collect, diff_t, equal_numeric, eval_series, random_samples
from .specfun import LinExp, mittag_leffler


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    limit: float | None = None
    info: list[str] = field(default_factory=list)

    @property
    def within_time(self) -> bool:
        return self.limit is None or self.seconds < self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.within_time

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        budget = f" (limit {self.limit:g} s)" if self.limit is not None else ""
        return f"[{status}] criterion {self.number}: {self.name}; {self.detail}; " \
               f"{self.seconds:.2f} s{budget}"


def _timed(number: int, name: str, limit: float | None):
    def wrap(fn: Callable[[], tuple[bool, str, list[str]]]):
        def run() -> CheckResult:
            t0 = time.perf_counter()
            passed, detail, info = fn()
            return CheckResult(number, name, passed, detail, time.perf_counter() - t0,
                               limit, info)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# -- random symbolic data ------------------------------------------------------

def random_series(rng: np.random.Generator, n_terms: int = 3, max_xpow: int = 3) -> Series:
    """Small random series with beta-dependent exponents and Gamma factors."""
    terms = []
    for _ in range(n_terms):
        coeff = Fraction(int(rng.integers(-9, 10)) or 1, int(rng.integers(1, 6)))
        tpow = LinExp(int(rng.integers(0, 4)), int(rng.integers(0, 3)))
        gden = (tpow + 1,) if not tpow.is_integer else ()
        terms.append(Term.make(coeff, int(rng.integers(0, max_xpow + 1)), tpow, (), gden))
    return collect(Series(terms))


# -- printed component listings -------------------------------------------------

PRINTED_COMPONENTS: dict[str, dict[str, Callable[[float, float, float], float]]] = {
    "EX1": {
        "u0": lambda x, t, b: x*x*t + x*x + 2*t**(b+1)*(-3 + t*(x*x-3)/(2+b))/G(2+b),
        "v0": lambda x, t, b: 3*t**b*(x*x/G(b+1) - 2*t/G(2+b)),
        "u1": lambda x, t, b: (6*t**(2+b)/G(3+b) + 6*t**(b+1)/G(2+b)
                               + 12*t**(3+2*b)/G(4+2*b) - 6*x*x*t**(1+2*b)/G(2+2*b)),
        "v1": lambda x, t, b: (-2*x*x*t**b/G(b+1) - 4*x*x*t**(1+2*b)/G(2+2*b)
                               + 18*t**(2*b)/G(1+2*b)),
        "u2": lambda x, t, b: 4*x*x*t**(1+2*b)/G(2+2*b) + 4*t**(2+3*b)*(2*x*x-9)/G(3+3*b),
        "v2": lambda x, t, b: (-12*t**(2*b)/G(1+2*b) + 12*x*x*t**(3*b)/G(1+3*b)
                               - 24*t**(1+3*b)/G(2+3*b)),
        "u3": lambda x, t, b: (24*t**(2+3*b)/G(3+3*b) + 48*t**(3+4*b)/G(4+4*b)
                               - 24*x*x*t**(1+4*b)/G(2+4*b)),
        "v3": lambda x, t, b: (-8*x*x*t**(3*b)/G(1+3*b) + 72*t**(4*b)/G(1+4*b)
                               - 16*x*x*t**(1+4*b)/G(2+4*b)),
    },
    "EX2": {
        "u0": lambda x, t, b: x*x,
        "v0": lambda x, t, b: x*x,
        "u1": lambda x, t, b: (-2*b*b - 4*t*t - 10*b - 12)*t**(b+1)/G(4+b),
        "v1": lambda x, t, b: (2*b + 4*t + 4)*t**(b+1)/G(3+b),
        "v2": lambda x, t, b: -8*t**(1+2*b)*(2*b*b + t*t + 5*b + 3)/G(4+2*b),
        "u3": lambda x, t, b: (-72*b*b - 16*t*t - 168*b - 96)*t**(2+3*b)/G(5+3*b),
        "v3": lambda x, t, b: (24 + 24*b + 16*t)*t**(2+3*b)/G(4+3*b),
    },
    "EX3": {
        "u0": lambda x, t, b: x*x*t,
        "v0": lambda x, t, b: 0.0,
        "u1": lambda x, t, b: 4*x*x*t**(3+b)/G(4+b),
        "v1": lambda x, t, b: 2*x*x*t**(b+1)*(b**3 - 96*t**3 + 9*b*b + 26*b + 24)/G(5+b),
        "u2": lambda x, t, b: 4*t**(2+2*b)*x*x*(-1/G(3+2*b) + 16*t**3*(10+b)/G(6+2*b)),
        "v2": lambda x, t, b: -8*x*x*t**(2+2*b)/G(3+2*b),
        "u3": lambda x, t, b: 16*t**(3+3*b)*x*x*(
            1/G(4+3*b) - 4*t*(3+2*b)/G(5+3*b)
            + 8*t**4*(G(7+2*b) + 16*G(4+b)**2*(10+b)*(3+b))/(G(4+b)**2*G(8+3*b))),
        "v3": lambda x, t, b: 8*t**(1+3*b)*x*x*(
            ((2+3*b)*G(5+b)**2 + 4*t*G(3+2*b)*(2+b)**2*(3+b)**2*(4+b)**2)
            / (G(5+b)**2*G(3+3*b))
            - 16*t**3*(10+b)/G(5+3*b)),
    },
}


def anchor_deviation(bench_id: str, name: str, samples, sol=None) -> float:
    """Largest ``|engine - printed| / (1 + |printed|)`` over ``samples``."""
    printed = PRINTED_COMPONENTS[bench_id][name]
    j = int(name[1:])
    if sol is None:
        sol = solve(BENCHMARKS[bench_id].spec, j + 1)
    comp = (sol.u_components if name[0] == "u" else sol.v_components)[j]
    worst = 0.0
    for x, t, b in samples:
        ref = printed(x, t, b)
        worst = max(worst, abs(eval_series(comp, x, t, b) - ref) / (1 + abs(ref)))
    return worst


# -- criteria -----------------------------------------------------------------------

NONLINEARITIES = {
    "v*u_x": NonlinearitySpec.product(DerivFactor("v"), DerivFactor("u", 1)),
    "u*v_x": NonlinearitySpec.product(DerivFactor("u"), DerivFactor("v", 1)),
    "u*u_x": NonlinearitySpec.product(DerivFactor("u"), DerivFactor("u", 1)),
    "v*v_x": NonlinearitySpec.product(DerivFactor("v"), DerivFactor("v", 1)),
    "v*u_x*v_x": NonlinearitySpec.product(DerivFactor("v"), DerivFactor("u", 1),
                                          DerivFactor("v", 1)),
    "v*u_x*u_tx": NonlinearitySpec.product(DerivFactor("v"), DerivFactor("u", 1),
                                           DerivFactor("u", 1, 1)),
}


@_timed(1, "Adomian polynomials equal the graded-expansion oracle", 5.0)
def check_adomian_oracle():
    rng = np.random.default_rng(2024)
    samples = random_samples(20, np.random.default_rng(1), x_range=(0.5, 2.0),
                             t_range=(0.05, 1.0))
    uc = [random_series(rng, 2) for _ in range(7)]
    vc = [random_series(rng, 2) for _ in range(7)]
    bad = []
    for label, spec in NONLINEARITIES.items():
        for n in range(7):
            fast = adomian_poly(spec, uc, vc, n)
            slow = adomian_oracle(spec, uc, vc, n)
            if fast != slow or not equal_numeric(fast, slow, samples, 1e-11):
                bad.append(f"{label} n={n}")
    detail = f"{len(NONLINEARITIES)} nonlinearities x n=0..6"
    return not bad, detail + (f"; mismatches: {bad}" if bad else ", all equal"), []


ANCHOR_SET = {
    "EX3": ("u0", "u1", "u2", "u3", "v0", "v1", "v2", "v3"),
    "EX2": ("u0", "u1", "v0", "v1", "v2", "v3"),
    "EX1": ("u0", "v0", "u1", "v1", "u2", "v2", "u3", "v3"),
}


@_timed(2, "printed component listings reproduced", 10.0)
def check_printed_components():
    samples = random_samples(20, np.random.default_rng(3), x_range=(0.5, 4.0),
                             t_range=(0.0, 1.0), beta_range=(0.05, 1.0))
    failed, info = [], []
    for bid, names in ANCHOR_SET.items():
        sol = solve(BENCHMARKS[bid].spec, 4)
        for name in names:
            dev = anchor_deviation(bid, name, samples, sol)
            if dev > 1e-10:
                failed.append(f"{bid} {name} ({dev:.2e})")
            info.append(f"{bid} {name}: max rel deviation {dev:.2e}")
    total = sum(len(v) for v in ANCHOR_SET.values())
    detail = f"{total - len(failed)}/{total} listings within 1e-10"
    if failed:
        detail += f"; off: {', '.join(failed)}"
    return not failed, detail, info


def grid_errors(bench_id: str, Ns, xs=None, ts=None) -> dict[int, float]:
    """Max |truncation - exact| over both unknowns on an (x, t) grid at beta = 1."""
    b = BENCHMARKS[bench_id]
    xs = np.linspace(1.0, 4.0, 13) if xs is None else xs
    ts = np.linspace(0.0, 0.35, 15) if ts is None else ts
    X, T = np.meshgrid(xs, ts)
    ex_u = np.vectorize(lambda x, t: b.exact(x, t)[0])(X, T)
    ex_v = np.vectorize(lambda x, t: b.exact(x, t)[1])(X, T)
    sol = solve(b.spec, max(Ns), beta=1)
    out = {}
    for N in Ns:
        U, V = truncated_compiled(sol, N, 1.0)
        out[N] = float(max(np.abs(U(X, T) - ex_u).max(), np.abs(V(X, T) - ex_v).max()))
    return out


@_timed(3, "truncations converge to the exact solutions at beta = 1", 30.0)
def check_convergence():
    ok, parts, info = True, [], []
    for bid in BENCHMARKS:
        errs = grid_errors(bid, range(2, 13))
        seq = [errs[N] for N in range(2, 9)]
        mono = all(a > b for a, b in zip(seq, seq[1:]))
        ups = [N + 1 for N, (a, b) in zip(range(2, 9), zip(seq, seq[1:])) if b >= a]
        even = [errs[N] for N in range(2, 13, 2)]
        info.append(f"{bid}: " + " ".join(f"N={N}:{errs[N]:.2e}" for N in range(2, 13)))
        info.append(f"{bid}: even-N subsequence decreasing: "
                    f"{all(a > b for a, b in zip(even, even[1:]))}")
        if not mono:
            ok = False
            parts.append(f"{bid} not monotone on N=2..8 (rises at N={ups})")
        if bid == "EX3":
            below = errs[10] < 1e-6
            first = next((N for N in range(2, 13) if errs[N] < 1e-6), None)
            parts.append(f"EX3 N=10 error {errs[10]:.2e} (first below 1e-6 at N={first})")
            ok = ok and below
    return ok, "; ".join(parts), info


TABLE5_ROWS = (0.10, 0.20, 0.35)


@_timed(4, "table 5 reproduction for the clean benchmark", None)
def check_table5():
    b = BENCHMARKS["EX3"]
    refs = [r for r in reference_ae("table5", "ae_beta_1") if r[1] in TABLE5_ROWS]
    cal = calibrate_N(b, refs, threshold=1e-7)
    info = [f"calibrated N={cal.N}, beta=1 deviation {cal.deviation:.2e}"]
    fixture = {(r["variable"], float(r["t"])): r for r in load_fixture("table5")}
    x = float(b.table_x)
    betas = (0.97, 0.98, 0.99)

    def column_dev(N: int, sol, beta: float) -> float:
        worst = 0.0
        for var, idx in (("u", 0), ("v", 1)):
            for t in TABLE5_ROWS:
                ae = abs(truncated_eval(sol, N, x, t, beta)[idx] - b.exact(x, t)[idx])
                worst = max(worst, abs(ae - float(fixture[(var, t)][f"ae_beta_{beta}"])))
        return worst

    sols = {beta: solve(b.spec, cal.N, beta=beta) for beta in betas}
    at_cal = {beta: column_dev(cal.N, sols[beta], beta) for beta in betas}
    info.append("fractional deviation at calibrated N: "
                + ", ".join(f"beta={k}: {v:.2e}" for k, v in at_cal.items()))
    if max(at_cal.values()) < 1e-4:
        return True, f"N={cal.N}; beta=1 dev {cal.deviation:.1e}; fractional columns " \
                     f"within {max(at_cal.values()):.1e}", info

    # no N can match all columns unless it matches the worst one, so scanning
    # that column alone bounds the combined deviation from below
    worst_beta = max(at_cal, key=at_cal.get)
    deep = solve(b.spec, 12, beta=worst_beta)
    best_N, best = min(((N, column_dev(N, deep, worst_beta)) for N in range(2, 13)),
                       key=lambda p: p[1])
    info.append(f"best beta={worst_beta} deviation over N<=12: {best:.2e} at N={best_N}")
    for var in ("u", "v"):
        col = [(t, float(fixture[(var, t)]["ae_beta_0.99"])) for t in TABLE5_ROWS]
        beta, dev = best_beta_for_column(b, cal.N, var, col, (0.9, 0.95, 0.99))
        info.append(f"printed 0.99 column ({var}) best matched by beta={beta} ({dev:.1e})")

    # downgraded property: AE strictly decreasing toward beta = 1
    all_sols = dict(sols)
    all_sols[1.0] = solve(b.spec, cal.N, beta=1)
    broken = []
    for var, idx in (("u", 0), ("v", 1)):
        for t in TABLE5_ROWS:
            ae = [abs(truncated_eval(all_sols[bb], cal.N, x, t, bb)[idx] - b.exact(x, t)[idx])
                  for bb in (0.97, 0.98, 0.99, 1.0)]
            if not all(p > q for p, q in zip(ae, ae[1:])):
                chain = f"{ae[0]:.3e}"
                for p, q in zip(ae, ae[1:]):
                    chain += (" > " if p > q else " <= ") + f"{q:.3e}"
                broken.append(f"{var} t={t}: AE(0.97..1) {chain}")
    detail = (f"N={cal.N}; beta=1 dev {cal.deviation:.1e}; fractional best {best:.1e} > 1e-4, "
              f"downgraded to monotonicity: "
              + ("holds" if not broken else "violated at " + "; ".join(broken)))
    return not broken, detail, info


@_timed(5, "tables 2 and 4 reproduction", None)
def check_tables_2_4():
    ok, parts, info = True, [], []
    ts = [round(0.01 * k, 2) for k in range(1, 36)]
    for tid, bid in (("table2", "EX1"), ("table4", "EX2")):
        b = BENCHMARKS[bid]
        cal = calibrate_N(b, reference_ae(tid, "ae_beta_1"), threshold=1e-6)
        x = float(b.table_x)
        sols = {bb: solve(b.spec, cal.N, beta=bb) for bb in (0.97, 0.98, 0.99, 1.0)}
        ae = {(var, bb, t): abs(truncated_eval(sols[bb], cal.N, x, t, bb)[idx]
                                - b.exact(x, t)[idx])
              for var, idx in (("u", 0), ("v", 1)) for bb in sols for t in ts}
        beta_bad = [(v, t) for v in "uv" for t in ts
                    if not ae[(v, 0.97, t)] > ae[(v, 0.98, t)] > ae[(v, 0.99, t)] > ae[(v, 1.0, t)]]
        t_bad = [(v, bb) for v in "uv" for bb in (0.97, 0.98, 0.99)
                 if not all(ae[(v, bb, p)] < ae[(v, bb, q)]
                            for p, q in zip(ts, ts[1:]) if q <= 0.3)]
        good = not beta_bad and not t_bad
        ok = ok and good
        parts.append(f"{tid}: N={cal.N}, beta=1 dev {cal.deviation:.1e}, "
                     f"beta-monotone {'yes' if not beta_bad else beta_bad[:3]}, "
                     f"t-monotone {'yes' if not t_bad else t_bad}")
    return ok, "; ".join(parts), info


@_timed(6, "table 1 increment trends", 60.0)
def check_table1():
    b = BENCHMARKS["EX1"]
    table = l2_increment_table(b, L2_TS, L2_JS)
    ratios_ok = all(table.l2(0.1, j2) * 10 <= table.l2(0.1, j1)
                    for j1, j2 in zip(L2_JS, L2_JS[1:]))
    t_ok = all(table.l2(t1, j) < table.l2(t2, j)
               for j in L2_JS for t1, t2 in zip(L2_TS, L2_TS[1:]))
    printed = Decimal(load_fixture("table1")[0]["j25"])
    got = table.l2(0.1, 25)
    factor = max(got / printed, printed / got)
    close = factor <= 1000
    detail = (f"decay >=10x per column at t=0.1: {ratios_ok}; increasing in t: {t_ok}; "
              f"j=25,t=0.1 computed {got:.4E} vs printed {printed:.4E} (factor {factor:.2f})")
    grid = l2_increment_table(b, [0.1], [25], norm="grid_l2").l2(0.1, 25)
    info = [f"pointwise sqrt|u_26(x=4, t=0.1)| = {got:.4E}",
            f"grid_l2 over 11 points on [0, 1] = {grid:.4E} (factor {printed / grid:.2E})"]
    return ratios_ok and t_ok and close, detail, info


@_timed(7, "operator identities", 5.0)
def check_operators():
    rng = np.random.default_rng(11)
    samples = random_samples(20, np.random.default_rng(5), x_range=(0.5, 2.0),
                             t_range=(0.05, 1.0), beta_range=(0.1, 1.0))
    bad = []
    for _ in range(10):
        s = random_series(rng, 3)
        m1 = LinExp(Fraction(int(rng.integers(0, 4)), 2), int(rng.integers(0, 2)))
        m2 = LinExp(Fraction(int(rng.integers(1, 4)), 3), int(rng.integers(0, 2)))
        if not equal_numeric(rl_integral(rl_integral(s, m1), m2), rl_integral(s, m1 + m2),
                             samples, 1e-11):
            bad.append("semigroup")
        for order in (FracOrder.beta(), FracOrder.beta_plus_one()):
            if not equal_numeric(caputo(rl_integral(s, order), order), s, samples, 1e-11):
                bad.append("caputo-after-integral")
            if not equal_numeric(composite_fractional_integral(s, order), rl_integral(s, order),
                                 samples, 1e-12):
                bad.append("composite transform")
        poly = Series([Term.make(tm.coeff, tm.xpow, LinExp(int(tm.tpow.a), 0)) for tm in s])
        if aboodh_inverse(aboodh(poly)) != poly:
            bad.append("aboodh round trip")
    # Caputo order beta -> 1 approaches the first t-derivative
    s = Series.monomial(1, 0, LinExp(Fraction(5, 2), 0)) + Series.monomial(3, 1, LinExp(4, 0))
    target = eval_series(diff_t(s), 1.3, 0.7, 1.0)
    errs = [abs(eval_series(caputo(s, FracOrder.beta()), 1.3, 0.7, 1 - eps) - target)
            for eps in (1e-1, 1e-2, 1e-3, 1e-4)]
    if not all(a > b for a, b in zip(errs, errs[1:])):
        bad.append("beta->1 limit")
    grid = np.linspace(-2, 2, 81)
    ml = max(abs(mittag_leffler(1.0, float(z)) - math.exp(z)) for z in grid)
    if ml > 1e-12:
        bad.append(f"E_1 vs exp ({ml:.1e})")
    detail = ("semigroup, Caputo o J, composite path, Aboodh round trip, beta->1 limit "
              f"(errors {', '.join(f'{e:.1e}' for e in errs)}), E_1 = exp (max {ml:.1e})")
    return not bad, detail + (f"; failed: {sorted(set(bad))}" if bad else ""), []


PROBES = (np.random.default_rng(0).uniform(1.0, 4.0, 10),
          np.random.default_rng(1).uniform(0.05, 0.35, 10))


@_timed(8, "manufactured-solution residuals", 10.0)
def check_residuals():
    bad, info = [], []
    for bid, b in BENCHMARKS.items():
        ru, rv = b.exact_residual()
        if ru or rv:
            bad.append(f"{bid} exact residual not empty")
    X, T = PROBES
    for bid, b in BENCHMARKS.items():
        for beta in (0.7, 1.0):
            sol = solve(b.spec, 6, beta=beta)
            worst = []
            for N in range(1, 7):
                ru, rv = residual_grid(b.spec, sol, N, X, T, beta)
                worst.append(float(max(ru.max(), rv.max())))
            info.append(f"{bid} beta={beta}: " + " ".join(f"{w:.2e}" for w in worst))
            if not all(worst[-1] < w for w in worst[:-1]):
                bad.append(f"{bid} beta={beta}")
    detail = "exact residuals empty; N=6 residual below every shorter truncation"
    return not bad, detail if not bad else f"failed: {bad}", info


CHECKS = (check_adomian_oracle, check_printed_components, check_convergence, check_table5,
          check_tables_2_4, check_table1, check_operators, check_residuals)


def run_all(selected: set[int] | None = None) -> list[CheckResult]:
    out = []
    for i, check in enumerate(CHECKS, start=1):
        if selected is None or i in selected:
            out.append(check())
    return out
