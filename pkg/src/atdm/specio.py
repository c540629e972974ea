"""JSON problem files.

A problem file mirrors :class:`~atdm.engine.ProblemSpec`.  Series literals are
either the canonical text form (``"1 * x^2 * t^(1)"``) or a list of term
objects::

    {"coeff": "p/q", "xpow": 2, "tpow": {"a": "1", "b": "0"},
     "gnum": ["1+1*B"], "gden": ["2+2*B"]}

Linear terms are ``{"var", "coeff", "dx", "dt", "singular_form"}``;
nonlinearities are ``{"outer": form, "products": [{"scale", "factors":
[{"var", "dx", "dt"}, ...]}]}``.  Benchmark files may add ``exact_u``,
``exact_v`` and ``table_x``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .adomian import DerivFactor, NonlinearitySpec, Product
from .engine import LinearTermSpec, ProblemSpec
from .errors import SpecParseError
from .fracseries import ZERO_SERIES, Series, Term, collect, parse_text
from .specfun import LinExp

SERIES_FIELDS = ("f0", "f1", "g0", "source_u", "source_v")


def _fraction(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SpecParseError(f"{where}: expected an integer or a 'p/q' string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecParseError(f"{where}: bad rational {value!r}") from exc


def _linexp(value: Any, where: str) -> LinExp:
    if isinstance(value, dict):
        return LinExp(_fraction(value.get("a", 0), where), _fraction(value.get("b", 0), where))
    if isinstance(value, str):
        try:
            return LinExp.parse(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecParseError(f"{where}: bad exponent {value!r}") from exc
    if isinstance(value, int) and not isinstance(value, bool):
        return LinExp(value, 0)
    raise SpecParseError(f"{where}: bad exponent {value!r}")


def series_from_json(value: Any, where: str = "series") -> Series:
    if value is None:
        return ZERO_SERIES
    if isinstance(value, str):
        return parse_text(value)
    if not isinstance(value, list):
        raise SpecParseError(f"{where}: expected a list of terms or a text literal")
    terms = []
    for i, item in enumerate(value):
        loc = f"{where}[{i}]"
        if not isinstance(item, dict) or "coeff" not in item:
            raise SpecParseError(f"{loc}: term objects need a 'coeff' field")
        xpow = item.get("xpow", 0)
        if isinstance(xpow, bool) or not isinstance(xpow, int):
            raise SpecParseError(f"{loc}: xpow must be an integer")
        terms.append(Term.make(
            _fraction(item["coeff"], loc), xpow,
            _linexp(item.get("tpow", 0), loc),
            tuple(_linexp(g, loc) for g in item.get("gnum", ())),
            tuple(_linexp(g, loc) for g in item.get("gden", ())),
        ))
    return collect(Series(terms))


def series_to_json(s: Series) -> list[dict]:
    out = []
    for tm in collect(s).terms:
        item: dict[str, Any] = {
            "coeff": str(tm.coeff),
            "xpow": tm.xpow,
            "tpow": {"a": str(tm.tpow.a), "b": str(tm.tpow.b)},
        }
        if tm.gnum:
            item["gnum"] = [str(g) for g in tm.gnum]
        if tm.gden:
            item["gden"] = [str(g) for g in tm.gden]
        out.append(item)
    return out


def _linear_terms(items: Any, where: str) -> tuple[LinearTermSpec, ...]:
    if not isinstance(items, list):
        raise SpecParseError(f"{where}: expected a list")
    out = []
    for i, item in enumerate(items):
        loc = f"{where}[{i}]"
        try:
            out.append(LinearTermSpec(
                var=item["var"],
                coeff=series_from_json(item.get("coeff", "1"), f"{loc}.coeff"),
                dx=item.get("dx", 0),
                dt=item.get("dt", 0),
                singular_form=item.get("singular_form", "none"),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecParseError(f"{loc}: {exc}") from exc
    return tuple(out)


def _nonlinearity(obj: Any, where: str) -> tuple[NonlinearitySpec, str]:
    if obj is None:
        return NonlinearitySpec(), "none"
    if not isinstance(obj, dict):
        raise SpecParseError(f"{where}: expected an object")
    try:
        products = tuple(
            Product(_fraction(p.get("scale", 1), where),
                    tuple(DerivFactor(f["var"], f.get("dx", 0), f.get("dt", 0))
                          for f in p["factors"]))
            for p in obj.get("products", ())
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecParseError(f"{where}: {exc}") from exc
    return NonlinearitySpec(products), obj.get("outer", "none")


def problem_from_dict(d: dict) -> ProblemSpec:
    if not isinstance(d, dict):
        raise SpecParseError("a problem file must hold a JSON object")
    series = {k: series_from_json(d.get(k), k) for k in SERIES_FIELDS}
    nl_u, outer_u = _nonlinearity(d.get("nonlinear_u"), "nonlinear_u")
    nl_v, outer_v = _nonlinearity(d.get("nonlinear_v"), "nonlinear_v")
    try:
        return ProblemSpec(
            name=str(d.get("name", "problem")),
            linear_u=_linear_terms(d.get("linear_u", []), "linear_u"),
            linear_v=_linear_terms(d.get("linear_v", []), "linear_v"),
            nonlinear_u=nl_u, nonlinear_v=nl_v,
            nonlinear_u_outer=outer_u, nonlinear_v_outer=outer_v,
            source_placement=d.get("source_placement", "in_w1"),
            **series,
        )
    except ValueError as exc:
        raise SpecParseError(str(exc)) from exc


def _nonlinearity_to_dict(spec: NonlinearitySpec, outer: str) -> dict | None:
    if not spec:
        return None
    return {
        "outer": outer,
        "products": [
            {"scale": str(p.scale),
             "factors": [{"var": f.var, "dx": f.dx, "dt": f.dt} for f in p.factors]}
            for p in spec.products
        ],
    }


def problem_to_dict(spec: ProblemSpec) -> dict:
    d: dict[str, Any] = {"name": spec.name, "source_placement": spec.source_placement}
    for k in SERIES_FIELDS:
        d[k] = series_to_json(getattr(spec, k))
    for k in ("linear_u", "linear_v"):
        d[k] = [
            {"var": t.var, "coeff": series_to_json(t.coeff), "dx": t.dx, "dt": t.dt,
             "singular_form": t.singular_form}
            for t in getattr(spec, k)
        ]
    d["nonlinear_u"] = _nonlinearity_to_dict(spec.nonlinear_u, spec.nonlinear_u_outer)
    d["nonlinear_v"] = _nonlinearity_to_dict(spec.nonlinear_v, spec.nonlinear_v_outer)
    return d


def load_problem(path: str | Path) -> tuple[ProblemSpec, dict]:
    """Read a problem file; returns the spec and the raw mapping (for extras)."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path}: invalid JSON ({exc})") from exc
    return problem_from_dict(raw), raw


def dump_problem(spec: ProblemSpec, **extra) -> str:
    d = problem_to_dict(spec)
    d.update(extra)
    return json.dumps(d, indent=2) + "\n"
