"""Command-line entry point: ``atdm {solve,table,components,residual,verify}``.

Exit codes: 0 success, 2 configuration error, 3 computation error,
4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import benchmarks as bm
from .engine import ProblemSpec, components_text, residual_grid, solve, truncated_compiled
from .errors import ATDMError, SpecParseError
from .specio import load_problem

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_VERIFY = 0, 2, 3, 4


class ConfigError(Exception):
    pass


@dataclass
class Grid:
    x_min: float = 1.0
    x_max: float = 4.0
    x_steps: int = 6
    t_min: float = 0.0
    t_max: float = 0.35
    t_steps: int = 7

    def __post_init__(self):
        if self.x_steps < 1 or self.t_steps < 1:
            raise ConfigError("grid steps must be at least 1")

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.linspace(self.x_min, self.x_max, self.x_steps + 1)
        ts = np.linspace(self.t_min, self.t_max, self.t_steps + 1)
        X, T = np.meshgrid(xs, ts, indexing="ij")
        return X.ravel(), T.ravel()


@dataclass
class RunConfig:
    command: str
    problem: str = "ex3"
    beta_list: list[float] = field(default_factory=lambda: [1.0])
    n_components: int = 4
    grid: Grid = field(default_factory=Grid)
    output: str | None = None
    format: str = "csv"
    table_id: str | None = None
    workers: int = 1

    def __post_init__(self):
        for b in self.beta_list:
            if not 0 < b <= 1:
                raise ConfigError(f"beta={b} is outside (0, 1]")
        if self.n_components < 0:
            raise ConfigError("--n must be nonnegative")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")


def resolve_problem(name: str) -> ProblemSpec:
    """Builtin id (ex1, ex2, ex3) or a path to a problem file."""
    if name.upper() in bm.BENCHMARKS:
        return bm.BENCHMARKS[name.upper()].spec
    path = Path(name)
    if not path.exists():
        raise ConfigError(f"no builtin problem or file named {name!r}")
    spec, _ = load_problem(path)
    return spec


def _workers(flag: int | None) -> int:
    env = os.environ.get("ATDM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"ATDM_THREADS must be an integer, got {env!r}") from exc
    return max(1, flag or 1)


def _f10(v: float) -> str:
    return f"{v:.10f}"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _grid_records(header: list[str], rows: list[list[float]], cfg: RunConfig, meta: dict) -> str:
    if cfg.format == "json":
        return json.dumps({"metadata": meta,
                           "rows": [dict(zip(header, r)) for r in rows]},
                          indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_f10(v) for v in r])
    return buf.getvalue()


def cmd_solve(cfg: RunConfig) -> int:
    spec = resolve_problem(cfg.problem)
    N = cfg.n_components + 1
    X, T = cfg.grid.points()
    rows = []
    for beta in cfg.beta_list:
        sol = solve(spec, N, beta=beta)
        U, V = truncated_compiled(sol, N, beta)
        for x, t, u, v in zip(X, T, U(X, T), V(X, T)):
            rows.append([beta, x, t, u, v])
    meta = {"problem": spec.name, "n": cfg.n_components, "components": N}
    _emit(cfg, _grid_records(["beta", "x", "t", "u", "v"], rows, cfg, meta))
    return EXIT_OK


def cmd_residual(cfg: RunConfig) -> int:
    spec = resolve_problem(cfg.problem)
    N = cfg.n_components + 1
    X, T = cfg.grid.points()
    rows = []
    for beta in cfg.beta_list:
        sol = solve(spec, N, beta=beta)
        ru, rv = residual_grid(spec, sol, N, X, T, beta)
        for x, t, a, b in zip(X, T, ru, rv):
            rows.append([beta, x, t, a, b])
    meta = {"problem": spec.name, "n": cfg.n_components, "components": N}
    _emit(cfg, _grid_records(["beta", "x", "t", "residual_u", "residual_v"], rows, cfg, meta))
    return EXIT_OK


def cmd_components(cfg: RunConfig) -> int:
    spec = resolve_problem(cfg.problem)
    sol = solve(spec, cfg.n_components + 1)
    _emit(cfg, components_text(sol))
    return EXIT_OK


def cmd_table(cfg: RunConfig) -> int:
    if cfg.table_id not in bm.TABLE_IDS:
        raise ConfigError(f"--id must be one of {', '.join(bm.TABLE_IDS)}")
    table = bm.regenerate(cfg.table_id, workers=cfg.workers)
    table.metadata["table"] = cfg.table_id
    _emit(cfg, bm.to_json(table) if cfg.format == "json" else bm.to_csv(table))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from .acceptance import run_all

    results = run_all()
    for r in results:
        print(r.line())
    passed = sum(r.ok for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_VERIFY


COMMANDS = {"solve": cmd_solve, "table": cmd_table, "components": cmd_components,
            "residual": cmd_residual, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atdm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid: bool = True):
        sp.add_argument("--problem", default="ex3", help="ex1, ex2, ex3 or a JSON problem file")
        sp.add_argument("--n", type=int, default=4, dest="n",
                        help="highest component index (components 0..n are used)")
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", default="csv", choices=("csv", "json"))
        if grid:
            sp.add_argument("--beta", type=float, nargs="+", default=[1.0])
            g = Grid()
            for name in ("x_min", "x_max", "t_min", "t_max"):
                sp.add_argument("--" + name.replace("_", "-"), type=float,
                                default=getattr(g, name))
            for name in ("x_steps", "t_steps"):
                sp.add_argument("--" + name.replace("_", "-"), type=int,
                                default=getattr(g, name))

    common(sub.add_parser("solve", help="evaluate truncated solutions on a grid"))
    common(sub.add_parser("residual", help="equation residuals of the truncation on a grid"))
    common(sub.add_parser("components", help="dump u_j and v_j in canonical text"), grid=False)
    t = sub.add_parser("table", help="regenerate a reference table")
    t.add_argument("--id", required=True, dest="table_id")
    t.add_argument("--out", default=None)
    t.add_argument("--format", default="csv", choices=("csv", "json"))
    t.add_argument("--workers", type=int, default=1)
    sub.add_parser("verify", help="run the acceptance checks")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {"command": ns.command}
    if hasattr(ns, "problem"):
        kw.update(problem=ns.problem, n_components=ns.n)
    if hasattr(ns, "beta"):
        kw["beta_list"] = ns.beta
        kw["grid"] = Grid(ns.x_min, ns.x_max, ns.x_steps, ns.t_min, ns.t_max, ns.t_steps)
    for name, attr in (("output", "out"), ("format", "format"), ("table_id", "table_id")):
        if hasattr(ns, attr):
            kw[name] = getattr(ns, attr)
    kw["workers"] = _workers(getattr(ns, "workers", None))
    return RunConfig(**kw)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, SpecParseError) as exc:
        print(f"error: configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ATDMError, ArithmeticError, ValueError) as exc:
        print(f"error: computation: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
