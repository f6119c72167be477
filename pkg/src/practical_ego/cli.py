"""Command-line front end: ``practical-ego {run,bench,bounds,ei-grid}``.

Exit codes: 0 on success, 2 on usage errors, 1 on numerical failures.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .benchmarks import get_benchmark
from .bounds import MigConstants
from .ego import ObjectiveError, run_practical_ego
from .experiments import (
    PRESETS,
    ExperimentConfig,
    bench,
    bound_sweep,
    build_benchmark,
    ei_grid,
    ei_sample_set,
    preset,
    run_config_for,
    sweep_svg,
)
from .gp import IllConditionedError
from .special_math import DomainError


class UsageError(Exception):
    pass


def _eps_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}") from exc
    return vals


def _load_config(args) -> ExperimentConfig:
    if args.config is None and args.preset is None:
        raise UsageError("give --config or --preset")
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise UsageError(f"config file {path} not found")
        try:
            cfg = ExperimentConfig.from_json(path)
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad config {path}: {exc}") from exc
    else:
        try:
            cfg = preset(args.preset)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.eps is not None:
        overrides["eps"] = args.eps
    if getattr(args, "reps", None) is not None:
        overrides["reps"] = args.reps
    if args.out is not None:
        overrides["out"] = args.out
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    try:
        return dataclasses.replace(cfg, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_run(args) -> int:
    cfg = _load_config(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    b = build_benchmark(cfg, 0)
    for eps in cfg.eps:
        tr = run_practical_ego(run_config_for(cfg, b, eps, 0))
        path = out / f"trace_{cfg.label}_eps{eps:g}_seed{cfg.seed}.csv"
        tr.write_csv(path)
        print(f"{path}: T={tr.T} f_plus={tr.f_plus[-1]:.6g} R_T/T={tr.avg_regret[-1]:.6g}")
        for w in tr.warnings:
            print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    cfg = _load_config(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    report = bench(cfg)
    path = out / f"aggregate_{cfg.label}.csv"
    report.write_csv(path)
    (out / f"config_{cfg.label}.json").write_text(cfg.to_json())
    print(report.format_table())
    print(f"wrote {path}")
    return 0


def cmd_bounds(args) -> int:
    if not args.eps:
        raise UsageError("empty eps grid")
    consts = {}
    if args.constants:
        p = Path(args.constants)
        if not p.exists():
            raise UsageError(f"constants file {p} not found")
        consts = json.loads(p.read_text())
    B = float(consts.pop("B", args.B))
    default_d = 2 if args.kernel == "se" else 3
    try:
        mc = MigConstants(**{"d": default_d, **consts})
    except TypeError as exc:
        raise UsageError(f"bad constants: {exc}") from exc
    result = bound_sweep(args.kernel, args.T, sorted(args.eps), B, mc)
    out = Path(args.out or "results")
    out.mkdir(parents=True, exist_ok=True)
    result.write_csv(out / f"sweep_{args.kernel}.csv")
    (out / f"sweep_{args.kernel}.svg").write_text(sweep_svg(result))
    print(f"wrote {len(result.rows)} rows to {out / f'sweep_{args.kernel}.csv'}")
    return 0


def cmd_ei_grid(args) -> int:
    try:
        b = get_benchmark(args.benchmark)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    if b.dim != 2:
        raise UsageError("ei-grid needs a 2-D benchmark")
    eps = args.eps or [1e-10, 1e-6, 1e-2]
    seed = args.seed or 0
    X, y = ei_sample_set(b, args.source, seed)
    res = ei_grid(b, X, y, eps, args.resolution)
    out = Path(args.out or "results")
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"ei_grid_{b.name}_{args.source}_seed{seed}.csv"
    res.write_csv(path)
    for e, m in res.maxima.items():
        print(f"eps={e:g} max EI={m:.6g}")
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="practical-ego", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, reps=True):
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--preset", help=f"one of {', '.join(sorted(PRESETS))}")
        p.add_argument("--seed", type=int)
        p.add_argument("--eps", type=_eps_list, help="comma-separated nugget values")
        p.add_argument("--out", help="output directory")
        if reps:
            p.add_argument("--reps", type=int)
            p.add_argument("--workers", type=int)

    p = sub.add_parser("run", help="single run per nugget, trace CSVs")
    common(p, reps=False)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="macro-replicated benchmark, aggregate CSV and table")
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bounds", help="regret-bound sweep over the nugget")
    p.add_argument("--kernel", choices=["se", "matern"], default="se")
    p.add_argument("--T", type=float, nargs="+", default=[1e2, 1e4, 1e6])
    p.add_argument("--eps", type=_eps_list, default=list(np.logspace(-12, 2, 141)))
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--constants", help="JSON file of bound constants")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("ei-grid", help="EI over a grid for several nuggets")
    p.add_argument("--benchmark", default="branin")
    p.add_argument("--source", choices=["ego", "random", "lhs"], default="ego")
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--eps", type=_eps_list)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ei_grid)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (IllConditionedError, ObjectiveError, DomainError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
