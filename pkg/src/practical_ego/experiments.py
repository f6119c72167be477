"""Experiment configs, macro-replication, aggregation and the EI-grid and bound-sweep drivers."""
from __future__ import annotations

import csv
import dataclasses
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .acquisition import ei_batch
from .benchmarks import SYNTHETIC, BenchmarkSpec, get_benchmark, make_gp_benchmark
from .bounds import MigConstants, SweepResult, sweep_nugget
from .ego import RunConfig, RunTrace, latin_hypercube, run_practical_ego
from .gp import DEFAULT_LENGTH_SCALE_GRID, fit, select_length_scale
from .kernels import KernelParams

GP_BENCHMARK = "gp"


@dataclass
class ExperimentConfig:
    """Everything needed to rerun a macro-replicated benchmark.

    ``benchmark`` is a synthetic name or ``"gp"`` for GP-sampled objectives,
    in which case ``kernel``, ``nu``, ``length_scale`` and ``dim`` describe
    the sampled path and the (fixed) model kernel. Replication ``i`` uses
    seed ``seed + i``.
    """

    benchmark: str = "branin"
    eps: list[float] = field(default_factory=lambda: [1e-2, 1e-4, 1e-6])
    reps: int = 20
    seed: int = 0
    n_init: int | None = None
    n_iter: int | None = None
    kernel: str | None = None
    nu: float = 2.5
    length_scale: float = 0.2
    dim: int = 2
    # None means: select by evidence for synthetic, keep fixed for GP samples
    select_length_scale: bool | None = None
    # None means: standardize y for synthetic, raw values for GP samples
    normalize_y: bool | None = None
    acq_budget: int | None = None
    probes_per_dim: int = 1024
    checkpoints: list[int] = field(default_factory=lambda: [1, 50, 100, 200])
    out: str = "results"
    workers: int = 1

    def __post_init__(self):
        self.eps = [float(e) for e in self.eps]
        if self.benchmark != GP_BENCHMARK and self.benchmark not in SYNTHETIC:
            raise ValueError(f"unknown benchmark {self.benchmark!r}")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not self.eps or any(not e > 0 for e in self.eps):
            raise ValueError("eps list must be nonempty and positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if any(c < 1 or c > self.horizon for c in self.checkpoints):
            raise ValueError(f"checkpoints must lie in [1, {self.horizon}]")

    @property
    def is_gp(self) -> bool:
        return self.benchmark == GP_BENCHMARK

    @property
    def horizon(self) -> int:
        if self.n_iter is not None:
            return self.n_iter
        return 200 if self.is_gp else SYNTHETIC[self.benchmark]["n_iter"]

    @property
    def kernel_params(self) -> KernelParams:
        if self.kernel is None:
            if self.is_gp:
                return KernelParams("se", self.length_scale)
            return SYNTHETIC[self.benchmark]["kernel"]
        if self.kernel == "se":
            return KernelParams("se", self.length_scale)
        return KernelParams("matern", self.length_scale, self.nu)

    @property
    def label(self) -> str:
        if self.is_gp:
            return f"gp_{self.kernel_params.family}_{self.dim}d"
        return self.benchmark

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _gp_preset(kernel: str, dim: int) -> ExperimentConfig:
    return ExperimentConfig(benchmark=GP_BENCHMARK, kernel=kernel, dim=dim,
                            eps=[1e-10, 1e-6, 1e-4], reps=20, n_init=20 if dim == 2 else 40,
                            n_iter=200)


PRESETS: dict[str, ExperimentConfig] = {
    "gp-2d-se": _gp_preset("se", 2),
    "gp-2d-matern": _gp_preset("matern", 2),
    "gp-4d-se": _gp_preset("se", 4),
    "gp-4d-matern": _gp_preset("matern", 4),
    **{
        name: ExperimentConfig(benchmark=name, reps=100,
                               checkpoints=[1, 50, 100] if e["n_iter"] == 100 else [1, 50, 100, 200])
        for name, e in SYNTHETIC.items()
    },
}


def preset(name: str, **overrides) -> ExperimentConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return dataclasses.replace(base, **overrides)


def build_benchmark(cfg: ExperimentConfig, rep: int) -> BenchmarkSpec:
    if cfg.is_gp:
        return make_gp_benchmark(cfg.kernel_params, cfg.length_scale, cfg.dim,
                                 seed=cfg.seed + rep, probes_per_dim=cfg.probes_per_dim)
    return get_benchmark(cfg.benchmark)


def run_config_for(cfg: ExperimentConfig, bench: BenchmarkSpec, eps: float, rep: int) -> RunConfig:
    select = (not cfg.is_gp) if cfg.select_length_scale is None else cfg.select_length_scale
    normalize = (not cfg.is_gp) if cfg.normalize_y is None else cfg.normalize_y
    kernel = cfg.kernel_params if cfg.is_gp or cfg.kernel is not None else bench.kernel
    return RunConfig(
        objective=bench,
        bounds=bench.bounds,
        n_init=cfg.n_init if cfg.n_init is not None else bench.n_init,
        n_iter=cfg.horizon,
        nugget=eps,
        kernel=kernel,
        length_scale_grid=DEFAULT_LENGTH_SCALE_GRID if select else None,
        normalize_y=normalize,
        seed=cfg.seed + rep,
        f_star=bench.f_star,
        acq_budget=cfg.acq_budget,
    )


def run_replication(cfg: ExperimentConfig, rep: int) -> dict[float, RunTrace]:
    """One run per nugget, all on the same objective.

    A GP-sampled objective is a single lazily revealed path shared by the
    nugget runs, which execute in ``cfg.eps`` order so results stay
    deterministic.
    """
    bench = build_benchmark(cfg, rep)
    out = {}
    for eps in cfg.eps:
        out[eps] = run_practical_ego(run_config_for(cfg, bench, eps, rep))
    return out


def _avg_regret_only(args) -> dict[float, np.ndarray]:
    cfg, rep = args
    return {eps: tr.avg_regret for eps, tr in run_replication(cfg, rep).items()}


def run_experiment(cfg: ExperimentConfig) -> dict[float, np.ndarray]:
    """Average-regret curves stacked to shape (reps, T) per nugget, in replication order."""
    jobs = [(cfg, rep) for rep in range(cfg.reps)]
    if cfg.workers == 1:
        results = [_avg_regret_only(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_avg_regret_only, jobs))
    return {eps: np.vstack([r[eps] for r in results]) for eps in cfg.eps}


@dataclass(frozen=True)
class AggregateRow:
    benchmark: str
    d: int
    kernel: str
    eps: float
    t: int
    mean: float
    median: float
    p25: float
    p75: float


@dataclass
class AggregateReport:
    rows: list[AggregateRow] = field(default_factory=list)

    @classmethod
    def from_curves(cls, cfg: ExperimentConfig, curves: dict[float, np.ndarray],
                    d: int, kernel: str) -> "AggregateReport":
        rows = []
        for eps, A in curves.items():
            for t in cfg.checkpoints:
                col = A[:, t - 1]
                p25, med, p75 = np.percentile(col, [25, 50, 75])
                rows.append(AggregateRow(cfg.label, d, kernel, eps, t, float(col.mean()),
                                         float(med), float(p25), float(p75)))
        return cls(rows)

    def cell(self, eps: float, t: int) -> AggregateRow:
        for r in self.rows:
            if r.eps == eps and r.t == t:
                return r
        raise KeyError((eps, t))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["benchmark", "d", "kernel", "epsilon", "t", "mean", "median", "p25", "p75"])
            for r in self.rows:
                w.writerow([r.benchmark, r.d, r.kernel, repr(r.eps), r.t,
                            repr(r.mean), repr(r.median), repr(r.p25), repr(r.p75)])

    @classmethod
    def read_csv(cls, path) -> "AggregateReport":
        with open(path, newline="") as fh:
            rows = [AggregateRow(d["benchmark"], int(d["d"]), d["kernel"], float(d["epsilon"]),
                                 int(d["t"]), float(d["mean"]), float(d["median"]),
                                 float(d["p25"]), float(d["p75"]))
                    for d in csv.DictReader(fh)]
        return cls(rows)

    def format_table(self, stat: str = "mean") -> str:
        """Rows (d, kernel, eps), one column per checkpoint."""
        ts = sorted({r.t for r in self.rows})
        keys = list(dict.fromkeys((r.d, r.kernel, r.eps) for r in self.rows))
        head = ["d", "kernel", "eps", *[f"t={t}" for t in ts]]
        lines = [" ".join(f"{h:>9}" for h in head)]
        for d, k, e in keys:
            vals = {r.t: getattr(r, stat) for r in self.rows if (r.d, r.kernel, r.eps) == (d, k, e)}
            cells = [str(d), k, f"{e:.0e}", *[f"{vals[t]:.3f}" for t in ts]]
            lines.append(" ".join(f"{c:>9}" for c in cells))
        return "\n".join(lines)


def bench(cfg: ExperimentConfig) -> AggregateReport:
    curves = run_experiment(cfg)
    bench0 = build_benchmark(cfg, 0) if not cfg.is_gp else None
    d = cfg.dim if cfg.is_gp else bench0.dim
    family = cfg.kernel_params.family if cfg.is_gp or cfg.kernel else bench0.kernel.family
    return AggregateReport.from_curves(cfg, curves, d, family)


# bound sweeps


def bound_sweep(kernel: str, T_list, eps_grid, B: float = 1.0,
                constants: MigConstants | None = None) -> SweepResult:
    mc = constants or (MigConstants(d=2) if kernel == "se" else MigConstants(d=3, nu=2.5))
    return sweep_nugget(kernel, T_list, eps_grid, B, mc)


def sweep_svg(result: SweepResult, width: int = 640, height: int = 400) -> str:
    """Minimal log-log polyline chart of u_T against eps, one line per T."""
    pad = 50
    Ts = sorted({r.T for r in result.rows})
    xs = [math.log10(r.eps) for r in result.rows]
    ys = [math.log10(r.u_T) for r in result.rows]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
             'fill="none" stroke="#999"/>',
             f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle">log10 eps</text>',
             f'<text x="14" y="{height / 2}" transform="rotate(-90 14 {height / 2})" '
             'text-anchor="middle">log10 u_T</text>']
    for i, T in enumerate(Ts):
        pts = " ".join(f"{pad + (math.log10(r.eps) - x0) * sx:.1f},"
                       f"{height - pad - (math.log10(r.u_T) - y0) * sy:.1f}"
                       for r in result.for_T(T))
        c = colors[i % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{c}" points="{pts}"/>')
        parts.append(f'<text x="{width - pad + 4}" y="{pad + 16 * (i + 1)}" fill="{c}" '
                     f'font-size="11">T={T:g}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


# EI grids


@dataclass
class EiGridResult:
    eps: list[float]
    grid: np.ndarray  # (r*r, 2) in original coordinates
    values: dict[float, np.ndarray]
    X: np.ndarray
    y: np.ndarray

    @property
    def maxima(self) -> dict[float, float]:
        return {e: float(v.max()) for e, v in self.values.items()}

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x_1", "x_2", *[f"ei_{e!r}" for e in self.eps]])
            for i, g in enumerate(self.grid):
                w.writerow([repr(float(g[0])), repr(float(g[1])),
                            *(repr(float(self.values[e][i])) for e in self.eps)])


def ei_sample_set(bench: BenchmarkSpec, source: str, seed: int, n_init: int = 25,
                  n_steps: int = 25, reference_eps: float = 1e-6,
                  n_random: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Sample set for EI contours: LHS plus EGO steps, or purely random points.

    The EGO steps model raw y, the same model :func:`ei_grid` refits, so the
    contours show the surrogate that actually placed the samples.
    """
    if source == "ego":
        tr = run_practical_ego(RunConfig(
            bench, bench.bounds, n_init=n_init, n_iter=n_steps, nugget=reference_eps,
            kernel=bench.kernel, length_scale_grid=DEFAULT_LENGTH_SCALE_GRID, normalize_y=False,
            seed=seed, f_star=bench.f_star))
        return tr.X_all, np.concatenate([tr.y_init, tr.y])
    if source == "random":
        rng = np.random.default_rng(seed)
        lo, hi = bench.bounds[:, 0], bench.bounds[:, 1]
        X = lo + rng.random((n_random, bench.dim)) * (hi - lo)
        return X, np.array([bench(x) for x in X])
    if source == "lhs":
        X = latin_hypercube(n_random, bench.bounds, np.random.default_rng(seed))
        return X, np.array([bench(x) for x in X])
    raise ValueError(f"unknown sample source {source!r}")


def ei_grid(bench: BenchmarkSpec, X: np.ndarray, y: np.ndarray, eps_list, resolution: int = 200,
            select: bool = True) -> EiGridResult:
    """Refit the GP at each nugget on the same samples and evaluate EI on a uniform grid.

    A resolution of 1 gives the single box centre.
    """
    if bench.dim != 2:
        raise ValueError("EI grids need a 2-D benchmark")
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    lo, hi = bench.bounds[:, 0], bench.bounds[:, 1]
    g = np.array([0.5]) if resolution == 1 else np.linspace(0.0, 1.0, resolution)
    G = np.array(np.meshgrid(g, g, indexing="ij")).reshape(2, -1).T
    U = (X - lo) / (hi - lo)
    values = {}
    for eps in eps_list:
        params = (select_length_scale(U, y, bench.kernel, eps, DEFAULT_LENGTH_SCALE_GRID)
                  if select else bench.kernel)
        model = fit(U, y, params, eps)
        values[float(eps)] = ei_batch(model, float(y.min()), G)
    return EiGridResult([float(e) for e in eps_list], lo + G * (hi - lo), values, X, y)
