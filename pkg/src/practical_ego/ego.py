"""The practical EGO loop: initial design, then choose / observe / refit."""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .acquisition import Incumbent, maximize_acquisition
from .gp import DEFAULT_NUGGET, IllConditionedError, fit, select_length_scale
from .kernels import KernelParams


class ObjectiveError(ValueError):
    """The objective returned a non-finite value."""

    def __init__(self, x, value):
        self.x = np.asarray(x)
        self.value = value
        super().__init__(f"objective returned {value!r} at x={self.x.tolist()}")


def latin_hypercube(n: int, box, rng: np.random.Generator) -> np.ndarray:
    """One point per stratum along every axis, strata paired by random permutations."""
    if n < 1:
        raise ValueError("need at least one point")
    box = np.asarray(box, dtype=float)
    d = box.shape[0]
    U = np.empty((n, d))
    for j in range(d):
        U[:, j] = (rng.permutation(n) + rng.random(n)) / n
    return box[:, 0] + U * (box[:, 1] - box[:, 0])


@dataclass
class RunConfig:
    objective: Callable[[np.ndarray], float]
    bounds: np.ndarray
    n_init: int = 5
    n_iter: int = 50
    nugget: float = DEFAULT_NUGGET
    kernel: KernelParams = field(default_factory=KernelParams)
    # None keeps kernel.length_scale fixed
    length_scale_grid: Sequence[float] | None = None
    refit_every_iteration: bool = True
    normalize_y: bool = False
    seed: int = 0
    # None: regret is measured against the best value seen in the run
    f_star: float | None = None
    acq_budget: int | None = None
    initial_design: str = "lhs"

    def __post_init__(self):
        self.bounds = np.atleast_2d(np.asarray(self.bounds, dtype=float))
        if self.bounds.shape[1] != 2 or np.any(self.bounds[:, 0] >= self.bounds[:, 1]):
            raise ValueError("bounds must be (d, 2) with lo < hi")
        if self.n_init < 1 or self.n_iter < 1:
            raise ValueError("n_init and n_iter must be at least 1")
        if not self.nugget > 0:
            raise ValueError("nugget must be positive")
        if self.initial_design not in ("lhs", "random"):
            raise ValueError(f"unknown initial design {self.initial_design!r}")

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]


@dataclass
class RunTrace:
    X_init: np.ndarray
    y_init: np.ndarray
    X: np.ndarray
    y: np.ndarray
    f_plus: np.ndarray
    sigma_prev: np.ndarray
    ei_max: np.ndarray
    length_scales: np.ndarray
    f_star: float
    nugget: float
    r: np.ndarray = field(init=False)
    R: np.ndarray = field(init=False)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.f_star is None:
            self.f_star = float(min(self.y.min(), self.y_init.min()))
            self.warnings.append("f_star unknown; regret measured against the best observed value")
        self.r, self.R, _ = regret_series(self, self.f_star)

    @property
    def T(self) -> int:
        return self.y.shape[0]

    @property
    def f_plus_prev(self) -> np.ndarray:
        """f_{t-1}^+ for t = 1..T (the first entry is the initial-design best)."""
        return np.concatenate([[self.y_init.min()], self.f_plus[:-1]])

    @property
    def avg_regret(self) -> np.ndarray:
        return self.R / np.arange(1, self.T + 1)

    @property
    def X_all(self) -> np.ndarray:
        return np.vstack([self.X_init, self.X])

    def write_csv(self, path) -> None:
        d = self.X.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", *[f"x_{j + 1}" for j in range(d)],
                        "f", "f_plus", "sigma_prev", "ei_max", "r", "R"])
            for t in range(self.T):
                w.writerow([t + 1, *map(repr, self.X[t].tolist()),
                            *(repr(float(v[t])) for v in
                              (self.y, self.f_plus, self.sigma_prev, self.ei_max, self.r, self.R))])


def read_trace_csv(path) -> dict[str, np.ndarray]:
    """Columns of a trace CSV as arrays (``x`` stacked to shape (T, d))."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return {}
    xcols = sorted((k for k in rows[0] if k.startswith("x_")), key=lambda k: int(k[2:]))
    out = {k: np.array([float(r[k]) for r in rows]) for k in
           ("t", "f", "f_plus", "sigma_prev", "ei_max", "r", "R")}
    out["x"] = np.array([[float(r[k]) for k in xcols] for r in rows])
    return out


def regret_series(trace, f_star: float | None):
    """Instantaneous, cumulative and average regret of the EGO-chosen samples.

    ``trace`` is a :class:`RunTrace` or a plain sequence of objective values.
    """
    values = np.asarray(trace.y if isinstance(trace, RunTrace) else trace, dtype=float)
    observed_min = values.min()
    if isinstance(trace, RunTrace):
        observed_min = min(observed_min, trace.y_init.min())
    if f_star is None:
        f_star = observed_min
    elif f_star > observed_min + 1e-9:
        msg = f"f_star={f_star!r} exceeds the best observed value {observed_min!r}"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        if isinstance(trace, RunTrace):
            trace.warnings.append(msg)
    r = values - f_star
    R = np.cumsum(r)
    return r, R, R / np.arange(1, r.size + 1)


def exploitation_telescope_check(trace: RunTrace, B: float) -> float:
    """Sum over t of max(f_{t-1}^+ - f(x_t), 0); never exceeds 2B when |f| <= B."""
    if np.max(np.abs(np.concatenate([trace.y_init, trace.y]))) > B:
        warnings.warn("declared bound B is below an observed |f|", RuntimeWarning, stacklevel=2)
    return float(np.sum(np.maximum(trace.f_plus_prev - trace.y, 0.0)))


def _evaluate(objective, x) -> float:
    v = float(objective(x))
    if not math.isfinite(v):
        raise ObjectiveError(x, v)
    return v


def _normalize(y: np.ndarray, enabled: bool) -> tuple[np.ndarray, float, float]:
    if not enabled:
        return y, 0.0, 1.0
    shift = float(np.mean(y))
    scale = float(np.std(y))
    if not scale > 0:
        scale = 1.0
    return (y - shift) / scale, shift, scale


def run_practical_ego(cfg: RunConfig) -> RunTrace:
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.bounds[:, 0], cfg.bounds[:, 1]
    d = cfg.dim
    unit = np.tile([0.0, 1.0], (d, 1))
    if cfg.initial_design == "lhs":
        U = latin_hypercube(cfg.n_init, unit, rng)
    else:
        U = rng.random((cfg.n_init, d))
    X0 = lo + U * (hi - lo)
    y0 = np.array([_evaluate(cfg.objective, x) for x in X0])

    T = cfg.n_iter
    Us = np.empty((cfg.n_init + T, d))
    Us[: cfg.n_init] = U
    ys = np.empty(cfg.n_init + T)
    ys[: cfg.n_init] = y0
    X = np.empty((T, d))
    y = np.empty(T)
    f_plus = np.empty(T)
    sig = np.empty(T)
    eim = np.empty(T)
    ls = np.empty(T)

    params = cfg.kernel
    grid = cfg.length_scale_grid
    best = float(y0.min())
    for t in range(T):
        n = cfg.n_init + t
        yn, shift, scale = _normalize(ys[:n], cfg.normalize_y)
        try:
            if grid is not None and (t == 0 or cfg.refit_every_iteration):
                params = select_length_scale(Us[:n], yn, cfg.kernel, cfg.nugget, grid)
            model = fit(Us[:n], yn, params, cfg.nugget)
        except IllConditionedError as exc:
            raise IllConditionedError(exc.pivot, cfg.nugget, iteration=t + 1) from exc
        inc = Incumbent.from_data(Us[:n], yn)
        u_next, ei_val = maximize_acquisition(model, inc, unit, cfg.acq_budget, rng)
        sig[t] = model.posterior(u_next).std
        eim[t] = ei_val * scale
        ls[t] = params.length_scale
        x_next = lo + u_next * (hi - lo)
        v = _evaluate(cfg.objective, x_next)
        Us[n], ys[n] = u_next, v
        X[t], y[t] = x_next, v
        best = min(best, v)
        f_plus[t] = best

    return RunTrace(X0, y0, X, y, f_plus, sig, eim, ls, cfg.f_star, cfg.nugget)
