"""Synthetic test objectives and GP-sampled objectives with estimated optima."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .acquisition import pattern_search
from .gp import LazyGpOracle
from .kernels import KernelParams

PROBES_PER_DIM = 1024
N_REFINE = 5


def rosenbrock(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def six_hump_camel(x) -> float:
    x1, x2 = float(x[0]), float(x[1])
    return (4.0 - 2.1 * x1 ** 2 + x1 ** 4 / 3.0) * x1 ** 2 + x1 * x2 + (-4.0 + 4.0 * x2 ** 2) * x2 ** 2


_H6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_H6_A = np.array([
    [10, 3.0, 17, 3.5, 1.7, 8.0],
    [0.05, 10, 17, 0.1, 8.0, 14],
    [3.0, 3.5, 1.7, 10, 17, 8.0],
    [17, 8.0, 0.05, 10, 0.1, 14],
])
_H6_P = 1e-4 * np.array([
    [1312, 1696, 5569, 124, 8283, 5886],
    [2329, 4135, 8307, 3736, 1004, 9991],
    [2348, 1451, 3522, 2883, 3047, 6650],
    [4047, 8828, 8732, 5743, 1091, 381],
])

def hartmann6(x) -> float:
    x = np.asarray(x, dtype=float)
    inner = np.sum(_H6_A * (x[None, :] - _H6_P) ** 2, axis=1)
    return float(-np.sum(_H6_ALPHA * np.exp(-inner)))


def branin(x) -> float:
    x1, x2 = float(x[0]), float(x[1])
    return ((x2 - 5.1 / (4.0 * math.pi ** 2) * x1 ** 2 + 5.0 / math.pi * x1 - 6.0) ** 2
            + 10.0 * (1.0 - 1.0 / (8.0 * math.pi)) * math.cos(x1) + 10.0)


def michalewicz(x) -> float:
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.size + 1)
    return float(-np.sum(np.sin(x) * np.sin(i * x ** 2 / math.pi) ** 20))


@dataclass
class BenchmarkSpec:
    """An objective with its box, optimum value and default run sizes.

    ``f_star_source`` is ``"paper"`` for a literature optimum taken as is and
    ``"derived_grid"`` when the value was computed here. When the two disagree
    the literature figure is kept in ``paper_claimed_f_star``.
    """

    name: str
    dim: int
    bounds: np.ndarray
    f_star: float
    f_star_source: str
    evaluator: Callable[[np.ndarray], float]
    kernel: KernelParams = field(default_factory=KernelParams)
    n_init: int = 5
    n_iter: int = 200
    paper_claimed_f_star: float | None = None

    def __call__(self, x) -> float:
        return self.evaluator(x)


BRANIN_F_STAR = 0.39788735772973816  # 10 / (8 pi): the squared term vanishes and cos(x1) = -1

SYNTHETIC = {
    "rosenbrock": dict(fn=rosenbrock, bounds=[[-2.048, 2.048]] * 2, f_star=0.0, source="paper",
                       kernel=KernelParams("se"), n_init=5, n_iter=200),
    "six_hump_camel": dict(fn=six_hump_camel, bounds=[[-3.0, 3.0], [-2.0, 2.0]],
                           f_star=-1.031628453489877, source="derived_grid", published=-1.0316,
                           kernel=KernelParams("se"), n_init=5, n_iter=200),
    "hartmann6": dict(fn=hartmann6, bounds=[[0.0, 1.0]] * 6, f_star=-3.322368011415514,
                      source="derived_grid", published=-3.32,
                      kernel=KernelParams("se"), n_init=50, n_iter=100),
    "branin": dict(fn=branin, bounds=[[-5.0, 10.0], [0.0, 15.0]], f_star=BRANIN_F_STAR,
                   source="derived_grid", published=0.0,
                   kernel=KernelParams("matern", nu=2.5), n_init=5, n_iter=200),
    "michalewicz": dict(fn=michalewicz, bounds=[[0.0, math.pi]] * 2, f_star=-1.8013034100985537,
                        source="derived_grid", published=-1.8013,
                        kernel=KernelParams("matern", nu=2.5), n_init=5, n_iter=100),
}


def get_benchmark(name: str) -> BenchmarkSpec:
    try:
        e = SYNTHETIC[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; choose from {sorted(SYNTHETIC)}") from None
    bounds = np.asarray(e["bounds"], dtype=float)
    return BenchmarkSpec(name, bounds.shape[0], bounds, e["f_star"], e["source"], e["fn"],
                         e["kernel"], e["n_init"], e["n_iter"], e.get("published"))


def estimate_min(oracle: LazyGpOracle, dim: int, seed: int,
                 probes_per_dim: int = PROBES_PER_DIM) -> tuple[float, np.ndarray]:
    """Minimum of a lazily sampled path over [0, 1]^d.

    Draws a scrambled Sobol probe set jointly, then refines the best few
    probes with a compass search on the oracle itself.
    """
    n = probes_per_dim * dim
    m = int(math.ceil(math.log2(n)))
    P = qmc.Sobol(dim, scramble=True, seed=seed).random_base2(m)[:n]
    vals = oracle.sample_batch(P)
    order = np.argsort(vals, kind="stable")[:N_REFINE]
    lo, hi = np.zeros(dim), np.ones(dim)
    step = 0.5 / n ** (1.0 / dim)
    X, V, _ = pattern_search(lambda Q: -oracle.sample_batch(Q), P[order], -vals[order],
                             lo, hi, np.full(order.size, 200 * dim), initial_step=step)
    j = int(np.argmax(V))
    return float(-V[j]), X[j]


def make_gp_benchmark(kernel: str | KernelParams = "se", length_scale: float = 0.2, dim: int = 2,
                      seed: int = 0, nu: float = 2.5,
                      probes_per_dim: int = PROBES_PER_DIM) -> BenchmarkSpec:
    """A GP sample path on [0, 1]^d with its minimum estimated before any optimization."""
    if isinstance(kernel, KernelParams):
        params = kernel.with_length_scale(length_scale)
    elif kernel.lower() == "se":
        params = KernelParams("se", length_scale)
    else:
        params = KernelParams("matern", length_scale, nu)
    oracle = LazyGpOracle(params, dim, seed=seed)
    f_star, _ = estimate_min(oracle, dim, seed, probes_per_dim)
    n_init = 20 if dim <= 2 else 40 if dim == 4 else 10 * dim
    return BenchmarkSpec(f"gp_{params.label()}_{dim}d", dim, np.tile([0.0, 1.0], (dim, 1)),
                         f_star, "derived_grid", oracle, params, n_init, 200)
