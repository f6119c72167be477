"""Expected improvement and its maximization over a box (minimization setting)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .gp import GpModel
from .special_math import EI_ASYMPTOTE_Z, INV_SQRT_2PI, ei_tradeoff

N_STARTS = 5
RANDOM_FRACTION = 0.8
INITIAL_STEP = 0.1
STEP_TOL = 1e-6
BUDGET_PER_DIM = 2048


@dataclass(frozen=True)
class Incumbent:
    f_plus: float
    x_plus: np.ndarray

    @classmethod
    def from_data(cls, X, y) -> "Incumbent":
        y = np.asarray(y, dtype=float)
        i = int(np.argmin(y))
        return cls(float(y[i]), np.asarray(X, dtype=float)[i].copy())


def ei_from_moments(f_plus: float, mean, std) -> np.ndarray:
    """Vectorized EI with the same asymptotic guard as :func:`ei_tradeoff`."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    a = f_plus - mean
    out = np.maximum(a, 0.0)
    ok = std > 0
    z = np.zeros_like(a)
    z[ok] = a[ok] / std[ok]
    ok &= np.abs(z) <= EI_ASYMPTOTE_Z
    zo = z[ok]
    out[ok] = a[ok] * ndtr(zo) + std[ok] * INV_SQRT_2PI * np.exp(-0.5 * zo * zo)
    return out


def expected_improvement(model: GpModel, inc: Incumbent, x) -> float:
    """EI at a single point through the scalar special functions."""
    post = model.posterior(x)
    if post.std == 0.0:
        return max(inc.f_plus - post.mean, 0.0)
    return ei_tradeoff(inc.f_plus - post.mean, post.std)


def ei_batch(model: GpModel, f_plus: float, Q) -> np.ndarray:
    mean, std = model.predict(Q)
    return ei_from_moments(f_plus, mean, std)


def pattern_search(
    fun: Callable[[np.ndarray], np.ndarray],
    starts: np.ndarray,
    start_values: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    budgets,
    initial_step: float = INITIAL_STEP,
    step_tol: float = STEP_TOL,
):
    """Compass search that *maximizes* ``fun`` from several starts in lockstep.

    ``fun`` maps an (m, d) batch to m values. Each start polls the 2d axis
    neighbours at its current step (a fraction of the box width), moves to the
    best strictly improving one, otherwise halves its step. A start stops when
    its step drops below ``step_tol`` or its evaluation budget runs out.
    Returns the final points, values and evaluations used.
    """
    starts = np.array(starts, dtype=float, copy=True)
    vals = np.array(start_values, dtype=float, copy=True)
    k, d = starts.shape
    width = hi - lo
    steps = np.full(k, initial_step)
    left = np.array(budgets, dtype=int)
    used = 0
    dirs = np.concatenate([np.eye(d), -np.eye(d)])
    while True:
        active = np.flatnonzero((steps >= step_tol) & (left >= 1))
        if active.size == 0:
            break
        batches, owners = [], []
        for j in active:
            n_poll = min(2 * d, int(left[j]))
            cand = starts[j] + steps[j] * width * dirs[:n_poll]
            batches.append(np.clip(cand, lo, hi))
            owners.append(np.full(n_poll, j))
            left[j] -= n_poll
        P = np.concatenate(batches)
        owner = np.concatenate(owners)
        fv = fun(P)
        used += P.shape[0]
        for j in active:
            sel = np.flatnonzero(owner == j)
            b = sel[int(np.argmax(fv[sel]))]
            if fv[b] > vals[j]:
                starts[j], vals[j] = P[b], fv[b]
            else:
                steps[j] *= 0.5
    return starts, vals, used


def default_budget(d: int) -> int:
    return BUDGET_PER_DIM * d


def maximize_acquisition(
    model: GpModel,
    inc: Incumbent,
    box,
    budget: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, float]:
    """Multistart maximization of EI over ``box`` (shape (d, 2)).

    80% of the budget goes to uniform random candidates; the top five seed a
    compass search that spends the rest. Ties keep the first point found.
    """
    box = np.asarray(box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    d = box.shape[0]
    budget = default_budget(d) if budget is None else int(budget)
    if budget < 1:
        raise ValueError("acquisition budget must be at least 1")
    rng = np.random.default_rng() if rng is None else rng

    n_rand = math.ceil(RANDOM_FRACTION * budget)
    C = lo + (hi - lo) * rng.random((n_rand, d))
    ei = ei_batch(model, inc.f_plus, C)
    remaining = budget - n_rand
    k = min(N_STARTS, n_rand)
    # stable sort keeps the first-found candidate on ties
    top = np.argsort(-ei, kind="stable")[:k]
    best_i = int(top[0])
    best_x, best_v = C[best_i], float(ei[best_i])
    if remaining > 0:
        shares = np.full(k, remaining // k)
        shares[: remaining % k] += 1
        X, V, _ = pattern_search(lambda P: ei_batch(model, inc.f_plus, P),
                                 C[top], ei[top], lo, hi, shares)
        j = int(np.argmax(V))
        if V[j] > best_v:
            best_x, best_v = X[j], float(V[j])
    return np.array(best_x, copy=True), best_v
