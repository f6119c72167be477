"""Noise-free GP regression with a positive nugget on the kernel diagonal.

The fitted model solves ``(K + eps I) alpha = y`` through a Cholesky factor and
serves the posterior

    mu(x)      = k(x)^T (K + eps I)^{-1} y
    sigma^2(x) = 1 - k(x)^T (K + eps I)^{-1} k(x)

The module also carries the realized information gain, the log evidence used
for length-scale selection and a lazily sampled GP path used as a test
objective.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .kernels import (
    KernelParams,
    cross_matrix,
    distance_matrix,
    kernel_from_distance,
    kernel_matrix,
)

DEFAULT_NUGGET = 1e-6
DEFAULT_LENGTH_SCALE_GRID = tuple(np.logspace(-2.0, 1.0, 25))


class IllConditionedError(np.linalg.LinAlgError):
    """Cholesky breakdown of K + eps I despite the nugget."""

    def __init__(self, pivot: int, nugget: float, iteration: int | None = None):
        self.pivot = pivot
        self.nugget = nugget
        self.iteration = iteration
        where = f" at EGO iteration {iteration}" if iteration is not None else ""
        super().__init__(
            f"kernel matrix ill-conditioned even with nugget {nugget:g}: "
            f"nonpositive pivot at index {pivot}{where}"
        )


def cholesky_lower(A: np.ndarray, nugget: float = float("nan")) -> np.ndarray:
    """Lower Cholesky factor; raises IllConditionedError with the pivot index."""
    if A.shape[0] == 0:
        return np.zeros((0, 0))
    L, info = lapack.dpotrf(A, lower=1, clean=1)
    if info > 0:
        raise IllConditionedError(int(info) - 1, nugget)
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    return L


@dataclass(frozen=True)
class PosteriorStats:
    mean: float
    std: float


@dataclass(frozen=True, eq=False)
class GpModel:
    params: KernelParams
    nugget: float
    X: np.ndarray
    y: np.ndarray
    chol: np.ndarray
    alpha: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def predict(self, Q) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized posterior mean and standard deviation at rows of ``Q``."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if self.n == 0:
            return np.zeros(Q.shape[0]), np.ones(Q.shape[0])
        if Q.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: model has d={self.dim}, query has {Q.shape[1]}")
        Kq = cross_matrix(self.params, self.X, Q)
        mean = Kq.T @ self.alpha
        V = solve_triangular(self.chol, Kq, lower=True, check_finite=False)
        var = 1.0 - np.einsum("ij,ij->j", V, V)
        np.maximum(var, 0.0, out=var)
        return mean, np.sqrt(var)

    def posterior(self, x) -> PosteriorStats:
        mean, std = self.predict(np.asarray(x, dtype=float)[None, :])
        return PosteriorStats(float(mean[0]), float(std[0]))


def _check_training(X, y):
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        X = X.reshape(0, X.shape[-1] if X.ndim == 2 else 0)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    if not np.all(np.isfinite(X)):
        raise ValueError("training inputs must be finite")
    return X, y


def fit(X, y, params: KernelParams, nugget: float = DEFAULT_NUGGET, *, dist=None) -> GpModel:
    """Fit the GP; ``dist`` optionally supplies the precomputed distance matrix."""
    if not nugget > 0:
        raise ValueError(f"nugget must be positive, got {nugget!r}")
    X, y = _check_training(X, y)
    n = X.shape[0]
    if n == 0:
        return GpModel(params, float(nugget), X, y, np.zeros((0, 0)), np.zeros(0))
    K = kernel_matrix(params, X) if dist is None else kernel_from_distance(params, dist)
    K[np.diag_indices(n)] = 1.0 + nugget
    L = cholesky_lower(K, nugget)
    alpha = solve_triangular(L.T, solve_triangular(L, y, lower=True), lower=False)
    return GpModel(params, float(nugget), X, y, L, alpha)


def posterior(model: GpModel, x) -> PosteriorStats:
    return model.posterior(x)


def log_marginal_likelihood(model: GpModel) -> float:
    n = model.n
    if n == 0:
        raise ValueError("log marginal likelihood needs at least one observation")
    return float(
        -0.5 * model.y @ model.alpha
        - np.sum(np.log(np.diag(model.chol)))
        - 0.5 * n * math.log(2.0 * math.pi)
    )


def realized_info_gain(params: KernelParams, nugget: float, X) -> float:
    """0.5 * log det(I + K / eps) in nats, via a Cholesky factor."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[0]
    if n == 0:
        return 0.0
    A = kernel_matrix(params, X) / nugget
    A[np.diag_indices(n)] += 1.0
    L = cholesky_lower(A, nugget)
    return float(np.sum(np.log(np.diag(L))))


def select_length_scale(
    X, y, template: KernelParams, nugget: float, grid=DEFAULT_LENGTH_SCALE_GRID
) -> KernelParams:
    """Grid search of the length scale by log evidence; ties go to the smallest."""
    grid = sorted(float(l) for l in grid)
    if not grid:
        raise ValueError("length-scale grid is empty")
    if any(l <= 0 for l in grid):
        raise ValueError("length scales must be positive")
    X, y = _check_training(X, y)
    if len(grid) == 1 or X.shape[0] == 0:
        return template.with_length_scale(grid[0])
    dist = distance_matrix(X)
    best, best_ll = None, -math.inf
    for l in grid:
        p = template.with_length_scale(l)
        try:
            ll = log_marginal_likelihood(fit(X, y, p, nugget, dist=dist))
        except IllConditionedError:
            continue
        if ll > best_ll:
            best, best_ll = p, ll
    if best is None:
        raise IllConditionedError(-1, nugget)
    return best


def _pivoted_cholesky(diag, column, tol):
    """Greedy pivoted Cholesky of an implicit PSD matrix.

    ``column(p)`` returns column ``p``; pivots stop once the residual diagonal
    falls below ``tol``. Returns (pivot order, factor with shape (m, rank)).
    """
    m = diag.shape[0]
    d = diag.copy()
    cap = min(m, 64)
    L = np.zeros((m, cap))
    order: list[int] = []
    taken = np.zeros(m, dtype=bool)
    for k in range(m):
        masked = np.where(taken, -np.inf, d)
        p = int(np.argmax(masked))
        if masked[p] < tol:
            break
        if k == cap:
            cap = min(m, 2 * cap)
            L = np.concatenate([L, np.zeros((m, cap - L.shape[1]))], axis=1)
        piv = math.sqrt(d[p])
        col = column(p) - L[:, :k] @ L[p, :k]
        col /= piv
        col[taken] = 0.0
        col[p] = piv
        L[:, k] = col
        d -= col * col
        taken[p] = True
        order.append(p)
    return np.asarray(order, dtype=int), L[:, : len(order)]


@dataclass(eq=False)
class LazyGpOracle:
    """A GP sample path revealed one query at a time.

    Each new point is drawn from the GP conditioned on every value revealed so
    far, and remembered, so the oracle behaves as a fixed deterministic
    function. Points whose conditional variance is below ``pivot_tol`` are set
    to their conditional mean and not added to the conditioning set.
    """

    params: KernelParams
    dim: int
    seed: int = 0
    jitter: float = 1e-12
    pivot_tol: float = 1e-10
    _rng: np.random.Generator = field(init=False, repr=False)
    _cache: dict = field(init=False, repr=False)
    _basis: np.ndarray = field(init=False, repr=False)
    _L: np.ndarray = field(init=False, repr=False)
    _w: np.ndarray = field(init=False, repr=False)
    _nb: int = field(init=False, repr=False)

    def __post_init__(self):
        self._rng = np.random.default_rng(self.seed)
        self._cache = {}
        self._basis = np.zeros((16, self.dim))
        self._L = np.zeros((16, 16))
        self._w = np.zeros(16)
        self._nb = 0

    @property
    def n_revealed(self) -> int:
        return len(self._cache)

    @property
    def n_basis(self) -> int:
        return self._nb

    def __call__(self, x) -> float:
        return float(self.sample_batch(np.asarray(x, dtype=float)[None, :])[0])

    def _grow(self, need: int):
        cap = self._L.shape[0]
        if need <= cap:
            return
        new = max(need, 2 * cap)
        L = np.zeros((new, new))
        L[:cap, :cap] = self._L
        self._L = L
        self._basis = np.concatenate([self._basis, np.zeros((new - cap, self.dim))])
        self._w = np.concatenate([self._w, np.zeros(new - cap)])

    def sample_batch(self, Q) -> np.ndarray:
        """Jointly draw (or recall) the path at the rows of ``Q``."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: oracle d={self.dim}, query d={Q.shape[1]}")
        keys = [q.tobytes() for q in Q]
        fresh: dict[bytes, int] = {}
        for i, key in enumerate(keys):
            if key not in self._cache and key not in fresh:
                fresh[key] = i
        if fresh:
            self._draw(Q[list(fresh.values())], list(fresh.keys()))
        return np.array([self._cache[k] for k in keys])

    def _draw(self, P: np.ndarray, keys: list[bytes]):
        m, nb = P.shape[0], self._nb
        if nb:
            L_b = self._L[:nb, :nb]
            V = solve_triangular(L_b, cross_matrix(self.params, self._basis[:nb], P),
                                 lower=True, check_finite=False)
            mean = V.T @ self._w[:nb]
        else:
            V = np.zeros((0, m))
            mean = np.zeros(m)
        diag = 1.0 + self.jitter - np.einsum("ij,ij->j", V, V)

        order, F = None, None
        if m <= 4096:
            S = cross_matrix(self.params, P, P) - V.T @ V
            S[np.diag_indices(m)] = diag
            F_full, info = lapack.dpotrf(S, lower=1, clean=1)
            if info == 0 and np.min(np.diag(F_full)) ** 2 >= self.pivot_tol:
                order, F = np.arange(m), F_full
        if order is None:
            def column(p):
                c = cross_matrix(self.params, P, P[p:p + 1])[:, 0] - V.T @ V[:, p]
                c[p] = diag[p]
                return c
            order, F = _pivoted_cholesky(diag, column, self.pivot_tol)

        r = order.size
        z = self._rng.standard_normal(r)
        values = mean + F @ z
        for key, v in zip(keys, values):
            self._cache[key] = float(v)
        if r:
            self._grow(nb + r)
            self._basis[nb:nb + r] = P[order]
            self._L[nb:nb + r, :nb] = V[:, order].T
            self._L[nb:nb + r, nb:nb + r] = F[order]
            self._w[nb:nb + r] = z
            self._nb = nb + r


def lazy_sample(oracle: LazyGpOracle, x) -> float:
    return oracle(x)

