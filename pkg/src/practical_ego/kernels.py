"""Isotropic SE and half-integer Matérn covariance functions with unit variance."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

SUPPORTED_NU = (0.5, 1.5, 2.5)


@dataclass(frozen=True)
class KernelParams:
    """Kernel family, length scale and (Matérn only) smoothness.

    ``k(x, x) = 1`` for every parameterization.
    """

    family: str = "se"
    length_scale: float = 0.2
    nu: float | None = None

    def __post_init__(self):
        family = self.family.lower()
        if family not in ("se", "matern"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        object.__setattr__(self, "family", family)
        if not (self.length_scale > 0 and math.isfinite(self.length_scale)):
            raise ValueError(f"length_scale must be positive, got {self.length_scale!r}")
        if family == "matern":
            nu = 2.5 if self.nu is None else float(self.nu)
            if nu not in SUPPORTED_NU:
                raise ValueError(f"Matérn nu must be one of {SUPPORTED_NU}, got {nu!r}")
            object.__setattr__(self, "nu", nu)
        elif self.nu is not None:
            raise ValueError("nu is only meaningful for the Matérn family")

    def with_length_scale(self, length_scale: float) -> "KernelParams":
        return replace(self, length_scale=float(length_scale))

    def label(self) -> str:
        if self.family == "se":
            return "SE"
        return f"Matern{self.nu:g}"


def kernel_from_distance(p: KernelParams, r) -> np.ndarray:
    """Evaluate the kernel as a function of Euclidean distance ``r`` (array)."""
    r = np.asarray(r, dtype=float)
    if p.family == "se":
        return np.exp(-0.5 * (r / p.length_scale) ** 2)
    s = math.sqrt(2.0 * p.nu) * r / p.length_scale
    e = np.exp(-s)
    if p.nu == 0.5:
        return e
    if p.nu == 1.5:
        return (1.0 + s) * e
    return (1.0 + s + s * s / 3.0) * e


def _as_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D point, got shape {x.shape}")
    return x


def _as_points(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected an (n, d) array, got shape {X.shape}")
    return X


def kernel_eval(p: KernelParams, x, x2) -> float:
    x, x2 = _as_point(x), _as_point(x2)
    if x.shape != x2.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {x2.shape}")
    return float(kernel_from_distance(p, np.linalg.norm(x - x2)))


def distance_matrix(X, Q=None) -> np.ndarray:
    X = _as_points(X)
    Q = X if Q is None else _as_points(Q)
    if X.shape[0] and Q.shape[0] and X.shape[1] != Q.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Q.shape[1]}")
    if X.shape[0] == 0 or Q.shape[0] == 0:
        return np.zeros((X.shape[0], Q.shape[0]))
    return cdist(X, Q)


def kernel_matrix(p: KernelParams, X) -> np.ndarray:
    K = kernel_from_distance(p, distance_matrix(X))
    np.fill_diagonal(K, 1.0)
    return K


def cross_matrix(p: KernelParams, X, Q) -> np.ndarray:
    """``(n, m)`` matrix of k(X[i], Q[j])."""
    return kernel_from_distance(p, distance_matrix(X, Q))


def cross_vector(p: KernelParams, X, x) -> np.ndarray:
    """k_t(x): kernel between every training point and ``x``."""
    x = _as_point(x)
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.zeros(0)
    X = _as_points(X)
    if X.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {x.shape[0]}")
    return cross_matrix(p, X, x[None, :])[:, 0]
