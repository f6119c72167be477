"""Scalar normal-distribution helpers used by EI and the regret-bound constants.

All functions take and return Python floats. NaN or infinite input raises
:class:`DomainError`.
"""
from __future__ import annotations

import math

SQRT_2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / SQRT_2PI

# beyond this |a/b| the closed form is replaced by its asymptote
EI_ASYMPTOTE_Z = 40.0


class DomainError(ValueError):
    """Argument outside the domain of a numerical routine."""


def _finite(z: float, name: str = "z") -> float:
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


def std_normal_pdf(z: float) -> float:
    z = _finite(z)
    return INV_SQRT_2PI * math.exp(-0.5 * z * z)


def std_normal_cdf(z: float) -> float:
    """Phi(z) through ``math.erfc``; accurate in both tails (relative error
    near machine precision for z << 0)."""
    z = _finite(z)
    return 0.5 * math.erfc(-z / SQRT_2)


def tau(z: float) -> float:
    """z * Phi(z) + phi(z), so that EI = sigma * tau((f+ - mu) / sigma).

    Positive and strictly increasing with derivative Phi(z). For very negative
    z the value underflows to 0 (below about z = -37).
    """
    z = _finite(z)
    return z * std_normal_cdf(z) + std_normal_pdf(z)


def ei_tradeoff(a: float, b: float) -> float:
    """Expected improvement written in exploitation ``a`` and exploration ``b``.

    ``EI(a, b) = a * Phi(a/b) + b * phi(a/b) = b * tau(a/b)`` for ``b > 0``.
    When ``|a/b| > 40`` the asymptote ``max(a, 0)`` is returned.
    """
    a = _finite(a, "a")
    b = _finite(b, "b")
    if b <= 0.0:
        raise DomainError(f"exploration term b must be positive, got {b!r}")
    z = a / b
    if abs(z) > EI_ASYMPTOTE_Z:
        return max(a, 0.0)
    return a * std_normal_cdf(z) + b * std_normal_pdf(z)
