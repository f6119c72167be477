"""Regret-bound constants and curves for practical EGO.

Everything here is a closed-form expression in the RKHS-norm bound ``B``, the
nugget ``eps``, the horizon ``T`` and (for the information-gain bounds)
kernel-specific constants that the caller supplies. All logarithms are
natural.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .special_math import DomainError, std_normal_pdf, tau

PHI0 = std_normal_pdf(0.0)

CASE1, CASE2, OTHER = "case1", "case2", "other"


@dataclass(frozen=True)
class BoundConstants:
    """Constants derived from ``B`` (and ``eps`` where a formula needs it)."""

    B: float
    eps: float = 1e-6

    def __post_init__(self):
        if not (self.B > 0 and math.isfinite(self.B)):
            raise DomainError(f"B must be positive and finite, got {self.B!r}")
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps!r}")
        if tau(-self.B) <= 0.0:
            raise DomainError(f"tau(-B) underflows for B={self.B!r}")

    @property
    def c_B(self) -> float:
        return tau(self.B) / tau(-self.B)

    @property
    def c_B1(self) -> float:
        return max(self.c_B - 1.0, 0.0)

    @property
    def C_R1(self) -> float:
        return 2.0 * self.c_B1 * self.B

    @property
    def C_R2(self) -> float:
        return -math.log(2.0 * math.pi * tau(-self.B) ** 2)

    @property
    def C_R3(self) -> float:
        return self.B + self.c_B * (self.B + PHI0)

    @property
    def C_R4(self) -> float:
        return self.C_R2 + self.C_R3 ** 2


@dataclass(frozen=True)
class MigConstants:
    """Constants of the information-gain upper bounds.

    SE uses ``C_dl1..C_dl3``. Matérn uses ``C_nu`` (from which C_nu^2 and
    C_nu^4 follow), ``C_dnul1``, ``C_dnul2`` and the additive ``C``.
    """

    d: int = 2
    nu: float = 2.5
    length_scale: float = 1.0
    C_dl1: float = 1.0
    C_dl2: float = 1.0
    C_dl3: float = 1.0
    C_nu: float = 1.0
    C_dnul1: float = 1.0
    C_dnul2: float = 1.0
    C: float = 1.0

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("d must be at least 1")
        if not self.nu > 0.5:
            raise DomainError("the Matérn bound requires nu > 1/2")
        if not self.C_nu > 0:
            raise DomainError("C_nu must be positive")

    @property
    def C_nu1(self) -> float:
        return 1.0 / math.log(2.0)

    @property
    def C_nu2(self) -> float:
        return math.gamma(self.nu) / self.C_nu

    @property
    def C_nu3(self) -> float:
        return 1.0 / self.nu

    @property
    def C_nu4(self) -> float:
        return math.log(1.0 / (self.nu * math.gamma(self.nu))) / self.nu + math.log(2.0)

    @property
    def matern_exponent(self) -> float:
        return self.d / (2.0 * self.nu + self.d)


def sigma_floor(eps: float, t: int) -> float:
    """Smallest posterior std attainable after ``t`` observations."""
    if not eps > 0 or t < 0:
        raise DomainError("need eps > 0 and t >= 0")
    return math.sqrt(eps / (t + eps))


def c_gamma(eps: float) -> float:
    if not eps > 0:
        raise DomainError("eps must be positive")
    return 2.0 / math.log1p(1.0 / eps)


def c_b_eps(eps: float, t: float, B: float) -> float:
    """sqrt(log((t + eps) / (2 pi tau(-B)^2 eps)))."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    arg = (t + eps) / (2.0 * math.pi * tau(-B) ** 2 * eps)
    if not arg >= 1.0:
        raise DomainError(
            f"log argument {arg:g} < 1: tau(-B) sqrt(eps/(t+eps)) must stay below 1/sqrt(2 pi)"
        )
    return math.sqrt(math.log(arg))


def instantaneous_bound(f_plus_prev: float, f_x: float, sigma_prev: float,
                        bc: BoundConstants, t: int) -> float:
    """Upper bound on r_t from the incumbent, the new value and sigma_{t-1}(x_t)."""
    exploit = max(f_plus_prev - f_x, 0.0)
    return bc.c_B1 * exploit + (c_b_eps(bc.eps, t, bc.B) + bc.C_R3) * sigma_prev


def cumulative_bound(T: int, bc: BoundConstants, gamma_T: float) -> float:
    if gamma_T < 0:
        raise DomainError("information gain must be nonnegative")
    return bc.C_R1 + (c_b_eps(bc.eps, T, bc.B) + bc.C_R3) * math.sqrt(
        c_gamma(bc.eps) * T * gamma_T
    )


def mig_se_upper(eps: float, T: float, mc: MigConstants) -> float:
    if T < 1 or not eps > 0:
        raise DomainError("need T >= 1 and eps > 0")
    lg = math.log1p(T / eps)
    return mc.C_dl1 * (lg ** (mc.d + 1) + mc.C_dl2 * lg + mc.C_dl3)


@dataclass(frozen=True)
class MaternMig:
    value: float
    c0: float
    gamma_bar: float
    precondition_ok: bool


def mig_matern_upper(eps: float, T: float, mc: MigConstants) -> MaternMig:
    """Matérn information-gain bound; ``precondition_ok`` is False when c_T^0 < 1."""
    if T < 1 or not eps > 0:
        raise DomainError("need T >= 1 and eps > 0")
    lt = math.log(T * T / eps)
    inner = 1.0 + mc.C_nu2 * lt
    if lt <= 0 or inner <= 0:
        raise DomainError(f"nonpositive log argument at T={T!r}, eps={eps!r}")
    c0 = mc.C_nu1 * (math.log(inner) + mc.C_nu3 * lt + mc.C_nu4)
    l2 = math.log1p(2.0 * T / eps)
    e = mc.matern_exponent
    gbar = mc.C_dnul1 * (l2 + mc.C_dnul2 * (T / eps) ** e * l2 ** (2.0 * mc.nu / (2.0 * mc.nu + mc.d)))
    return MaternMig(c0 * gbar + mc.C, c0, gbar, c0 >= 1.0)


def s_T(kernel: str, eps: float, T: float, mc: MigConstants) -> float:
    if kernel == "se":
        return mig_se_upper(eps, T, mc)
    if kernel == "matern":
        return mig_matern_upper(eps, T, mc).value
    raise ValueError(f"unknown kernel {kernel!r}")


def c_T_from_s(T: float, eps: float, bc: BoundConstants, s: float) -> float:
    lg = math.log1p(T / eps)
    lead = lg + 2.0 * bc.C_R3 * math.sqrt(lg + bc.C_R2) + bc.C_R4
    return lead * s / math.log1p(1.0 / eps)


def u_t_curve(T: float, eps: float, bc: BoundConstants, mc: MigConstants,
              kernel: str) -> tuple[float, float]:
    """Return ``(c_T, u_T)``; the full cumulative bound is ``bc.C_R1 + u_T``."""
    c = c_T_from_s(T, eps, bc, s_T(kernel, eps, T, mc))
    return c, math.sqrt(2.0 * c * T)


def classify_se(eps: float, T: float, d: int) -> str:
    a = math.log1p(1.0 / eps)
    b = math.log1p(T / eps)
    first = (d + 1) * a > b
    second = (d + 2) * a < (1.0 + eps / T) / (1.0 + eps) * b
    assert not (first and second), "SE case conditions overlap"
    return CASE1 if first else CASE2 if second else OTHER


def classify_matern(eps: float, T: float, mc: MigConstants) -> str:
    a = math.log1p(1.0 / eps)
    e = mc.matern_exponent
    nu, d = mc.nu, mc.d
    first = (a * e > 1.0 + 1.0 / mc.C_dnul2
             and mc.C_nu1 * mc.C_dnul1 * mc.C_nu3 * a * math.log1p(2.0 * T / eps) > mc.C)
    lt = math.log(T / eps)
    # the second condition is only defined for T/eps > 1
    second = lt > 0 and a * (
        e + mc.C_nu1 * mc.C_nu3 + ((4.0 * nu + d) / (2.0 * nu + d) + mc.C_nu1) / lt
    ) < 1.0 / (1.0 + eps)
    if first and second:
        raise AssertionError("Matérn case conditions overlap")
    return CASE1 if first else CASE2 if second else OTHER


def classify(kernel: str, eps: float, T: float, mc: MigConstants) -> str:
    if kernel == "se":
        return classify_se(eps, T, mc.d)
    return classify_matern(eps, T, mc)


@dataclass(frozen=True)
class SweepRow:
    kernel: str
    T: float
    eps: float
    c_T: float
    u_T: float
    case: str


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def for_T(self, T: float) -> list[SweepRow]:
        return [r for r in self.rows if r.T == T]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kernel", "T", "epsilon", "c_T", "u_T", "case"])
            for r in self.rows:
                w.writerow([r.kernel, repr(r.T), repr(r.eps), repr(r.c_T), repr(r.u_T), r.case])

    @classmethod
    def read_csv(cls, path) -> "SweepResult":
        with open(path, newline="") as fh:
            rows = [
                SweepRow(d["kernel"], float(d["T"]), float(d["epsilon"]),
                         float(d["c_T"]), float(d["u_T"]), d["case"])
                for d in csv.DictReader(fh)
            ]
        return cls(rows)


def sweep_nugget(kernel: str, T_list: Iterable[float], eps_grid: Sequence[float],
                 B: float, mc: MigConstants) -> SweepResult:
    """Evaluate ``c_T``, ``u_T`` and the case label on a (T, eps) grid.

    ``B`` is passed rather than a :class:`BoundConstants` because the latter's
    ``eps`` varies across the grid; only its ``B``-dependent parts are used.
    """
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid:
        raise DomainError("empty eps grid")
    if any(e <= 0 for e in eps_grid) or any(b <= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise DomainError("eps grid must be positive and strictly ascending")
    kernel = kernel.lower()
    out = SweepResult()
    for T in T_list:
        T = float(T)
        for eps in eps_grid:
            bc = BoundConstants(B, eps)
            c, u = u_t_curve(T, eps, bc, mc, kernel)
            out.rows.append(SweepRow(kernel, T, eps, c, u, classify(kernel, eps, T, mc)))
    return out


def sign_agreement(result: SweepResult) -> tuple[int, int]:
    """Count labeled interior cells whose finite-difference slope of c_T in eps
    has the sign the case label predicts (negative for case1, positive for
    case2). Returns ``(agreeing, labeled)``.
    """
    agree = labeled = 0
    for T in sorted({r.T for r in result.rows}):
        rows = result.for_T(T)
        for prev, cur, nxt in zip(rows, rows[1:], rows[2:]):
            if cur.case == OTHER:
                continue
            labeled += 1
            slope = (nxt.c_T - prev.c_T) / (nxt.eps - prev.eps)
            if (cur.case == CASE1 and slope < 0) or (cur.case == CASE2 and slope > 0):
                agree += 1
    return agree, labeled
