"""Practical EGO: expected-improvement optimization with a nugget, and its regret bounds."""
from .acquisition import Incumbent, expected_improvement, maximize_acquisition
from .benchmarks import BenchmarkSpec, get_benchmark, make_gp_benchmark
from .ego import RunConfig, RunTrace, latin_hypercube, regret_series, run_practical_ego
from .gp import GpModel, IllConditionedError, LazyGpOracle, fit, realized_info_gain
from .kernels import KernelParams
from .special_math import DomainError, ei_tradeoff, std_normal_cdf, std_normal_pdf, tau

__all__ = [
    "BenchmarkSpec", "DomainError", "GpModel", "IllConditionedError", "Incumbent",
    "KernelParams", "LazyGpOracle", "RunConfig", "RunTrace", "ei_tradeoff",
    "expected_improvement", "fit", "get_benchmark", "latin_hypercube", "make_gp_benchmark",
    "maximize_acquisition", "realized_info_gain", "regret_series", "run_practical_ego",
    "std_normal_cdf", "std_normal_pdf", "tau",
]
