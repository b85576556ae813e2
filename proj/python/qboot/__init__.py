"""Bootstrap confidence intervals for quantiles, without resampling.

Thin re-export of the compiled extension. All functions accept plain
sequences of floats and return dicts/tuples; see each docstring.
"""

from ._qboot import (
    approximation_study,
    bench_compare,
    binomial_index_pmf,
    binomial_index_quantile,
    classic_ci,
    classic_ci_diff,
    conservative_empirical_quantiles,
    coverage_simulation,
    exact_index_pmf,
    fast_ci,
    fast_ci_diff,
    quantile_estimate,
    simulate_index_pmf,
)

__all__ = [
    "approximation_study",
    "bench_compare",
    "binomial_index_pmf",
    "binomial_index_quantile",
    "classic_ci",
    "classic_ci_diff",
    "conservative_empirical_quantiles",
    "coverage_simulation",
    "exact_index_pmf",
    "fast_ci",
    "fast_ci_diff",
    "quantile_estimate",
    "simulate_index_pmf",
]
