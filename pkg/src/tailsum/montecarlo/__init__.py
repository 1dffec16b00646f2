"""Monte Carlo oracle for compound-sum percentiles."""

from .estimate import (
    DEFAULT_SEED,
    MonteCarloEstimate,
    order_statistic_ranks,
    percentile_estimate,
    quantile_from_samples,
    required_samples,
    sample_compound,
)
from .kernels import compound_samples

__all__ = [
    "DEFAULT_SEED",
    "MonteCarloEstimate",
    "compound_samples",
    "order_statistic_ranks",
    "percentile_estimate",
    "quantile_from_samples",
    "required_samples",
    "sample_compound",
]
