"""Perturbative series for high percentiles of compound sums."""

from .engine import (
    DEFAULT_ORDER,
    EngineWorkspace,
    PerturbativeSeries,
    perturbative_series,
    q0_deterministic,
    q0_random,
    terms_deterministic,
    terms_random,
)
from .explicit import (
    explicit_deterministic,
    explicit_low_order,
    explicit_negbinomial,
    explicit_poisson,
    explicit_random,
    high_percentile_terms,
)

__all__ = [
    "DEFAULT_ORDER",
    "EngineWorkspace",
    "explicit_deterministic",
    "explicit_low_order",
    "explicit_negbinomial",
    "explicit_poisson",
    "explicit_random",
    "high_percentile_terms",
    "PerturbativeSeries",
    "perturbative_series",
    "q0_deterministic",
    "q0_random",
    "terms_deterministic",
    "terms_random",
]
