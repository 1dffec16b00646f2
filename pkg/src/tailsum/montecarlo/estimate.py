"""Empirical percentiles with distribution-free order-statistic intervals."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import DomainError, InsufficientSamplesError
from .kernels import backend_name, compound_samples

MIN_TAIL_SAMPLES = 100
DEFAULT_SEED = 20120101


@dataclass(frozen=True)
class MonteCarloEstimate:
    alpha: float
    point: float
    ci_low: float
    ci_high: float
    n_samples: int
    seed: int
    chunks: int
    level: float = 0.95
    backend: str = ""

    @property
    def half_width(self):
        """Relative CI half-width ``(hi - lo) / (2 point)``."""
        return (self.ci_high - self.ci_low) / (2.0 * self.point)

    def covers(self, value):
        return self.ci_low <= value <= self.ci_high


def required_samples(alpha):
    """Smallest n with ``n (1 - alpha) >= 100`` in floating point."""
    d = 1.0 - alpha
    n = math.ceil(MIN_TAIL_SAMPLES / d)
    while n > 1 and (n - 1) * d >= MIN_TAIL_SAMPLES:
        n -= 1
    return n


def order_statistic_ranks(n, alpha, level=0.95):
    """1-based ranks ``(lo, point, hi)``.

    ``point = ceil(alpha n)``; ``[X_(lo), X_(hi)]`` covers the alpha-quantile
    with probability at least ``level``, since the count of samples below the
    quantile is Binomial(n, alpha).
    """
    tail = 0.5 * (1.0 - level)
    r = min(max(math.ceil(alpha * n), 1), n)
    lo = int(stats.binom.ppf(tail, n, alpha))
    hi = int(stats.binom.ppf(1.0 - tail, n, alpha)) + 1
    return max(lo, 1), r, min(hi, n)


def sample_compound(sev, freq, n_samples, seed=DEFAULT_SEED, chunks=1, workers=None, backend=None):
    """``n_samples`` draws of the compound sum (empty sum is 0)."""
    if n_samples < 1:
        raise DomainError("n_samples must be positive")
    return compound_samples(sev, freq, n_samples, seed, chunks, workers, backend)


def quantile_from_samples(x, alpha, level=0.95):
    """Point and CI from an existing sample vector (partially reorders a copy)."""
    n = x.shape[0]
    lo, r, hi = order_statistic_ranks(n, alpha, level)
    ks = sorted({lo - 1, r - 1, hi - 1})
    part = np.partition(x, ks)
    return float(part[r - 1]), float(part[lo - 1]), float(part[hi - 1])


def percentile_estimate(sev, freq, alpha, n_samples, seed=DEFAULT_SEED, chunks=1, workers=None,
                        backend=None, level=0.95):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha!r} not in (0, 1)")
    n_samples = int(n_samples)
    if n_samples * (1.0 - alpha) < MIN_TAIL_SAMPLES:
        need = required_samples(alpha)
        raise InsufficientSamplesError(
            f"n_samples={n_samples} leaves fewer than {MIN_TAIL_SAMPLES} samples above the "
            f"{alpha!r} quantile; need at least {need}", required=need,
        )
    x = sample_compound(sev, freq, n_samples, seed, chunks, workers, backend)
    point, lo, hi = quantile_from_samples(x, alpha, level)
    return MonteCarloEstimate(alpha, point, lo, hi, n_samples, int(seed), int(chunks), level,
                              backend_name(backend))
