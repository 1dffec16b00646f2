import math

import numpy as np
import pytest
from scipy import stats

from tailsum import _accel
from tailsum.errors import DomainError, InsufficientSamplesError, ZeroCountAtomError
from tailsum.frequency import Deterministic, GenericPmf, NegBinomial, Poisson
from tailsum.levy import LevyExact, exact_quantile
from tailsum.montecarlo import (
    compound_samples,
    order_statistic_ranks,
    percentile_estimate,
    quantile_from_samples,
    sample_compound,
)
from tailsum.montecarlo.kernels import mix64, stream_bases
from tailsum.severity import Levy, Lognormal, Pareto

BACKENDS = ["numpy"] + (["numba"] if _accel.USE_NUMBA else [])
SEVS = [Levy(1.0), Lognormal(2.0), Pareto(1.2)]


def test_splitmix_reference_values():
    # splitmix64 finaliser of the golden-ratio increment, a well-known constant
    assert mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF
    a, b = stream_bases(1)
    assert a != b


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("sev", SEVS, ids=lambda s: s.kind)
def test_inverse_cdf_sampler_matches_cdf(sev, backend):
    n = 100_000
    x = sample_compound(sev, Deterministic(1), n, seed=11, backend=backend)
    d = stats.kstest(x, np.vectorize(sev.cdf)).statistic
    assert d <= 1.63 / math.sqrt(n)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("numba backend not active")
    for sev in SEVS:
        a = sample_compound(sev, Poisson(20.0), 5000, seed=3, backend="numba")
        b = sample_compound(sev, Poisson(20.0), 5000, seed=3, backend="numpy")
        assert np.allclose(a, b, rtol=1e-12, atol=0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_chunking_and_workers_do_not_change_samples(backend):
    sev, fr = Lognormal(2.0), NegBinomial(0.5, 10.0)
    ref = compound_samples(sev, fr, 10_001, 99, chunks=1, workers=1, backend=backend)
    for chunks, workers in ((7, 1), (8, 3), (64, 8)):
        got = compound_samples(sev, fr, 10_001, 99, chunks=chunks, workers=workers, backend=backend)
        assert np.array_equal(ref, got)


def test_seed_changes_samples():
    a = sample_compound(Pareto(2.0), Poisson(5.0), 1000, seed=1)
    b = sample_compound(Pareto(2.0), Poisson(5.0), 1000, seed=2)
    assert not np.array_equal(a, b)


def test_prefix_stability():
    # sample i depends only on (seed, i)
    a = sample_compound(Pareto(2.0), Poisson(5.0), 1000, seed=5)
    b = sample_compound(Pareto(2.0), Poisson(5.0), 400, seed=5)
    assert np.array_equal(a[:400], b)


def test_empty_sum_and_single_draw():
    x = sample_compound(Pareto(2.0), Deterministic(0), 100, seed=1)
    assert np.all(x == 0.0)
    x = sample_compound(Pareto(2.0), GenericPmf((0.999999, 1e-6)), 100, seed=1)
    assert np.all(x == 0.0)
    y = sample_compound(Pareto(2.0), Deterministic(1), 100, seed=1)
    assert np.all(y >= 1.0)


def test_poisson_counts_distribution():
    # with a point-mass severity of 1 the sum is the count itself: use a
    # very light Pareto and round
    x = sample_compound(Pareto(200.0), Poisson(4.0), 200_000, seed=8)
    n = np.rint(x / (200.0 / 199.0)).astype(int)
    counts = np.bincount(n, minlength=15)[:15]
    expected = stats.poisson.pmf(np.arange(15), 4.0) * len(n)
    assert stats.chisquare(counts[:12], expected[:12] * counts[:12].sum() / expected[:12].sum()).pvalue > 1e-3


def test_levy_stability_ks():
    n = 100_000
    z = sample_compound(Levy(1.0), Deterministic(100), n, seed=21) / 100**2
    single = sample_compound(Levy(1.0), Deterministic(1), n, seed=22)
    assert stats.ks_2samp(z, single).pvalue > 0.01


def test_rank_window():
    lo, r, hi = order_statistic_ranks(10**6, 0.999)
    assert r == 999000
    half = 1.96 * math.sqrt(10**6 * 0.999 * 0.001)
    assert lo == pytest.approx(r - half, abs=3)
    assert hi == pytest.approx(r + half, abs=3)


def test_quantile_from_samples_on_known_vector():
    x = np.arange(1, 10_001, dtype=float)[::-1].copy()
    point, lo, hi = quantile_from_samples(x, 0.5)
    assert point == 5000.0
    assert lo < point < hi


def test_single_term_pareto_ci_covers_exact():
    est = percentile_estimate(Pareto(2.0), Deterministic(1), 0.99, 10**6, seed=3)
    assert est.ci_low <= 10.0 <= est.ci_high
    assert est.ci_low <= est.point <= est.ci_high


def test_levy_ci_covers_exact_quantile():
    q = exact_quantile(LevyExact(1.0, 100), 0.999)
    assert q == pytest.approx(6.3662e9, rel=1e-4)
    est = percentile_estimate(Levy(1.0), Deterministic(100), 0.999, 200_000, seed=4)
    assert est.covers(q)


def test_coverage_calibration():
    hits = 0
    for seed in range(200):
        est = percentile_estimate(Pareto(2.0), Deterministic(1), 0.99, 20_000, seed=seed)
        hits += est.covers(10.0)
    assert hits >= 180


def test_chunk_count_keeps_estimate_identical():
    a = percentile_estimate(Lognormal(2.0), Poisson(10.0), 0.99, 50_000, seed=17, chunks=1)
    b = percentile_estimate(Lognormal(2.0), Poisson(10.0), 0.99, 50_000, seed=17, chunks=8)
    assert (a.point, a.ci_low, a.ci_high) == (b.point, b.ci_low, b.ci_high)


def test_estimates_stay_within_own_ci_across_seeds():
    for seed in range(20):
        e = percentile_estimate(Pareto(1.5), Poisson(5.0), 0.99, 20_000, seed=seed, chunks=1 + seed % 4)
        assert e.ci_low <= e.point <= e.ci_high


def test_insufficient_samples():
    with pytest.raises(InsufficientSamplesError) as info:
        percentile_estimate(Pareto(2.0), Deterministic(1), 0.999, 50_000)
    assert info.value.required == 100_000
    with pytest.raises(DomainError):
        percentile_estimate(Pareto(2.0), Deterministic(1), 1.5, 50_000)


def test_unknown_backend():
    with pytest.raises(DomainError):
        compound_samples(Pareto(2.0), Poisson(1.0), 10, 1, backend="cuda")


def test_empty_sum_frequency_has_no_quantile_series():
    from tailsum.perturbative import perturbative_series

    with pytest.raises(ZeroCountAtomError):
        perturbative_series(Pareto(2.0), GenericPmf((0.5, 0.5)), 0.4, 2)
