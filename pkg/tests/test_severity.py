import math

import mpmath
import numpy as np
import pytest

from tailsum.errors import DomainError, SupportError
from tailsum.severity import Levy, Lognormal, Pareto, censored_cumulants, make_severity

mpmath.mp.dps = 30

SEVERITIES = [Levy(1.0), Levy(2.5), Lognormal(2.0), Lognormal(2.5), Pareto(0.8), Pareto(1.2), Pareto(2.0)]


def _mp_pdf(sev):
    if isinstance(sev, Levy):
        c = sev.c
        return lambda x: mpmath.sqrt(c / (2 * mpmath.pi)) * mpmath.exp(-c / (2 * x)) / x**1.5
    if isinstance(sev, Lognormal):
        s = sev.sigma
        return lambda x: mpmath.exp(-mpmath.log(x) ** 2 / (2 * s * s)) / (x * s * mpmath.sqrt(2 * mpmath.pi))
    a = sev.a
    return lambda x: a * x ** (-a - 1)


def _points(sev):
    return [sev.isf(q) for q in (0.5, 1e-2, 1e-5)]


@pytest.mark.parametrize("sev", SEVERITIES, ids=lambda s: f"{s.kind}-{s.label()}")
def test_cdf_quantile_round_trip(sev):
    for p in (0.01, 0.5, 0.99, 0.999999):
        assert sev.cdf(sev.quantile(p)) == pytest.approx(p, rel=1e-13)
    for q in (1e-3, 1e-9, 1e-15):
        assert sev.sf(sev.isf(q)) == pytest.approx(q, rel=1e-12)


@pytest.mark.parametrize("sev", SEVERITIES, ids=lambda s: f"{s.kind}-{s.label()}")
def test_pdf_derivatives_against_mpmath(sev):
    f = _mp_pdf(sev)
    for x in _points(sev):
        got = sev.pdf_derivs(x, 4)
        want = [float(mpmath.diff(f, mpmath.mpf(x), j)) for j in range(5)]
        for g, w in zip(got, want):
            assert g == pytest.approx(w, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("sev", SEVERITIES, ids=lambda s: f"{s.kind}-{s.label()}")
def test_log_cdf_derivatives_against_mpmath(sev):
    f = _mp_pdf(sev)
    x = sev.isf(1e-3)
    lo = sev.support_min if isinstance(sev, Pareto) else 0

    def logF(t):
        return mpmath.log(1 - mpmath.quad(f, [t, mpmath.inf]))

    want = [float(mpmath.diff(logF, mpmath.mpf(x), j)) for j in range(1, 4)]
    got = sev.log_cdf_derivs(x, 3)
    assert np.allclose(got, want, rtol=1e-8, atol=0)
    assert lo < x


@pytest.mark.parametrize("sev", SEVERITIES, ids=lambda s: f"{s.kind}-{s.label()}")
def test_censored_moments_against_quadrature(sev):
    f = _mp_pdf(sev)
    lo = 1 if isinstance(sev, Pareto) else 0
    for x in _points(sev):
        mu = sev.censored_moments(x, 4).mu
        F = mpmath.quad(f, [lo, x])
        for j in range(1, 5):
            want = mpmath.quad(lambda t: t**j * f(t), [lo, min(x, 1.0) if lo == 0 else lo, x]) / F
            assert mu[j - 1] == pytest.approx(float(want), rel=1e-10)


def test_censored_moment_monotone_and_bounded():
    sev = Pareto(0.8)
    xs = [2.0, 10.0, 1e3, 1e6]
    mus = [sev.censored_moments(x, 1).mu[0] for x in xs]
    assert all(a < b for a, b in zip(mus, mus[1:]))
    assert all(1 <= m <= x for m, x in zip(mus, xs))


def test_censored_cumulants_of_moments():
    mu = Lognormal(2.0).censored_moments(50.0, 3).mu
    k = censored_cumulants(mu, 3)
    assert k[0] == pytest.approx(mu[0])
    assert k[1] == pytest.approx(mu[1] - mu[0] ** 2)


def test_moments_and_means():
    assert Pareto(2.0).mean == 2.0
    assert math.isinf(Pareto(0.8).mean)
    assert math.isinf(Levy(1.0).mean)
    assert Lognormal(2.0).mean == pytest.approx(math.exp(2.0))
    assert Pareto(3.0).moment(2) == pytest.approx(3.0)
    assert math.isinf(Pareto(2.0).moment(2))


def test_tail_index():
    assert Levy(1.0).tail_index == 0.5
    assert Pareto(1.2).tail_index == 1.2
    assert Lognormal(2.0).tail_index is None


def test_support_and_parameter_checks():
    with pytest.raises(SupportError):
        Pareto(2.0).pdf_derivs(0.5, 2)
    with pytest.raises(DomainError):
        Lognormal(-1.0)
    with pytest.raises(DomainError):
        Pareto(2.0).quantile(1.0)
    with pytest.raises(DomainError):
        make_severity("weibull", k=1)


def test_levy_quantile_closed_form():
    # F(x) = erfc(sqrt(c/2x)) -> median c / (2 erfc^{-1}(1/2)^2) = 2.198...
    assert Levy(1.0).quantile(0.5) == pytest.approx(2.198109338317733, rel=1e-14)
