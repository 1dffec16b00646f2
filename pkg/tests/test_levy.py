import math

import mpmath
import pytest

from tailsum import baselines
from tailsum.errors import DomainError
from tailsum.frequency import Deterministic
from tailsum.levy import (
    LevyExact,
    asymptotic_coefficient,
    coefficient_asymptotics,
    exact_quantile,
    gamma_coefficients,
    ow_error_coefficient,
)
from tailsum.perturbative import perturbative_series
from tailsum.severity import Levy


def test_exact_quantile_median():
    want = 1 / (2 * float(mpmath.erfinv(0.5)) ** 2)
    assert exact_quantile(LevyExact(1.0, 1), 0.5) == pytest.approx(want, rel=1e-15)
    assert want == pytest.approx(2.198, abs=1e-3)


@pytest.mark.parametrize("alpha", [0.9, 0.999, 1 - 1e-9])
def test_quadratic_scaling_in_n(alpha):
    q1 = exact_quantile(LevyExact(2.0, 1), alpha)
    assert exact_quantile(LevyExact(2.0, 37), alpha) == pytest.approx(37**2 * q1, rel=1e-15)


def test_exact_quantile_inverts_sum_cdf():
    le = LevyExact(1.0, 100)
    q = le.quantile(0.999)
    assert le.cdf(q) == pytest.approx(0.999, rel=1e-14)


def test_gamma_coefficients():
    g1, g2, g3 = gamma_coefficients(1)
    assert g2 == 0 and g3 == 0
    assert gamma_coefficients(2)[1] == 0
    g1, g2, g3 = gamma_coefficients(100)
    assert g2 == pytest.approx(0.02289, abs=1e-5)
    assert g2 == pytest.approx(99 * 98 * (math.pi - 3) / 60000, rel=1e-15)


def test_ow_error_coefficient():
    assert ow_error_coefficient(1) == 0
    assert ow_error_coefficient(100) == pytest.approx(0.52355, abs=1e-5)
    assert ow_error_coefficient(10**6) == pytest.approx(math.pi / 6, rel=1e-11)


@pytest.mark.parametrize("alpha", [0.99, 0.999])
def test_engine_error_follows_gamma_law(alpha):
    d = 1 - alpha
    q = exact_quantile(LevyExact(1.0, 100), alpha)
    s = perturbative_series(Levy(1.0), Deterministic(100), alpha, 3)
    for k, g in zip((1, 2, 3), gamma_coefficients(100)):
        ratio = (s.partial(k) - q) / q / (g * d * d)
        assert 0.5 <= ratio <= 2.0, (k, ratio)


@pytest.mark.parametrize("alpha", [0.99, 0.999])
def test_ow_error_follows_law(alpha):
    d = 1 - alpha
    q = exact_quantile(LevyExact(1.0, 100), alpha)
    ow = baselines.ow_infinite(Levy(1.0), 100, alpha).value
    ratio = (ow - q) / q / (ow_error_coefficient(100) * d * d)
    assert 0.5 <= ratio <= 2.0


def test_coefficient_asymptotics_against_engine():
    alpha = 0.9999
    s = perturbative_series(Levy(1.0), Deterministic(100), alpha, 3)
    for k in range(4):
        want = asymptotic_coefficient(k, 100, 1.0, alpha)
        assert s.coefficient(k) == pytest.approx(want, rel=0.05), k
    # Q_2 pi/(2 n^2 c) -> -(n-1)(n+1)/(6 n^2)
    assert s.coefficient(2) * math.pi / (2 * 100**2) == pytest.approx(-99 * 101 / 60000, rel=0.05)


def test_asymptotic_table_single_term():
    # n = 1: only Q_0 survives, and it matches 2c/(pi delta^2) - c/3
    rows = coefficient_asymptotics(1)
    assert rows[1] == (0.0, 0.0, -0.0) or all(v == 0 for v in rows[1])
    assert rows[0][0] == 1.0 and rows[0][1] == 0.0
    assert rows[0][2] == pytest.approx(-2 * math.pi / 12)


def test_checks():
    with pytest.raises(DomainError):
        LevyExact(-1.0, 3)
    with pytest.raises(DomainError):
        LevyExact(1.0, 0)
    with pytest.raises(DomainError):
        gamma_coefficients(0)
    with pytest.raises(DomainError):
        asymptotic_coefficient(4, 10, 1.0, 0.99)
