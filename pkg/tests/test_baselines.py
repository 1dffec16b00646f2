import math

import pytest

from tailsum import baselines
from tailsum.errors import DomainError, InfiniteMeanError, MethodInapplicableError
from tailsum.frequency import Deterministic, NegBinomial, Poisson
from tailsum.severity import Levy, Lognormal, Pareto

P100 = Poisson(100.0)


def test_single_loss_values():
    assert baselines.single_loss(Pareto(2.0), P100, 0.999) == pytest.approx(316.2277660168378, rel=1e-14)
    assert baselines.single_loss(Lognormal(2.0), 1, 0.99) == pytest.approx(Lognormal(2.0).quantile(0.99), rel=1e-14)
    with pytest.raises(DomainError):
        baselines.single_loss(Pareto(2.0), Poisson(0.5), 0.3)


def test_mean_corrected():
    assert baselines.mean_corrected(Pareto(2.0), P100, 0.999) == pytest.approx(514.2277660168378, rel=1e-14)
    assert baselines.mean_corrected(Pareto(2.0), 1, 0.99) == baselines.single_loss(Pareto(2.0), 1, 0.99)
    with pytest.raises(InfiniteMeanError):
        baselines.mean_corrected(Pareto(0.8), P100, 0.999)
    with pytest.raises(InfiniteMeanError):
        baselines.mean_corrected(Levy(1.0), P100, 0.999)


def test_ow_star_is_poisson_translation():
    # D = 1: Q_SL + lambda mu_L
    got = baselines.ow_finite(Pareto(2.0), P100, 0.999, "star").value
    assert got == pytest.approx(316.2277660168378 + 100 * 2.0, rel=1e-14)


def test_ow_star_dispersion_identity():
    nb = NegBinomial(0.5, 100.0)
    sev = Lognormal(2.0)
    got = baselines.ow_finite(sev, nb, 0.999, "star").value
    want = baselines.single_loss(sev, nb, 0.999) + (nb.mean + nb.dispersion - 1) * sev.mean
    assert got == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("sev,value", [
    (Pareto(2.0), 437.5205919),
    (Lognormal(2.0), 5678.83093),
    (Pareto(1.05), 59824.014),
])
def test_ow_implicit_regressions_and_residuals(sev, value):
    est = baselines.ow_finite(sev, P100, 0.999, "implicit")
    assert est.value == pytest.approx(value, rel=1e-8)
    assert est.solver["residual"] <= 1e-10


def test_ow_implicit_uses_fallback_when_fixed_point_stalls():
    est = baselines.ow_finite(Pareto(2.0), P100, 0.999, "implicit")
    assert est.solver["method"] == "brentq"
    est = baselines.ow_finite(Lognormal(2.0), P100, 0.999, "implicit")
    assert est.solver["residual"] <= 1e-10


def test_ow_star_and_implicit_approach_each_other():
    sev = Pareto(2.0)
    gaps = []
    for d in (1e-3, 1e-5, 1e-7):
        sl = baselines.single_loss(sev, P100, 1 - d)
        star = baselines.ow_finite(sev, P100, 1 - d, "star").value - sl
        imp = baselines.ow_finite(sev, P100, 1 - d, "implicit").value - sl
        gaps.append(abs(imp / star - 1))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05


def test_c_a_values():
    assert baselines.c_a(1.0) == 1.0
    assert baselines.c_a(0.5) == 0.0
    assert math.copysign(1.0, baselines.c_a(0.5)) == 1.0
    a = 0.8
    want = (1 - 1 / a) * math.gamma(1 - a) ** 2 / (2 * math.gamma(1 - 2 * a))
    assert baselines.c_a(a) == pytest.approx(want, rel=1e-14)
    assert baselines.c_a(0.8) == pytest.approx(0.7126126, rel=1e-6)
    with pytest.raises(DomainError):
        baselines.c_a(1.2)


def test_mu_F_is_integral_of_survival():
    sev = Pareto(0.8)
    x = 50.0
    # int_0^x S = 1 + int_1^x t^-a dt
    want = 1 + (x ** (1 - 0.8) - 1) / (1 - 0.8)
    assert baselines.mu_F(sev, x) == pytest.approx(want, rel=1e-12)


def test_ow_infinite():
    sev = Pareto(0.8)
    imp = baselines.ow_infinite(sev, P100, 0.999)
    assert imp.value == pytest.approx(1784316.342, rel=1e-8)
    assert imp.solver["residual"] <= 1e-10
    star = baselines.ow_infinite(sev, P100, 0.999, mode="star")
    assert star.value == pytest.approx(1784330.487, rel=1e-8)
    with pytest.raises(DomainError):
        baselines.ow_infinite(Pareto(1.2), P100, 0.999)
    with pytest.raises(MethodInapplicableError):
        baselines.ow_infinite(Lognormal(2.0), P100, 0.999)


def test_levy_ow_coincides_with_single_loss():
    sev = Levy(1.0)
    sl = baselines.single_loss(sev, 100, 0.999)
    assert baselines.ow_infinite(sev, 100, 0.999).value == sl
    assert baselines.ow_infinite(sev, 100, 0.999, mode="star").value == sl
    assert sl == pytest.approx(6366197723.342468, rel=1e-13)


def test_barbe_mccormick():
    sev = Pareto(3.0)
    bm1 = baselines.barbe_mccormick(sev, P100, 0.999, 1).value
    assert bm1 == pytest.approx(196.4159, rel=1e-6)
    assert bm1 == pytest.approx(baselines.albrecher_m1(sev, P100, 0.999), rel=1e-14)
    bm2 = baselines.barbe_mccormick(sev, P100, 0.999, 2)
    assert bm2.value == pytest.approx(225.7372, rel=1e-6)
    assert bm2.solver["residual"] <= 1e-10
    ln = baselines.barbe_mccormick(Lognormal(2.0), P100, 0.999, 2).value
    assert ln == pytest.approx(5895.773, rel=1e-6)
    with pytest.raises(MethodInapplicableError):
        baselines.barbe_mccormick(sev, NegBinomial(0.5, 10.0), 0.999, 1)
    with pytest.raises(InfiniteMeanError):
        baselines.barbe_mccormick(Pareto(1.5), P100, 0.999, 2)


def test_bm2_collapses_to_bm1_for_tiny_spread():
    # Poisson with tiny lambda and large alpha: the kernel is almost a point
    sev = Pareto(3.0)
    fr = Poisson(1e-3)
    bm1 = baselines.barbe_mccormick(sev, fr, 1 - 1e-9, 1).value
    bm2 = baselines.barbe_mccormick(sev, fr, 1 - 1e-9, 2).value
    assert bm2 == pytest.approx(bm1, rel=1e-3)


def test_albrecher_shift():
    sev = Lognormal(2.0)
    assert baselines.albrecher_m1(sev, P100, 0.999) == pytest.approx(5802.245428975438, rel=1e-12)
    d = baselines.albrecher_m1(sev, Deterministic(10), 0.99) - baselines.single_loss(sev, 10, 0.99)
    assert d == pytest.approx(9 * sev.mean, rel=1e-12)


def test_method_ordering_finite_mean():
    for sev in (Pareto(2.0), Lognormal(2.0)):
        assert baselines.single_loss(sev, P100, 0.999) < baselines.mean_corrected(sev, P100, 0.999)
