"""Competing approximations: single-loss and its corrections.

Implicit equations are solved for the survival level
``S(Q) = delta / E[N] - correction(Q)`` by a damped fixed point on the
severity's upper quantile, with a bracketing root finder as fallback.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import specfun
from .errors import (
    ConvergenceError,
    DomainError,
    InfiniteMeanError,
    MethodInapplicableError,
)
from .frequency import Deterministic, Poisson

MAX_ITER = 200
FP_TOL = 1e-14
_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(64)


@dataclass
class ApproximationEstimate:
    method: str
    value: float
    solver: dict = field(default=None)
    order: int = None


def _as_freq(freq_or_n):
    if isinstance(freq_or_n, (int, np.integer)):
        return Deterministic(int(freq_or_n))
    return freq_or_n


def _delta(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha!r} not in (0, 1)")
    return 1.0 - alpha


def _mean(sev, method):
    mu = sev.mean
    if not math.isfinite(mu):
        raise InfiniteMeanError(f"{method}: severity mean is infinite for {sev.kind} {sev.label()}")
    return mu


def _second_factor(freq):
    """``E[N^2]/E[N] - 1 = E[N(N-1)]/E[N]``."""
    return freq.factorial_moment2 / freq.mean


def single_loss(sev, freq_or_n, alpha):
    """``F^{-1}(1 - (1 - alpha)/E[N])``."""
    freq = _as_freq(freq_or_n)
    if not freq.mean > 0:
        raise DomainError("single_loss: E[N] = 0")
    q = _delta(alpha) / freq.mean
    if not q < 1.0:
        raise DomainError(f"single_loss: (1-alpha)/E[N] = {q!r} >= 1")
    return sev.isf(q)


def mean_corrected(sev, freq_or_n, alpha):
    freq = _as_freq(freq_or_n)
    return single_loss(sev, freq, alpha) + (freq.mean - 1.0) * _mean(sev, "SL_mean")


def _solve_survival(sev, target, q_start):
    """Solve ``S(Q) = target(Q)`` for Q.

    Damped fixed point ``Q <- isf(target(Q))``; damping 0.5 switches on once
    successive steps change sign. Falls back to brentq on a geometric bracket.
    """
    x = q_start
    prev_step = 0.0
    damp = 1.0
    for it in range(1, MAX_ITER + 1):
        t = target(x)
        if not 0.0 < t < 1.0:
            break
        new = sev.isf(t)
        step = new - x
        if prev_step and step * prev_step < 0:
            damp = 0.5
        x_next = x + damp * step
        if abs(step) <= FP_TOL * abs(x):
            return new, {"iterations": it, "method": "fixed_point"}
        prev_step = step
        x = x_next

    g = lambda q: sev.sf(q) - target(q)
    lo = q_start
    if g(lo) < 0:
        lo_ = lo
        while g(lo_) < 0:
            lo_ = sev.support_min + 0.5 * (lo_ - sev.support_min)
            if lo_ - sev.support_min < 1e-300:
                raise ConvergenceError("implicit equation: no lower bracket")
        lo = lo_
    hi = 10.0 * max(lo, 1.0)
    n = 0
    while g(hi) > 0:
        hi *= 10.0
        n += 1
        if n > 60:
            raise ConvergenceError("implicit equation: no upper bracket")
    root, r = optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                              maxiter=500, full_output=True)
    if not r.converged:
        raise ConvergenceError("implicit equation: brentq did not converge")
    return root, {"iterations": MAX_ITER + r.iterations, "method": "brentq"}


def _implied_alpha(sev, freq, Q, correction):
    return 1.0 - freq.mean * (sev.sf(Q) + correction(Q))


def ow_finite(sev, freq_or_n, alpha, mode="implicit"):
    """Second-order approximation for finite-mean severities."""
    freq = _as_freq(freq_or_n)
    delta = _delta(alpha)
    mu = _mean(sev, "OW")
    c = _second_factor(freq)
    q_sl = single_loss(sev, freq, alpha)
    if mode == "star":
        # c = E[N] + D - 1 identically
        return ApproximationEstimate("OW_star", q_sl + c * mu)
    if mode != "implicit":
        raise DomainError(f"unknown mode {mode!r}")
    if not sev.pdf(q_sl) > 0:
        raise DomainError("OW: f(Q_SL) = 0")
    corr = lambda q: c * mu * sev.pdf(q)
    Q, info = _solve_survival(sev, lambda q: delta / freq.mean - corr(q), q_sl)
    info["residual"] = abs(_implied_alpha(sev, freq, Q, corr) - alpha)
    return ApproximationEstimate("OW_implicit", Q, info)


def c_a(a):
    """Regular-variation constant of the infinite-mean correction."""
    if not 0.0 < a <= 1.0:
        raise DomainError(f"c_a defined for 0 < a <= 1, got {a!r}")
    if a == 1.0:
        return 1.0
    # rgamma vanishes at a = 1/2, where the correction disappears
    return (1.0 - 1.0 / a) * specfun.gamma_fn(1.0 - a) ** 2 * specfun.rgamma(1.0 - 2.0 * a) / 2.0 + 0.0


def mu_F(sev, x):
    """``int_0^x (1 - F) = S(x) x + F(x) E[L | L <= x]``."""
    return sev.sf(x) * x + sev.cdf(x) * sev.censored_moments(x, 1).mu[0]


def ow_infinite(sev, freq_or_n, alpha, a_index=None, mode="implicit"):
    """Second-order approximation for regularly varying densities with a <= 1."""
    freq = _as_freq(freq_or_n)
    delta = _delta(alpha)
    a = sev.tail_index if a_index is None else a_index
    if a is None:
        raise MethodInapplicableError(f"OW_inf: {sev.kind} is not regularly varying")
    if a > 1.0:
        raise DomainError(f"OW_inf: tail index a={a!r} > 1 (finite mean)")
    ca = c_a(a)
    c = _second_factor(freq)
    q_sl = single_loss(sev, freq, alpha)
    if mode == "star":
        s = delta / freq.mean
        muf = s * q_sl + (1.0 - s) * sev.censored_moments(q_sl, 1).mu[0]
        return ApproximationEstimate("OW_inf_star", q_sl + ca * c * muf)
    if mode != "implicit":
        raise DomainError(f"unknown mode {mode!r}")
    if ca == 0.0:
        return ApproximationEstimate("OW_inf_implicit", q_sl, {"iterations": 0, "method": "exact", "residual": 0.0})
    corr = lambda q: ca * c * mu_F(sev, q) * sev.pdf(q)
    Q, info = _solve_survival(sev, lambda q: delta / freq.mean - corr(q), q_sl)
    info["residual"] = abs(_implied_alpha(sev, freq, Q, corr) - alpha)
    return ApproximationEstimate("OW_inf_implicit", Q, info)


def _gauss_survival(sev, m, sd):
    """``E[S(Z)]`` for ``Z ~ N(m, sd^2)``, with ``S = 1`` below the support."""
    z = m + math.sqrt(2.0) * sd * _GH_NODES
    s = np.array([sev.sf(v) for v in z])
    return float(np.dot(_GH_WEIGHTS, s) / math.sqrt(math.pi))


def barbe_mccormick(sev, freq, alpha, m=1):
    """Poisson-frequency expansion: m=1 resummed translation, m=2 Gaussian kernel."""
    if not isinstance(freq, Poisson):
        raise MethodInapplicableError("BM: defined here for Poisson frequency only")
    delta = _delta(alpha)
    lam = freq.lam
    mu = _mean(sev, "BM")
    q1 = sev.isf(delta / lam) + lam * mu
    if m == 1:
        return ApproximationEstimate("BM1", q1)
    if m != 2:
        raise DomainError(f"BM: m={m!r} not in {{1, 2}}")
    mu2 = sev.moment(2)
    if not math.isfinite(mu2):
        raise InfiniteMeanError(f"BM2: second moment of {sev.kind} {sev.label()} is infinite")
    sd = math.sqrt(lam * mu2)
    target = delta / lam
    g = lambda q: _gauss_survival(sev, q - lam * mu, sd) - target
    lo, hi = q1, q1
    n = 0
    while g(lo) < 0:
        lo = lo - max(sd, 0.5 * abs(lo))
        n += 1
        if n > 200:
            raise ConvergenceError("BM2: no lower bracket")
    while g(hi) > 0:
        hi = hi + max(sd, abs(hi))
        n += 1
        if n > 400:
            raise ConvergenceError("BM2: no upper bracket")
    root, r = optimize.brentq(g, lo, hi, xtol=1e-12 * abs(q1), rtol=4 * np.finfo(float).eps,
                              maxiter=500, full_output=True)
    resid = abs(g(root)) / target
    if resid > 1e-10:
        raise ConvergenceError(f"BM2: residual {resid:.3g} above 1e-10")
    return ApproximationEstimate("BM2", root, {"iterations": r.iterations, "method": "brentq", "residual": resid})


def albrecher_m1(sev, freq_or_n, alpha):
    """Single-loss quantile shifted by ``k_1 = E[N(N-1)]/E[N] mu_L``."""
    freq = _as_freq(freq_or_n)
    mu = _mean(sev, "ALB1")
    return single_loss(sev, freq, alpha) + _second_factor(freq) * mu
