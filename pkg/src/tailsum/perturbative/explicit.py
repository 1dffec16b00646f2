"""Closed-form low-order coefficients, coded independently of the recursion.

x-derivatives are taken with truncated Taylor series ("jets") around
``Q_0``: the density jet comes from the severity's analytic log-derivatives,
``F`` is its integral, censored moments solve
``mu_p' = (f/F)(x^p - mu_p)`` term by term, and ``lambda_a`` is built from
the frequency closed forms with jet ``exp``/``log``. None of this shares code
with the engine's derivative tables.
"""

import math

import numpy as np

from ..bell import set_partitions, stirling2_row
from ..errors import DomainError
from ..frequency import Deterministic, GenericPmf, NegBinomial, Poisson
from .engine import q0_deterministic, q0_random


class Jet:
    """Truncated Taylor series ``sum_k c[k] h^k`` in the offset ``h = x - x0``."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)

    @property
    def n(self):
        return len(self.c) - 1

    @classmethod
    def const(cls, v, n):
        c = np.zeros(n + 1)
        c[0] = v
        return cls(c)

    @classmethod
    def from_derivs(cls, d):
        return cls([v / math.factorial(k) for k, v in enumerate(d)])

    def deriv_value(self, k):
        """``d^k/dx^k`` at ``x0``."""
        return self.c[k] * math.factorial(k)

    def d(self):
        """Derivative jet (one order shorter)."""
        return Jet(self.c[1:] * np.arange(1, len(self.c)))

    def _lift(self, o):
        if isinstance(o, Jet):
            m = min(self.n, o.n)
            return Jet(self.c[: m + 1]), Jet(o.c[: m + 1])
        return self, Jet.const(o, self.n)

    def __add__(self, o):
        a, b = self._lift(o)
        return Jet(a.c + b.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, o):
        a, b = self._lift(o)
        return Jet(a.c - b.c)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, Jet):
            return Jet(self.c * o)
        a, b = self._lift(o)
        return Jet(np.convolve(a.c, b.c)[: a.n + 1])

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, Jet):
            return Jet(self.c / o)
        a, b = self._lift(o)
        out = np.zeros(a.n + 1)
        for k in range(a.n + 1):
            out[k] = (a.c[k] - np.dot(out[:k], b.c[k:0:-1])) / b.c[0]
        return Jet(out)

    def __rtruediv__(self, o):
        return Jet.const(o, self.n) / self

    def __pow__(self, e):
        if isinstance(e, int) and e >= 0:
            out = Jet.const(1.0, self.n)
            for _ in range(e):
                out = out * self
            return out
        return (self.log() * e).exp()

    def exp(self):
        a = self.c
        b = np.zeros_like(a)
        b[0] = math.exp(a[0])
        for k in range(1, len(a)):
            b[k] = sum(j * a[j] * b[k - j] for j in range(1, k + 1)) / k
        return Jet(b)

    def log(self):
        a = self.c
        if a[0] <= 0:
            raise DomainError("jet log of a nonpositive value")
        b = np.zeros_like(a)
        b[0] = math.log(a[0])
        for k in range(1, len(a)):
            b[k] = (a[k] - sum(j * b[j] * a[k - j] for j in range(1, k)) / k) / a[0]
        return Jet(b)


def variable(x0, n):
    c = np.zeros(n + 1)
    c[0] = x0
    if n:
        c[1] = 1.0
    return Jet(c)


class SeverityJets:
    """Jets of f, F, x^p, censored moments and cumulants at a threshold."""

    def __init__(self, sev, x0, n, pmax):
        self.x0, self.n = x0, n
        self.f = Jet.from_derivs(sev.pdf_derivs(x0, n))
        Fc = np.zeros(n + 1)
        Fc[0] = sev.cdf(x0)
        Fc[1:] = self.f.c[:n] / np.arange(1, n + 1)
        self.F = Jet(Fc)
        self.x = variable(x0, n)
        rate = self.f / self.F
        mu0 = sev.censored_moments(x0, pmax).mu
        self.mu = [Jet.const(1.0, n)]
        for p in range(1, pmax + 1):
            xp = self.x**p
            c = np.zeros(n + 1)
            c[0] = mu0[p - 1]
            for k in range(n):
                # (k+1) mu_{k+1} = [rate * (x^p - mu)]_k, which only needs mu_0..mu_k
                c[k + 1] = (rate * (xp - Jet(c))).c[k] / (k + 1)
            self.mu.append(Jet(c))
        self.kappa = [None]
        for j in range(1, pmax + 1):
            acc = self.mu[j]
            for i in range(1, j):
                acc = acc - math.comb(j - 1, i) * self.kappa[j - i] * self.mu[i]
            self.kappa.append(acc)


def lambda_jets(freq, sj, amax):
    """``lambda_a`` for a = 0..amax as jets, from the frequency closed forms."""
    f, F = sj.f, sj.F
    if isinstance(freq, Poisson):
        lam = freq.lam
        base = lam * f * (lam * (F - 1.0)).exp()
        y = lam * F
        return [base * sum((s * y**m for m, s in enumerate(stirling2_row(a)) if s), Jet.const(0.0, sj.n))
                for a in range(amax + 1)]
    if isinstance(freq, NegBinomial):
        p, r, q = freq.p, freq.r, freq.q
        t = q * F
        one_minus = 1.0 - t
        out = []
        for a in range(amax + 1):
            acc = Jet.const(0.0, sj.n)
            for m, s in enumerate(stirling2_row(a)):
                if s:
                    rise = math.prod(r + 1.0 + i for i in range(m))
                    acc = acc + s * rise * t**m * one_minus ** (-r - 1.0 - m)
            out.append(r * q * p**r * f * acc)
        return out
    if isinstance(freq, Deterministic):
        n = freq.n
        Fn = F ** (n - 1) if n > 1 else Jet.const(1.0, sj.n)
        return [float(n) * float(n - 1) ** a * f * Fn for a in range(amax + 1)]
    if isinstance(freq, GenericPmf):
        out = []
        for a in range(amax + 1):
            acc = Jet.const(0.0, sj.n)
            for n, pn in enumerate(freq.probs):
                if n >= 1 and pn > 0:
                    acc = acc + pn * n * float(n - 1) ** a * F ** (n - 1)
            out.append(f * acc)
        return out
    raise DomainError(f"no jet form for frequency {freq!r}")


def _U(s, Q1, lam, kappa):
    """``E_N[f_[N] E[(Q_1 - Y)^s | X]]`` with the partition form of the moments."""
    acc = None
    for q in range(s + 1):
        inner = None
        for sizes in set_partitions(q):
            term = lam[len(sizes)]
            for b in sizes:
                term = term * kappa[b]
            inner = term if inner is None else inner + term
        part = math.comb(s, q) * (-1.0) ** q * Q1 ** (s - q) * inner
        acc = part if acc is None else acc + part
    return acc


def _derivative(j, k):
    """``d^k`` of a jet, evaluated at the expansion point."""
    return j.deriv_value(k)


def explicit_random(sev, freq, alpha, order=3):
    """``(Q_0, Q_1, Q_2, Q_3[, Q_4])`` for random N from the displayed formulas.

    Q_1..Q_3 transcribe the printed expressions term by term; Q_4 follows the
    general master formula at k = 4.
    """
    if not 1 <= order <= 4:
        raise DomainError("explicit formulas cover orders 1..4")
    q0 = q0_random(sev, freq, alpha)
    n = max(order - 1, 1)
    sj = SeverityJets(sev, q0, n, order)
    lam = lambda_jets(freq, sj, order)
    k1, k2, k3 = (sj.kappa + [None, None, None])[1:4]
    l0 = lam[0].c[0]
    Q1 = lam[1].c[0] / l0 * k1.c[0]
    out = [q0, Q1]
    if order >= 2:
        br = Q1**2 * lam[0] - 2 * Q1 * lam[1] * k1 + lam[1] * k2 + lam[2] * k1 * k1
        out.append(-_derivative(br, 1) / l0)
    if order >= 3:
        Q2 = out[2]
        first = Q1 * lam[0] - lam[1] * k1
        second = (Q1**3 * lam[0] - 3 * Q1**2 * lam[1] * k1 + 3 * Q1 * (lam[1] * k2 + lam[2] * k1 * k1)
                  - lam[1] * k3 - 3 * lam[2] * k1 * k2 - lam[3] * k1 * k1 * k1)
        out.append(-(3 * Q2 * _derivative(first, 1) + _derivative(second, 2)) / l0)
    if order >= 4:
        Q2, Q3 = out[2], out[3]
        kap = sj.kappa
        U1, U2, U4 = (_U(s, Q1, lam, kap) for s in (1, 2, 4))
        acc = (_derivative(U4, 3) + 6 * Q2 * _derivative(U2, 2) + 4 * Q3 * _derivative(U1, 1)
               + 3 * Q2**2 * _derivative(lam[0], 1))
        out.append(-acc / l0)
    return tuple(float(v) for v in out)


def explicit_deterministic(sev, n, alpha):
    """``(Q_0, Q_1, Q_2)`` for fixed ``n`` from the scalar closed forms."""
    q0 = q0_deterministic(sev, n, alpha)
    mu1, mu2 = sev.censored_moments(q0, 2).mu
    var = mu2 - mu1 * mu1
    f, F = sev.pdf(q0), sev.cdf(q0)
    fp_over_f = sev.log_pdf_derivs(q0, 1)[0]
    Q1 = (n - 1) * mu1
    Q2 = -(n - 1) * (((n - 2) * f / F + fp_over_f) * var + f / F * (q0 - mu1) ** 2)
    return float(q0), float(Q1), float(Q2)


def explicit_poisson(sev, lam, alpha):
    """``(Q_0, Q_1, Q_2)`` from the Poisson closed forms."""
    if not alpha > math.exp(-lam):
        raise DomainError("alpha must exceed P[N=0]")
    # F(Q0) = log(alpha)/lam + 1
    q0 = sev.isf(-math.log(alpha) / lam)
    mu1, mu2 = sev.censored_moments(q0, 2).mu
    f = sev.pdf(q0)
    fp_over_f = sev.log_pdf_derivs(q0, 1)[0]
    la = math.log(alpha)
    Q1 = (lam + la) * mu1
    Q2 = -(lam * f + fp_over_f) * (la + lam) * mu2 - lam * f * q0**2
    return float(q0), float(Q1), float(Q2)


def explicit_negbinomial(sev, p, r, alpha):
    """``(Q_0, Q_1, Q_2)`` from the negative binomial closed forms."""
    q = 1.0 - p
    h = p * alpha ** (-1.0 / r)
    if not h < 1.0:
        raise DomainError("alpha must exceed P[N=0]")
    q0 = sev.isf(1.0 - (1.0 - h) / q)
    mu1, mu2 = sev.censored_moments(q0, 2).mu
    f = sev.pdf(q0)
    fpf = sev.log_pdf_derivs(q0, 1)[0]
    Q1 = (1.0 + r) * (alpha ** (1.0 / r) / p - 1.0) * mu1
    br = (mu2 * h * (1 - h) * (q * (r + 2) * f + h * fpf)
          + mu1**2 * (1 - h) ** 2 * (q * (r + 3) * f + h * fpf)
          + mu1 * 2 * q0 * q * h * (1 - h) * f
          + q0**2 * q * h**2 * f)
    Q2 = -(r + 1) / h**3 * br
    return float(q0), float(Q1), float(Q2)


def explicit_low_order(sev, freq_or_n, alpha, order=3):
    """Dispatch: an int means fixed N (orders 1..2), else random N (orders 1..4)."""
    if isinstance(freq_or_n, int):
        return explicit_deterministic(sev, freq_or_n, alpha)
    return explicit_random(sev, freq_or_n, alpha, order)


def high_percentile_terms(sev, freq, alpha):
    """``(Q_1^HP, Q_2^HP)``: the alpha -> 1 forms in frequency moments."""
    q0 = q0_random(sev, freq, alpha)
    nu1, nu2, nu3 = (freq.moment(s) for s in (1, 2, 3))
    sj = SeverityJets(sev, q0, 1, 2)
    mu1, mu2 = sj.mu[1], sj.mu[2]
    f = sj.f
    c1 = nu2 / nu1 - 1.0
    Q1 = c1 * mu1.c[0]
    var = mu2 - mu1 * mu1
    f0 = f.c[0]
    Q2 = (-c1 * _derivative(f * var, 1) / f0
          + ((nu2 / nu1) ** 2 - nu3 / nu1) * _derivative(f * mu1 * mu1, 1) / f0)
    return float(Q1), float(Q2)
