"""Frequency (claim count) models.

Besides pmf, moments and the mgf with its inverse, each model provides the
family ``lambda_a(x) = E[(N-1)^a f_[N](x)]`` that weights the random-N
coefficients, together with its x-derivatives.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .bell import binom, stirling2_row, touchard
from .errors import DomainError, ZeroCountAtomError

MAX_MOMENT_ORDER = 4
# tail mass ignored when tabulating an unbounded pmf for sampling
_TABLE_TAIL = 1e-18


def _tail_cutoff(dist):
    """Smallest n with ``P[N > n] < _TABLE_TAIL``; isf loses accuracy this deep."""
    hi = int(dist.isf(1e-12))
    while dist.logsf(hi) >= math.log(_TABLE_TAIL):
        hi = int(hi * 1.1) + 1
    return hi


def _rising(x, m):
    out = 1.0
    for i in range(m):
        out *= x + i
    return out


class Frequency(ABC):
    """A distribution on the nonnegative integers."""

    kind = ""

    @abstractmethod
    def params(self) -> dict: ...

    @property
    @abstractmethod
    def p0(self):
        """``P[N = 0]``."""

    @abstractmethod
    def mgf_derivs(self, s, K):
        """``[d^k M_N(s) / ds^k for k = 0..K]``."""

    @abstractmethod
    def _mgf_inverse(self, alpha): ...

    @abstractmethod
    def lambda_values(self, F, f, amax):
        """``[lambda_a for a = 0..amax]`` given ``F(x)`` and ``f(x)``."""

    @abstractmethod
    def pmf_table(self):
        """``(n0, probs)``: support start and pmf values covering all but ~1e-18 of the mass."""

    def label(self):
        return ";".join(f"{k}={v!r}" for k, v in self.params().items())

    def mgf(self, s):
        if s > 0:
            raise DomainError(f"{self.kind}: mgf only needed for s <= 0, got {s!r}")
        return float(self.mgf_derivs(s, 0)[0])

    def mgf_inverse(self, alpha):
        """``s <= 0`` with ``M_N(s) = alpha``."""
        if not alpha < 1.0:
            raise DomainError(f"{self.kind}: alpha={alpha!r} must be < 1")
        if alpha <= self.p0:
            raise ZeroCountAtomError(
                f"{self.kind}: alpha={alpha!r} <= P[N=0]={self.p0!r}; quantile sits on the zero atom"
            )
        return self._mgf_inverse(alpha)

    def moment(self, s):
        """Raw moment ``nu_s = E[N^s]``."""
        if not 0 <= s <= MAX_MOMENT_ORDER:
            raise DomainError(f"moment order {s} outside [0, {MAX_MOMENT_ORDER}]")
        return float(self.mgf_derivs(0.0, s)[s])

    @property
    def mean(self):
        return self.moment(1)

    @property
    def variance(self):
        return self.moment(2) - self.mean**2

    @property
    def dispersion(self):
        """Index of dispersion ``Var[N] / E[N]``."""
        return self.variance / self.mean

    @property
    def factorial_moment2(self):
        """``E[N(N-1)]``."""
        return self.moment(2) - self.mean

    def lambda_a(self, sev, x, a):
        F = sev.cdf(x)
        if F <= 0.0:
            raise DomainError(f"lambda_a: F({x!r}) = 0")
        return float(self.lambda_values(F, sev.pdf(x), a)[a])

    def lambda_operator(self, F, f, amax):
        """``lambda_a`` from ``(f/F) d_s (d_s - 1)^a M_N`` at ``s = log F``.

        Expands the operator binomially; kept as a cross-check of
        :meth:`lambda_values`, which avoids the alternating sum.
        """
        d = self.mgf_derivs(math.log(F), amax + 1)
        return np.array([
            f / F * sum(binom(a, b) * (-1.0) ** (a - b) * d[b + 1] for b in range(a + 1))
            for a in range(amax + 1)
        ])

    def lambda_a_derivs(self, sev, x, a, K):
        """``[d^k lambda_a / dx^k for k = 0..K]`` at ``x``."""
        return self.lambda_table(sev, x, a, K)[a]

    def lambda_table(self, sev, x, amax, K):
        """Table ``t[a][k] = d^k lambda_a / dx^k`` for a <= amax, k <= K.

        Uses ``lambda_a' = f~' lambda_a + F~' lambda_{a+1}`` differentiated by
        Leibniz, which needs ``lambda_b`` for b up to ``amax + K``.
        """
        F = sev.cdf(x)
        if F <= 0.0:
            raise DomainError(f"lambda_a: F({x!r}) = 0")
        top = amax + K
        lam = self.lambda_values(F, sev.pdf(x), top)
        fl = sev.log_pdf_derivs(x, K) if K else []
        Fl = sev.log_cdf_derivs(x, K) if K else []
        t = np.zeros((top + 1, K + 1))
        t[:, 0] = lam
        for k in range(1, K + 1):
            # column k of row a needs rows a and a+1 at lower k
            for a in range(top - k, -1, -1):
                acc = 0.0
                for l in range(k):
                    c = binom(k - 1, l)
                    acc += c * (fl[l] * t[a, k - l - 1] + Fl[l] * t[a + 1, k - l - 1])
                t[a, k] = acc
        return t[: amax + 1]


@dataclass(frozen=True)
class Deterministic(Frequency):
    n: int = 1
    kind = "deterministic"

    def __post_init__(self):
        # n = 0 is allowed: it is the empty sum, useful for the sampler
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"deterministic: n={self.n!r} must be a nonnegative integer")
        object.__setattr__(self, "n", int(self.n))

    def params(self):
        return {"n": self.n}

    @property
    def p0(self):
        return 1.0 if self.n == 0 else 0.0

    def mgf_derivs(self, s, K):
        e = math.exp(s * self.n)
        return np.array([float(self.n) ** k * e for k in range(K + 1)])

    def _mgf_inverse(self, alpha):
        return math.log(alpha) / self.n

    def lambda_values(self, F, f, amax):
        n = self.n
        base = f * n * F ** (n - 1)
        return np.array([base * float(n - 1) ** a for a in range(amax + 1)])

    def pmf_table(self):
        return self.n, np.array([1.0])


@dataclass(frozen=True)
class Poisson(Frequency):
    lam: float = 1.0
    kind = "poisson"

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"poisson: lambda={self.lam!r} must be positive")

    def params(self):
        return {"lambda": self.lam}

    @property
    def p0(self):
        return math.exp(-self.lam)

    def mgf_derivs(self, s, K):
        M = math.exp(self.lam * math.expm1(s))
        y = self.lam * math.exp(s)
        return np.array([M * touchard(k, y) for k in range(K + 1)])

    def _mgf_inverse(self, alpha):
        return math.log1p(math.log(alpha) / self.lam)

    def lambda_values(self, F, f, amax):
        # E[N h(N)] = lam E[h(N+1)] turns the weight into Poisson(lam F) moments
        lam = self.lam
        base = lam * f * math.exp(-lam * (1.0 - F))
        y = lam * F
        return np.array([base * touchard(a, y) for a in range(amax + 1)])

    def pmf_table(self):
        hi = _tail_cutoff(stats.poisson(self.lam)) + 1
        return 0, stats.poisson.pmf(np.arange(hi + 1), self.lam)


@dataclass(frozen=True)
class NegBinomial(Frequency):
    """``P[N=n] = C(n+r-1, n) p^r q^n`` with ``q = 1 - p``."""

    p: float = 0.5
    r: float = 1.0
    kind = "negbinomial"

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"negbinomial: p={self.p!r} not in (0, 1)")
        if not (self.r > 0 and math.isfinite(self.r)):
            raise DomainError(f"negbinomial: r={self.r!r} must be positive")

    def params(self):
        return {"p": self.p, "r": self.r}

    @property
    def q(self):
        return 1.0 - self.p

    @property
    def p0(self):
        return self.p**self.r

    def mgf_derivs(self, s, K):
        p, r = self.p, self.r
        u = self.q * math.exp(s)
        out = []
        for k in range(K + 1):
            acc = 0.0
            for m, S in enumerate(stirling2_row(k)):
                if S:
                    acc += S * u**m * _rising(r, m) * (1.0 - u) ** (-r - m)
            out.append(p**r * acc)
        return np.array(out)

    def _mgf_inverse(self, alpha):
        p, r = self.p, self.r
        return math.log((1.0 - p * alpha ** (-1.0 / r)) / self.q)

    def lambda_values(self, F, f, amax):
        # n p_n(r) = (r q / p) p_{n-1}(r + 1): reduces to NB(r+1) moments of F^M
        p, r, q = self.p, self.r, self.q
        t = q * F
        base = f * r * q * p**r
        out = []
        for a in range(amax + 1):
            acc = 0.0
            for m, S in enumerate(stirling2_row(a)):
                if S:
                    acc += S * t**m * _rising(r + 1.0, m) * (1.0 - t) ** (-r - 1.0 - m)
            out.append(base * acc)
        return np.array(out)

    def pmf_table(self):
        hi = _tail_cutoff(stats.nbinom(self.r, self.p)) + 1
        return 0, stats.nbinom.pmf(np.arange(hi + 1), self.r, self.p)


@dataclass(frozen=True)
class GenericPmf(Frequency):
    """Finite-support pmf ``probs[n] = P[N = n]``."""

    probs: tuple = (0.0, 1.0)
    kind = "generic"

    def __post_init__(self):
        pr = tuple(float(v) for v in self.probs)
        if not pr or any(v < 0 or not math.isfinite(v) for v in pr):
            raise DomainError("generic: probabilities must be finite and nonnegative")
        if abs(math.fsum(pr) - 1.0) > 1e-12:
            raise DomainError(f"generic: probabilities sum to {math.fsum(pr)!r}, not 1")
        if len(pr) < 2 or math.fsum(pr[1:]) <= 0:
            raise DomainError("generic: need positive mass on n >= 1")
        object.__setattr__(self, "probs", pr)

    def params(self):
        return {"p": list(self.probs)}

    def label(self):
        return "p=" + "|".join(repr(v) for v in self.probs)

    @property
    def p0(self):
        return self.probs[0]

    def mgf_derivs(self, s, K):
        n = np.arange(len(self.probs), dtype=float)
        w = np.asarray(self.probs) * np.exp(s * n)
        return np.array([math.fsum(w * n**k) for k in range(K + 1)])

    def _mgf_inverse(self, alpha):
        g = lambda s: self.mgf(s) - alpha
        lo = -50.0
        while g(lo) > 0.0:
            lo *= 2.0
            if lo < -1e4:
                raise DomainError(f"generic: alpha={alpha!r} too close to P[N=0]")
        return optimize.brentq(g, lo, 0.0, xtol=1e-14, rtol=4 * np.finfo(float).eps)

    def lambda_values(self, F, f, amax):
        n = np.arange(1, len(self.probs), dtype=float)
        w = np.asarray(self.probs[1:]) * n * F ** (n - 1.0)
        return np.array([f * math.fsum(w * (n - 1.0) ** a) for a in range(amax + 1)])

    def pmf_table(self):
        return 0, np.asarray(self.probs)


def make_frequency(kind, **params):
    kind = kind.lower()
    if kind == "deterministic":
        return Deterministic(int(params["n"]))
    if kind == "poisson":
        return Poisson(float(params["lambda"]))
    if kind == "negbinomial":
        return NegBinomial(float(params["p"]), float(params["r"]))
    if kind == "generic":
        return GenericPmf(tuple(float(v) for v in params["p"]))
    raise DomainError(f"unknown frequency kind {kind!r}")


# module-level spellings


def mgf(m, s):
    return m.mgf(s)


def mgf_inverse(m, alpha):
    return m.mgf_inverse(alpha)


def moments(m, s):
    return m.moment(s)


def lambda_a(m, sev, x, a):
    return m.lambda_a(sev, x, a)


def lambda_a_derivs(m, sev, x, a, K):
    return m.lambda_a_derivs(sev, x, a, K)
