"""Severity models: Levy, lognormal (log-mean 0) and Pareto (support x > 1).

Each model exposes the primitives the perturbative engine consumes: cdf,
density, quantiles, derivatives of ``log f`` and ``log F`` to arbitrary order,
and right-censored moments ``mu_j(x) = E[L^j | L <= x]``.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import specfun
from .bell import bell_sequence, binom, cumulants_from_moments
from .errors import DomainError, SupportError

MAX_DERIV_ORDER = 13


@dataclass(frozen=True)
class CensoredMomentTable:
    """Censored raw moments ``mu[j-1] = E[L^j | L <= x]`` for j = 1..J."""

    x: float
    mu: tuple

    def __len__(self):
        return len(self.mu)


def _check_order(J):
    if J < 0 or J > MAX_DERIV_ORDER:
        raise DomainError(f"derivative order {J} outside [0, {MAX_DERIV_ORDER}]")


def _log_derivs(x, J):
    """j-th derivatives of ``log x`` for j = 1..J."""
    return np.array([(-1.0) ** (j - 1) * math.factorial(j - 1) / x**j for j in range(1, J + 1)])


class Severity(ABC):
    """A positive continuous loss distribution."""

    kind = ""
    support_min = 0.0

    @abstractmethod
    def params(self) -> dict: ...

    @abstractmethod
    def cdf(self, x): ...

    @abstractmethod
    def sf(self, x): ...

    @abstractmethod
    def pdf(self, x): ...

    @abstractmethod
    def quantile(self, p): ...

    @abstractmethod
    def isf(self, q):
        """Upper-tail quantile: ``x`` with ``1 - F(x) = q``."""

    @abstractmethod
    def _log_pdf_derivs(self, x, J): ...

    @abstractmethod
    def _censored_mu(self, x, J): ...

    @abstractmethod
    def moment(self, k):
        """Uncensored raw moment ``E[L^k]`` (``inf`` if it diverges)."""

    @property
    def mean(self):
        return self.moment(1)

    @property
    def tail_index(self):
        """Index ``a`` with ``1 - F`` regularly varying of index ``-a``, or None."""
        return None

    def label(self):
        return ";".join(f"{k}={v!r}" for k, v in self.params().items())

    def _check_interior(self, x):
        if not (x > self.support_min and math.isfinite(x)):
            raise SupportError(f"{self.kind}: x={x!r} not interior to the support")

    def _check_prob(self, p, name="p"):
        if not 0.0 < p < 1.0:
            raise DomainError(f"{self.kind}: {name}={p!r} not in (0, 1)")

    def log_pdf_derivs(self, x, J):
        """``[d^j log f(x) / dx^j for j = 1..J]``."""
        self._check_interior(x)
        _check_order(J)
        return self._log_pdf_derivs(x, J)

    def pdf_derivs(self, x, J):
        """``[d^j f(x) / dx^j for j = 0..J]`` via Faa di Bruno on ``log f``."""
        self._check_interior(x)
        _check_order(J)
        f = self.pdf(x)
        b = bell_sequence(self._log_pdf_derivs(x, J), J)
        return np.array([f * bj for bj in b])

    def log_cdf_derivs(self, x, J):
        """``[d^j log F(x) / dx^j for j = 1..J]``."""
        self._check_interior(x)
        _check_order(J)
        F = self.cdf(x)
        if F <= 0.0:
            raise DomainError(f"{self.kind}: F({x!r}) = 0")
        dF = np.empty(J + 1)
        dF[0] = F
        if J:
            dF[1:] = self.pdf_derivs(x, J - 1)
        out = np.zeros(J + 1)
        for j in range(1, J + 1):
            acc = dF[j]
            for k in range(1, j):
                acc -= binom(j - 1, k) * dF[k] * out[j - k]
            out[j] = acc / F
        return out[1:]

    def censored_moments(self, x, J):
        self._check_interior(x)
        if J < 0 or J > MAX_DERIV_ORDER:
            raise DomainError(f"censored moment order {J} outside [0, {MAX_DERIV_ORDER}]")
        if self.cdf(x) <= 0.0:
            raise DomainError(f"{self.kind}: F({x!r}) = 0")
        return CensoredMomentTable(float(x), tuple(float(v) for v in self._censored_mu(x, J)))


@dataclass(frozen=True)
class Levy(Severity):
    """Levy law with location 0 and scale ``c``: ``F(x) = erfc(sqrt(c / 2x))``."""

    c: float = 1.0
    kind = "levy"

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise DomainError(f"levy: scale c={self.c!r} must be positive")

    def params(self):
        return {"c": self.c}

    @property
    def tail_index(self):
        return 0.5

    def cdf(self, x):
        if x <= 0:
            return 0.0
        return math.erfc(math.sqrt(self.c / (2.0 * x)))

    def sf(self, x):
        if x <= 0:
            return 1.0
        return math.erf(math.sqrt(self.c / (2.0 * x)))

    def pdf(self, x):
        if x <= 0:
            return 0.0
        return math.sqrt(self.c / (2.0 * math.pi)) * x**-1.5 * math.exp(-self.c / (2.0 * x))

    def quantile(self, p):
        self._check_prob(p)
        return self.c / (2.0 * specfun.erfc_inv(p) ** 2)

    def isf(self, q):
        self._check_prob(q, "q")
        return self.c / (2.0 * specfun.erf_inv(q) ** 2)

    def _log_pdf_derivs(self, x, J):
        out = np.empty(J)
        for j in range(1, J + 1):
            fj = math.factorial(j)
            out[j - 1] = (-1.5 * (-1.0) ** (j - 1) * (fj / j) / x**j
                          - 0.5 * self.c * (-1.0) ** j * fj / x ** (j + 1))
        return out

    def _censored_mu(self, x, J):
        # mu_j / x^j = sqrt(t/pi) / erfcx(sqrt t) * int_{-inf}^0 exp((j - 1/2) v - t expm1(-v)) dv
        # with t = c / 2x (the substitution l = x e^v, t e^{-v} = c / 2l).
        t = self.c / (2.0 * x)
        pref = math.sqrt(t / math.pi) / special.erfcx(math.sqrt(t))
        lo_t = -math.log1p(60.0 / t)
        out = []
        for j in range(1, J + 1):
            lo = max(lo_t, -60.0 / (j - 0.5))
            val, _ = integrate.quad(
                lambda v, j=j: math.exp((j - 0.5) * v - t * math.expm1(-v)),
                lo, 0.0, epsabs=0.0, epsrel=1e-13, limit=200,
            )
            out.append(x**j * pref * val)
        return out

    def moment(self, k):
        return 1.0 if k == 0 else math.inf


@dataclass(frozen=True)
class Lognormal(Severity):
    """Lognormal with log-mean 0 and log-sd ``sigma``."""

    sigma: float = 1.0
    kind = "lognormal"

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError(f"lognormal: sigma={self.sigma!r} must be positive")

    def params(self):
        return {"sigma": self.sigma}

    def cdf(self, x):
        if x <= 0:
            return 0.0
        return specfun.ndtr(math.log(x) / self.sigma)

    def sf(self, x):
        if x <= 0:
            return 1.0
        return specfun.norm_sf(math.log(x) / self.sigma)

    def pdf(self, x):
        if x <= 0:
            return 0.0
        z = math.log(x) / self.sigma
        return specfun.norm_pdf(z) / (x * self.sigma)

    def quantile(self, p):
        self._check_prob(p)
        return math.exp(self.sigma * specfun.ndtri(p))

    def isf(self, q):
        self._check_prob(q, "q")
        return math.exp(self.sigma * specfun.norm_isf(q))

    def _log_pdf_derivs(self, x, J):
        s2 = self.sigma**2
        lx = math.log(x)
        out = np.empty(J)
        h = 0.0  # harmonic number H_{j-1}
        for j in range(1, J + 1):
            out[j - 1] = (-1.0) ** j * math.factorial(j - 1) / x**j * (1.0 - (h - lx) / s2)
            h += 1.0 / j
        return out

    def _censored_mu(self, x, J):
        z = math.log(x) / self.sigma
        base = special.log_ndtr(z)
        s = self.sigma
        return [math.exp(0.5 * (j * s) ** 2 + special.log_ndtr(z - j * s) - base)
                for j in range(1, J + 1)]

    def moment(self, k):
        return math.exp(0.5 * (k * self.sigma) ** 2)


@dataclass(frozen=True)
class Pareto(Severity):
    """Pareto with ``F(x) = 1 - x^{-a}`` on ``x > 1``."""

    a: float = 2.0
    kind = "pareto"
    support_min = 1.0

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError(f"pareto: tail index a={self.a!r} must be positive")

    def params(self):
        return {"a": self.a}

    @property
    def tail_index(self):
        return self.a

    def cdf(self, x):
        if x <= 1.0:
            return 0.0
        return -math.expm1(-self.a * math.log(x))

    def sf(self, x):
        if x <= 1.0:
            return 1.0
        return x**-self.a

    def pdf(self, x):
        if x <= 1.0:
            return 0.0
        return self.a * x ** (-1.0 - self.a)

    def quantile(self, p):
        self._check_prob(p)
        return math.exp(-math.log1p(-p) / self.a)

    def isf(self, q):
        self._check_prob(q, "q")
        return q ** (-1.0 / self.a)

    def _log_pdf_derivs(self, x, J):
        return -(1.0 + self.a) * _log_derivs(x, J)

    def _censored_mu(self, x, J):
        # a int_1^x l^{j-a-1} dl = a L exprel((j - a) L), L = log x; exprel keeps j ~ a exact
        L = math.log(x)
        F = -math.expm1(-self.a * L)
        return [self.a * L * special.exprel((j - self.a) * L) / F for j in range(1, J + 1)]

    def moment(self, k):
        if k == 0:
            return 1.0
        return self.a / (self.a - k) if self.a > k else math.inf


# module-level spellings of the model operations


def cdf(m, x):
    return m.cdf(x)


def quantile(m, p):
    return m.quantile(p)


def log_pdf_derivs(m, x, J):
    return m.log_pdf_derivs(x, J)


def pdf_derivs(m, x, J):
    return m.pdf_derivs(x, J)


def log_cdf_derivs(m, x, J):
    return m.log_cdf_derivs(x, J)


def censored_moments(m, x, J):
    return m.censored_moments(x, J)


def censored_cumulants(mu, J):
    """Censored cumulants ``[kappa_1..kappa_J]`` from a moment table."""
    seq = mu.mu if isinstance(mu, CensoredMomentTable) else tuple(mu)
    if J > len(seq):
        raise DomainError(f"need {J} censored moments, table has {len(seq)}")
    return cumulants_from_moments(seq, J)


def make_severity(kind, **params):
    kind = kind.lower()
    if kind == "levy":
        return Levy(float(params.get("c", 1.0)))
    if kind == "lognormal":
        return Lognormal(float(params["sigma"]))
    if kind == "pareto":
        return Pareto(float(params["a"]))
    raise DomainError(f"unknown severity kind {kind!r}")
