"""Exact and asymptotic results for sums of Levy terms.

A sum of ``n`` i.i.d. Levy(0, c) terms is Levy(0, c n^2), so its quantile is
known in closed form and serves as an exact oracle.
"""

import math
from dataclasses import dataclass

from . import specfun
from .errors import DomainError
from .severity import Levy


@dataclass(frozen=True)
class LevyExact:
    c: float = 1.0
    n: int = 1

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise DomainError(f"levy: c={self.c!r} must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"levy: n={self.n!r} must be a positive integer")

    @property
    def sum_law(self):
        return Levy(self.c * self.n**2)

    def cdf(self, z):
        return self.sum_law.cdf(z)

    def quantile(self, alpha):
        return exact_quantile(self, alpha)


def _check(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha!r} not in (0, 1)")
    return 1.0 - alpha


def exact_quantile(le, alpha):
    """``c n^2 / (2 erf^{-1}(1 - alpha)^2)``."""
    e = specfun.erf_inv(_check(alpha))
    return le.c * le.n**2 / (2.0 * e * e)


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"n={n!r} must be a positive integer")
    return int(n)


def gamma_coefficients(n):
    """``(g1, g2, g3)`` with ``(Q^(k) - Q)/Q ~ g_k (1 - alpha)^2`` as alpha -> 1."""
    n = _check_n(n)
    pi = math.pi
    n2 = n * n
    g1 = ((2 * pi - 5) * n2 - 6 * (pi - 3) * n + (4 * pi - 13)) / (12 * n2)
    g2 = (n - 1) * (n - 2) * (pi - 3) / (6 * n2)
    g3 = (n - 1) * (n - 2) * (pi - 16.0 / 5.0) / (6 * n2)
    return g1, g2, g3


def ow_error_coefficient(n):
    """Leading coefficient of ``(Q_OW - Q)/Q`` in ``(1 - alpha)^2``."""
    n = _check_n(n)
    return math.pi / 6.0 * (n * n - 1) / (n * n)


def coefficient_asymptotics(n):
    """High-percentile forms of ``Q_0..Q_3`` in units of ``2 n^2 c / pi``.

    Row k holds the coefficients of ``(delta^-2, delta^-1, 1)``; the dropped
    remainder is O(delta).
    """
    n = _check_n(n)
    n2 = n * n
    r = (n - 1) / n
    return (
        (1.0, -r, ((n - 1) * (n - 5) - 2 * math.pi) / (12 * n2)),
        (0.0, r, -(n - 1) * (n + math.pi - 3) / (2 * n2)),
        (0.0, 0.0, -(n - 1) * (n + 1) / (6 * n2)),
        (0.0, 0.0, -(n - 1) * (n - 2) / (5 * n2)),
    )


def asymptotic_coefficient(k, n, c, alpha):
    """Leading-order value of ``Q_k`` for ``k <= 3`` near alpha = 1."""
    if k not in (0, 1, 2, 3):
        raise DomainError(f"asymptotic form known for k <= 3, got {k!r}")
    d = _check(alpha)
    a2, a1, a0 = coefficient_asymptotics(n)[k]
    return 2.0 * n * n * c / math.pi * (a2 / d**2 + a1 / d + a0)
