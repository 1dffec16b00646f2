"""Small-delta structure of the series coefficients for Pareto severities.

With ``e = (1 - alpha)/n`` and unit scale, each ``Q_k/(n-1)`` carries two
families of leading terms: ``A_k e^{1-1/a}``, which does not depend on k,
and ``B_k e^{(k-1)/a}``. For ``k < a`` the second family dominates, making
``e^{1/a}`` the effective expansion parameter.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError
from .frequency import Deterministic
from .perturbative import perturbative_series
from .severity import Pareto

FIT_POINTS = 8
FIT_RANGE = (1e-5, 1e-3)


@dataclass(frozen=True)
class LeadingTerms:
    a: float
    n: int
    terms: tuple  # ((A_k, B_k) for k = 1, 2, 3)
    printed: bool = False

    def exponents(self, k):
        """Exponents of ``e`` for the two families at order k."""
        return 1.0 - 1.0 / self.a, (k - 1) / self.a

    def dominant(self, k):
        """Which family wins as ``delta -> 0``: ``"k_independent"`` or ``"expansion"``."""
        ea, eb = self.exponents(k)
        if ea == eb:
            return "both"
        return "k_independent" if ea < eb else "expansion"

    def evaluate(self, k, delta):
        """Leading-term approximation to ``Q_k`` (not divided by n - 1)."""
        if k not in (1, 2, 3):
            raise DomainError(f"leading terms known for k = 1, 2, 3, got {k!r}")
        e = delta / self.n
        A, B = self.terms[k - 1]
        ea, eb = self.exponents(k)
        return (self.n - 1) * (A * e**ea + B * e**eb)


def _check_a(a):
    if not (a > 0 and math.isfinite(a)):
        raise DomainError(f"pareto: a={a!r} must be positive")
    if a in (1.0, 2.0, 3.0):
        raise PoleError(f"leading terms have a pole at a={a!r}")
    if a == 0.5 or a == round(a):
        raise DomainError(f"leading terms hold for non-integer a != 1/2, got {a!r}")


def leading_terms(a, n, printed=False):
    """Coefficients ``(A_k, B_k)`` of the two leading families for k = 1, 2, 3.

    ``printed=True`` keeps the published minus sign on ``B_2``; the default
    uses the sign confirmed by the recursive engine (see ``fitted_exponent``
    and the tests).
    """
    a = float(a)
    _check_a(a)
    if int(n) != n or n < 2:
        raise DomainError(f"n={n!r} must be an integer >= 2")
    b2 = a * (a + 1) / ((a - 1) ** 2 * (a - 2))
    terms = (
        (-a / (a - 1), a / (a - 1)),
        (-a * (2 * a - 1) / (a - 2), -b2 if printed else b2),
        (
            -2 * a * (a - 1) * (2 * a - 1) / (a - 3),
            2 * a * (a + 1) ** 2 * (a + 2) / ((a - 1) ** 3 * (a - 2) * (a - 3)),
        ),
    )
    return LeadingTerms(a, int(n), terms, printed)


def delta_grid(lo=FIT_RANGE[0], hi=FIT_RANGE[1], points=FIT_POINTS):
    return np.geomspace(lo, hi, points)


def fitted_exponent(a, n, deltas=None, num=2, den=1):
    """Least-squares slope of ``log|Q_num/Q_den|`` against ``log delta``."""
    deltas = delta_grid() if deltas is None else np.asarray(deltas, dtype=float)
    sev, freq = Pareto(a), Deterministic(int(n))
    K = max(num, den)
    y = []
    for d in deltas:
        s = perturbative_series(sev, freq, 1.0 - d, K, guard=False)
        y.append(abs(s.coefficient(num) / s.coefficient(den)))
    slope, _ = np.polyfit(np.log(deltas), np.log(y), 1)
    return float(slope)
