"""Complete and centred Bell polynomials.

``bell_complete`` and ``bell_centered`` use the standard recursions and are
what the engine calls. ``bell_partition`` sums over set partitions directly and
is only meant as an oracle for small orders.
"""

from functools import lru_cache
from math import comb

from .errors import DomainError

K_MAX = 10
_BINOM_MAX = 2 * K_MAX + 8
_PARTITION_MAX = 12


def _build_binom(n):
    return tuple(tuple(comb(i, j) for j in range(n + 1)) for i in range(n + 1))


BINOM = _build_binom(_BINOM_MAX)


def binom(n, k):
    if 0 <= k <= n <= _BINOM_MAX:
        return BINOM[n][k]
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def _check_len(k, x, offset=0):
    if k < 0:
        raise DomainError(f"order must be nonnegative, got {k}")
    if len(x) + offset < k:
        raise DomainError(f"order {k} needs {k - offset} arguments, got {len(x)}")


def bell_sequence(x, k):
    """``[B_0, ..., B_k]`` for arguments ``x[0] = x_1, x[1] = x_2, ...``."""
    _check_len(k, x)
    b = [1.0] * (k + 1)
    for n in range(1, k + 1):
        acc = 0.0
        for s in range(1, n + 1):
            acc += binom(n - 1, s - 1) * x[s - 1] * b[n - s]
        b[n] = acc
    return b


def bell_complete(k, x):
    """Complete Bell polynomial ``B_k(x_1, ..., x_k)``; ``x[0]`` is ``x_1``."""
    return bell_sequence(x, k)[k]


def bell_centered(k, x):
    """Centred Bell polynomial ``C_k(x_2, ..., x_k) = B_k(0, x_2, ..., x_k)``.

    ``x[0]`` is ``x_2``. ``C_0 = 1`` and ``C_1 = 0``.
    """
    if k < 0:
        raise DomainError(f"order must be nonnegative, got {k}")
    if k <= 1:
        return 1.0 if k == 0 else 0.0
    _check_len(k, x, offset=1)
    c = [1.0, 0.0] + [0.0] * (k - 1)
    for n in range(2, k + 1):
        acc = x[n - 2]
        for s in range(2, n - 1):
            acc += binom(n - 1, s - 1) * x[s - 2] * c[n - s]
        c[n] = acc
    return c[k]


@lru_cache(maxsize=None)
def set_partitions(k):
    """All set partitions of ``{0..k-1}`` as tuples of block sizes.

    Enumerated through restricted-growth strings.
    """
    if k == 0:
        return ((),)
    out = []
    a = [0] * k

    def rec(i, m):
        if i == k:
            sizes = [0] * (m + 1)
            for v in a:
                sizes[v] += 1
            out.append(tuple(sizes))
            return
        for v in range(m + 2):
            a[i] = v
            rec(i + 1, max(m, v))

    a[0] = 0
    rec(1, 0)
    return tuple(out)


def bell_partition(k, x):
    """``B_k`` as a sum over set partitions of ``prod x_{|block|}``."""
    if k > _PARTITION_MAX:
        raise DomainError(f"partition enumeration limited to k <= {_PARTITION_MAX}")
    _check_len(k, x)
    total = 0.0
    for sizes in set_partitions(k):
        term = 1.0
        for s in sizes:
            term *= x[s - 1]
        total += term
    return total


def moments_from_cumulants(kappas, q):
    """Raw moment ``mu_q = B_q(kappa_1, ..., kappa_q)``."""
    return bell_complete(q, kappas)


def cumulants_from_moments(mu, q):
    """Inverse of :func:`moments_from_cumulants`: ``[kappa_1..kappa_q]``."""
    _check_len(q, mu)
    kap = [0.0] * (q + 1)
    for j in range(1, q + 1):
        acc = mu[j - 1]
        for i in range(1, j):
            acc -= binom(j - 1, i) * kap[j - i] * mu[i - 1]
        kap[j] = acc
    return kap[1:]


@lru_cache(maxsize=None)
def stirling2_row(k):
    """Stirling numbers of the second kind ``[S(k, 0), ..., S(k, k)]``."""
    if k == 0:
        return (1,)
    prev = stirling2_row(k - 1) + (0,)
    return tuple((m * prev[m] if m else 0) + (prev[m - 1] if m else 0) for m in range(k + 1))


def touchard(k, y):
    """Touchard polynomial ``T_k(y) = sum_m S(k, m) y^m`` (Poisson raw moments)."""
    return sum(s * y**m for m, s in enumerate(stirling2_row(k)))
