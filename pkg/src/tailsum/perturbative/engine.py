"""Recursive computation of the perturbative series ``Q_0, Q_1, ..., Q_K``.

The quantile of ``Z = X + eps Y`` (X the largest term, Y the rest) is
expanded in ``eps`` around the quantile ``Q_0`` of X. Writing
``phi(s, x) = f_X(x) M_{Y|X}(s | x)``, order k of the expansion reads
``Omega^(k) phi |_{s=0, x=Q_0} = 0`` with operators

    Omega^(1) = D,   D = Q_1 - d_s
    Omega^(k) = Q_k + Omega^(k-1) D d_x + sum_{l=1}^{k-2} C(k-1, l) Q_{k-l} Omega^(l) d_x.

Each ``Omega^(k)`` is stored as a coefficient table ``omega[i, j]`` of
``D^i d_x^j``. Everything else reduces to derivative tables at ``x = Q_0``:
censored moments ``m[i, j] = d_x^j mu_i``, censored cumulants ``k[i, j]``,
and either the conditional mgf of Y (fixed N) or the frequency-weighted
family ``xi_a`` (random N).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..bell import K_MAX, bell_sequence, binom
from ..errors import DomainError, SeriesDivergenceError
from ..frequency import Deterministic, Frequency

DEFAULT_ORDER = 3
DIVERGENCE_FACTOR = 10.0


@dataclass
class EngineWorkspace:
    """Intermediate tables of one evaluation (kept for inspection and tests)."""

    m_table: np.ndarray
    k_table: np.ndarray
    psi: np.ndarray
    phi: np.ndarray = None
    omega: list = field(default_factory=list)
    xi_table: dict = None


@dataclass
class PerturbativeSeries:
    q0: float
    coeffs: tuple  # Q_1..Q_K
    partials: tuple  # Q^(0)..Q^(K)
    alpha: float
    order: int
    diagnostics: tuple  # |Q_k/k!| / |Q^(k-1)| for k = 1..K
    kind: str = ""
    workspace: EngineWorkspace = field(default=None, repr=False, compare=False)

    @property
    def value(self):
        return self.partials[-1]

    def coefficient(self, k):
        return self.q0 if k == 0 else self.coeffs[k - 1]

    def partial(self, k):
        return self.partials[k]


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha!r} not in (0, 1)")


def _check_order(K):
    if int(K) != K or not 0 <= K <= K_MAX:
        raise DomainError(f"order K={K!r} outside [0, {K_MAX}]")


def q0_deterministic(sev, n, alpha):
    """``F^{-1}(alpha^{1/n})``, evaluated through the survival side."""
    _check_alpha(alpha)
    if int(n) != n or n < 1:
        raise DomainError(f"n={n!r} must be a positive integer")
    return sev.isf(-math.expm1(math.log(alpha) / n))


def q0_random(sev, freq, alpha):
    """``F^{-1}(exp(M_N^{-1}(alpha)))``."""
    _check_alpha(alpha)
    s = freq.mgf_inverse(alpha)
    return sev.isf(-math.expm1(s))


def _dpow(x, i, n):
    """``d^n x^i / dx^n``."""
    if n > i:
        return 0.0
    return math.perm(i, n) * x ** (i - n)


def _moment_tables(x, Ft, mu, K, J):
    m = np.zeros((K + 1, J + 1))
    m[0, 0] = 1.0
    m[1:, 0] = mu[:K]
    for j in range(1, J + 1):
        for i in range(K + 1):
            acc = 0.0
            for k in range(j):
                r = j - 1 - k
                acc += binom(j - 1, k) * Ft[k] * (_dpow(x, i, r) - m[i, r])
            m[i, j] = acc
    kt = np.zeros_like(m)
    for i in range(1, K + 1):
        for j in range(J + 1):
            acc = m[i, j]
            for l in range(1, i):
                c = binom(i - 1, l)
                for k in range(j + 1):
                    acc -= c * binom(j, k) * m[l, k] * kt[i - l, j - k]
            kt[i, j] = acc
    return m, kt


def _convolve_s(prev_rows, kt, i, j):
    """``sum_{l<i} sum_{k<=j} C(i-1,l) C(j,k) prev[l][k] kt[i-l][j-k]``."""
    acc = 0.0
    for l in range(i):
        c = binom(i - 1, l)
        row = prev_rows[l]
        for k in range(j + 1):
            acc += c * binom(j, k) * row[k] * kt[i - l, j - k]
    return acc


def _solve(psi, K, guard, q0, alpha, kind, ws):
    """Order-by-order solution of ``Omega^(k) phi = 0`` given ``psi = d_s^i d_x^j phi``."""
    J = psi.shape[1] - 1
    p00 = psi[0, 0]
    if not (p00 > 0 and math.isfinite(p00)):
        raise DomainError(f"degenerate density of the maximum at Q0={q0!r}")
    Q = [q0] + [0.0] * K
    partials = [q0]
    diag = []
    if K == 0:
        return Q, partials, diag
    Q1 = psi[1, 0] / p00
    Q[1] = Q1
    phi = np.zeros((K + 1, J + 1))
    for i in range(K + 1):
        for j in range(J + 1):
            phi[i, j] = sum(binom(i, l) * Q1**l * (-1.0) ** (i - l) * psi[i - l, j] for l in range(i + 1))
    ws.phi = phi
    omega = [None, np.zeros((K + 1, K + 1))]
    omega[1][1, 0] = 1.0

    def push(k):
        term = Q[k] / math.factorial(k)
        prev = partials[-1]
        ratio = abs(term) / abs(prev) if prev else math.inf
        diag.append(ratio)
        partials.append(prev + term)
        if guard and ratio > DIVERGENCE_FACTOR:
            raise SeriesDivergenceError(
                f"|Q_{k}/{k}!| = {abs(term):.6g} exceeds {DIVERGENCE_FACTOR:g} x |Q^({k - 1})| = {abs(prev):.6g}",
                series=PerturbativeSeries(q0, tuple(Q[1:k + 1]), tuple(partials), alpha, k, tuple(diag), kind),
            )

    push(1)
    for k in range(2, K + 1):
        w = np.zeros((K + 1, K + 1))
        for j in range(1, k):
            for i in range(k + 1):
                acc = 0.0
                for l in range(1, k - 1):
                    acc += binom(k - 1, l) * Q[k - l] * omega[l][i, j - 1]
                if i >= 1:
                    acc += omega[k - 1][i - 1, j - 1]
                w[i, j] = acc
        s = 0.0
        for i in range(k + 1):
            for j in range(1, k):
                if w[i, j]:
                    s += w[i, j] * phi[i, j]
        Q[k] = -s / phi[0, 0]
        w[0, 0] = Q[k]
        omega.append(w)
        push(k)
    ws.omega = omega
    return Q, partials, diag


def _finish(q0, Q, partials, diag, alpha, K, kind, ws):
    return PerturbativeSeries(
        q0=float(q0),
        coeffs=tuple(float(v) for v in Q[1:]),
        partials=tuple(float(v) for v in partials),
        alpha=alpha,
        order=K,
        diagnostics=tuple(float(v) for v in diag),
        kind=kind,
        workspace=ws,
    )


def terms_deterministic(sev, n, alpha, K=DEFAULT_ORDER, guard=True):
    """Series for the sum of a fixed number ``n`` of terms."""
    _check_order(K)
    q0 = q0_deterministic(sev, n, alpha)
    J = max(K - 1, 0)
    ft = sev.log_pdf_derivs(q0, J)
    Ft = sev.log_cdf_derivs(q0, J)
    mu = sev.censored_moments(q0, max(K, 1)).mu
    m, kt = _moment_tables(q0, Ft, mu, K, J)

    # d_s^i d_x^j of M_L^{n-1}
    M = np.zeros((K + 1, J + 1))
    M[0, 0] = 1.0
    for i in range(1, K + 1):
        for j in range(J + 1):
            M[i, j] = (n - 1) * _convolve_s(M, kt, i, j)

    # derivatives of f_X = n F^{n-1} f, normalised to f_X(Q0) = 1
    g = [ft[j] + (n - 1) * Ft[j] for j in range(J)]
    fx = bell_sequence(g, J)
    psi = np.zeros((K + 1, J + 1))
    for i in range(K + 1):
        for j in range(J + 1):
            psi[i, j] = sum(binom(j, k) * M[i, j - k] * fx[k] for k in range(j + 1))

    ws = EngineWorkspace(m_table=m, k_table=kt, psi=psi)
    Q, partials, diag = _solve(psi, K, guard, q0, alpha, "deterministic", ws)
    return _finish(q0, Q, partials, diag, alpha, K, "deterministic", ws)


def terms_random(sev, freq, alpha, K=DEFAULT_ORDER, guard=True):
    """Series for a compound sum with random frequency ``freq``."""
    _check_order(K)
    if not isinstance(freq, Frequency):
        raise DomainError("terms_random needs a Frequency model")
    q0 = q0_random(sev, freq, alpha)
    J = max(K - 1, 0)
    Ft = sev.log_cdf_derivs(q0, J)
    mu = sev.censored_moments(q0, max(K, 1)).mu
    m, kt = _moment_tables(q0, Ft, mu, K, J)

    lam = freq.lambda_table(sev, q0, K, J)
    lam = lam / lam[0, 0]
    # xi[i][a] = [d_s^i d_x^j E[(N-1)^a f_[N] M_L^{N-1}] for j = 0..J]
    xi = {0: {a: lam[a] for a in range(K + 1)}}
    for i in range(1, K + 1):
        xi[i] = {}
        for a in range(K - i + 1):
            rows = [xi[l][a + 1] for l in range(i)]
            xi[i][a] = np.array([_convolve_s(rows, kt, i, j) for j in range(J + 1)])
    psi = np.array([xi[i][0] for i in range(K + 1)])

    ws = EngineWorkspace(m_table=m, k_table=kt, psi=psi, xi_table=xi)
    Q, partials, diag = _solve(psi, K, guard, q0, alpha, "random", ws)
    return _finish(q0, Q, partials, diag, alpha, K, "random", ws)


def perturbative_series(sev, freq, alpha, K=DEFAULT_ORDER, guard=True):
    """Dispatch on the frequency: a point mass uses the fixed-N recursion."""
    if isinstance(freq, Deterministic):
        return terms_deterministic(sev, freq.n, alpha, K, guard)
    return terms_random(sev, freq, alpha, K, guard)
