"""Compound-sum samplers.

Random numbers are counter based: sample ``i`` takes its count from
``mix(base_f + (i+1) G)`` and its severity draws from the stream keyed by
``mix(base_s + (i+1) G)``, where ``mix`` is the splitmix64 finaliser and
``G`` the golden-ratio increment. A sample's value therefore depends only on
``(seed, i)``; chunking and thread count only decide who computes it.

Two interchangeable backends fill the sample vector: a numba kernel and a
vectorised numpy path (``TAILSUM_DISABLE_NUMBA=1``). They consume identical
uniforms but use different special-function code, so they agree to rounding,
not bit for bit.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import special

from .. import _accel
from .._accel import njit
from ..errors import DomainError
from ..frequency import Deterministic
from ..severity import Levy, Lognormal, Pareto
from ..specfun import as241

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_FREQ_TAG = 0x6A09E667F3BCC909
_SEV_TAG = 0xBB67AE8584CAA73B
_INV_2_53 = 1.0 / 9007199254740992.0

LEVY, LOGNORMAL, PARETO = 0, 1, 2
# draws per numpy sub-batch; bounds temporary memory at a few hundred MB
_NUMPY_BATCH_DRAWS = 1 << 22


def mix64(z):
    """splitmix64 finaliser on a Python int."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def stream_bases(seed):
    seed = int(seed) & _MASK
    return mix64(seed ^ _FREQ_TAG), mix64(seed ^ _SEV_TAG)


def severity_code(sev):
    if isinstance(sev, Levy):
        return LEVY, sev.c
    if isinstance(sev, Lognormal):
        return LOGNORMAL, sev.sigma
    if isinstance(sev, Pareto):
        return PARETO, sev.a
    raise DomainError(f"no sampler for severity {sev!r}")


def frequency_table(freq):
    """``(fixed_n, n0, cdf)``; ``fixed_n >= 0`` marks a point mass."""
    if isinstance(freq, Deterministic):
        return freq.n, 0, np.ones(1)
    n0, pmf = freq.pmf_table()
    if len(pmf) == 1:
        return int(n0), 0, np.ones(1)
    return -1, int(n0), np.cumsum(pmf)


# ---------------------------------------------------------------- numba path


@njit(cache=True, nogil=True)
def _mix_nb(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def _unit_nb(z):
    return (float(z >> np.uint64(11)) + 0.5) * _INV_2_53


@njit(cache=True, nogil=True)
def _isf_nb(kind, param, u):
    if kind == PARETO:
        return math.exp(-math.log(u) / param)
    if kind == LOGNORMAL:
        z = -as241(u - 0.5, min(u, 1.0 - u))
        return math.exp(param * z)
    # Levy: S(x) = erf(sqrt(c/2x)); erf^{-1}(u) = ndtri((1+u)/2)/sqrt 2
    e = as241(0.5 * u, 0.5 * (1.0 - u)) / math.sqrt(2.0)
    return param / (2.0 * e * e)


@njit(cache=True, nogil=True)
def _bisect_right(cdf, u):
    lo = 0
    hi = cdf.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if u < cdf[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True, nogil=True)
def _chunk_nb(out, i0, base_f, base_s, fixed_n, n0, cdf, kind, param):
    g = np.uint64(GAMMA)
    one = np.uint64(1)
    top = cdf.shape[0] - 1
    for idx in range(out.shape[0]):
        ctr = np.uint64(i0 + idx) + one
        if fixed_n >= 0:
            n = fixed_n
        else:
            k = _bisect_right(cdf, _unit_nb(_mix_nb(base_f + ctr * g)))
            n = n0 + min(k, top)
        key = _mix_nb(base_s + ctr * g)
        acc = 0.0
        t = np.uint64(0)
        for _ in range(n):
            t += one
            acc += _isf_nb(kind, param, _unit_nb(_mix_nb(key + t * g)))
        out[idx] = acc


# ---------------------------------------------------------------- numpy path


def _mix_np(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _unit_np(z):
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def _isf_np(kind, param, u):
    if kind == PARETO:
        return np.exp(-np.log(u) / param)
    if kind == LOGNORMAL:
        return np.exp(-param * special.ndtri(u))
    e = special.erfinv(u)
    return param / (2.0 * e * e)


def _chunk_np(out, i0, base_f, base_s, fixed_n, n0, cdf, kind, param):
    g = np.uint64(GAMMA)
    n_out = out.shape[0]
    mean_n = max(fixed_n, 1) if fixed_n >= 0 else max(1.0, float(np.searchsorted(cdf, 0.5)) + n0)
    batch = max(1, int(_NUMPY_BATCH_DRAWS // (2 * mean_n)))
    with np.errstate(over="ignore"):
        for s0 in range(0, n_out, batch):
            m = min(batch, n_out - s0)
            ctr = np.arange(i0 + s0 + 1, i0 + s0 + m + 1, dtype=np.uint64)
            if fixed_n >= 0:
                counts = np.full(m, fixed_n, dtype=np.int64)
            else:
                u = _unit_np(_mix_np(np.uint64(base_f) + ctr * g))
                k = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.shape[0] - 1)
                counts = n0 + k.astype(np.int64)
            total = int(counts.sum())
            if total == 0:
                out[s0:s0 + m] = 0.0
                continue
            keys = _mix_np(np.uint64(base_s) + ctr * g)
            owner = np.repeat(np.arange(m), counts)
            starts = np.cumsum(counts) - counts
            t = (np.arange(total, dtype=np.int64) - np.repeat(starts, counts) + 1).astype(np.uint64)
            x = _isf_np(kind, param, _unit_np(_mix_np(np.repeat(keys, counts) + t * g)))
            out[s0:s0 + m] = np.bincount(owner, weights=x, minlength=m)


def backend_name(backend=None):
    if backend is None:
        return "numba" if _accel.USE_NUMBA else "numpy"
    if backend == "numba" and not _accel.HAVE_NUMBA:
        raise DomainError("numba backend requested but numba is not installed")
    if backend not in ("numba", "numpy"):
        raise DomainError(f"unknown backend {backend!r}")
    return backend


def compound_samples(sev, freq, n_samples, seed, chunks=1, workers=None, backend=None):
    """Draw ``n_samples`` compound sums ``sum_{i<=N} L_i``."""
    n_samples = int(n_samples)
    chunks = max(1, min(int(chunks), n_samples))
    backend = backend_name(backend)
    if backend == "numba" and not _accel.USE_NUMBA:
        raise DomainError("numba backend disabled by TAILSUM_DISABLE_NUMBA")
    kernel = _chunk_nb if backend == "numba" else _chunk_np
    kind, param = severity_code(sev)
    fixed_n, n0, cdf = frequency_table(freq)
    base_f, base_s = stream_bases(seed)
    out = np.empty(n_samples)
    edges = np.linspace(0, n_samples, chunks + 1).astype(np.int64)

    def run(c):
        a, b = int(edges[c]), int(edges[c + 1])
        kernel(out[a:b], a, np.uint64(base_f), np.uint64(base_s), int(fixed_n), int(n0), cdf, kind, float(param))

    workers = _accel.max_workers() if workers is None else max(1, int(workers))
    workers = min(workers, chunks)
    if workers == 1:
        for c in range(chunks):
            run(c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(run, range(chunks)))
    return out
