"""Backend selection for the hot Monte Carlo kernels.

Set ``TAILSUM_DISABLE_NUMBA=1`` to force the pure-numpy path even when numba
is importable. ``TAILSUM_THREADS`` caps the worker count; it never changes
results.
"""

import os

_FALSE = {"", "0", "false", "no", "off"}


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in _FALSE


try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _flag("TAILSUM_DISABLE_NUMBA")


def max_workers():
    """Worker cap from ``TAILSUM_THREADS`` (default: cpu count)."""
    raw = os.environ.get("TAILSUM_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 0
        if n > 0:
            return n
    return os.cpu_count() or 1


def njit(*args, **kwargs):
    """``numba.njit`` when the numba backend is active, identity otherwise."""
    if USE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
