"""Special functions: erf family and inverses, gamma, standard normal.

The forward functions delegate to the C library through :mod:`math`. The
inverses start from Wichura's AS 241 rational approximation and are polished
with Newton steps on the forward function, which keeps them accurate in the
far tails (arguments down to the smallest normal double).
"""

import math

from ._accel import njit
from .errors import DomainError, PoleError

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(math.pi)
_TWO_OVER_SQRT_PI = 2.0 / SQRT_PI
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@njit(cache=True)
def as241(q, tail):
    """Standard normal quantile from AS 241 (PPND16).

    ``q`` is ``p - 0.5`` and ``tail`` is ``min(p, 1 - p)``; passing both lets
    callers supply whichever is exact, so neither the centre nor the tails
    lose digits to the ``0.5 +/- x`` rounding.
    """
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    r = math.sqrt(-math.log(tail))
    if r <= 5.0:
        r -= 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r -= 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    val = num / den
    if q < 0.0:
        return -val
    return val


def erf(x):
    return math.erf(x)


def erfc(x):
    return math.erfc(x)


def ndtr(x):
    """Standard normal cdf."""
    return 0.5 * math.erfc(-x / SQRT2)


def norm_sf(x):
    return 0.5 * math.erfc(x / SQRT2)


def norm_pdf(x):
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def ndtri(p):
    """Standard normal quantile, accurate for ``p`` down to ~1e-300."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"ndtri: p={p!r} not in (0, 1)")
    z = as241(p - 0.5, min(p, 1.0 - p))
    # one Newton step against whichever tail is small
    if p < 0.5:
        z -= (ndtr(z) - p) / norm_pdf(z)
    else:
        z += (norm_sf(z) - (1.0 - p)) / norm_pdf(z)
    return z


def norm_isf(q):
    """``z`` with ``P(Z > z) = q``; accurate for small ``q``."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"norm_isf: q={q!r} not in (0, 1)")
    z = -as241(q - 0.5, min(q, 1.0 - q))
    if q < 0.5:
        z += (norm_sf(z) - q) / norm_pdf(z)
    else:
        z -= (ndtr(z) - (1.0 - q)) / norm_pdf(z)
    return z


def _newton_erfc(x, y, steps=3):
    for _ in range(steps):
        d = _TWO_OVER_SQRT_PI * math.exp(-x * x)
        if d == 0.0:
            break
        step = (math.erfc(x) - y) / d
        x += step
        if abs(step) <= 1e-17 * abs(x):
            break
    return x


def erfc_inv(y):
    """Inverse of erfc on (0, 2)."""
    if not 0.0 < y < 2.0:
        raise DomainError(f"erfc_inv: y={y!r} not in (0, 2)")
    if y > 1.0:
        return -erfc_inv(2.0 - y)
    if y == 1.0:
        return 0.0
    # erfc(x) = 2 * Phi(-x * sqrt 2)
    half = 0.5 * y
    x = -as241(half - 0.5, half) / SQRT2
    return _newton_erfc(x, y)


def erf_inv(y):
    """Inverse of erf on (-1, 1), accurate for tiny ``|y|``."""
    if not -1.0 < y < 1.0:
        raise DomainError(f"erf_inv: y={y!r} not in (-1, 1)")
    if y == 0.0:
        return 0.0
    ay = abs(y)
    if ay >= 0.5:
        x = erfc_inv(1.0 - ay)
    else:
        # Phi(x sqrt 2) - 1/2 = y / 2; the central AS 241 branch takes q directly
        x = as241(0.5 * ay, 0.5 * (1.0 - ay)) / SQRT2
        for _ in range(3):
            step = (ay - math.erf(x)) / (_TWO_OVER_SQRT_PI * math.exp(-x * x))
            x += step
            if abs(step) <= 1e-17 * x:
                break
    return x if y > 0 else -x


def _is_pole(x):
    return x <= 0.0 and x == math.floor(x)


def gamma_fn(x):
    """Gamma function; raises :class:`PoleError` at nonpositive integers."""
    if _is_pole(x):
        raise PoleError(f"gamma has a pole at {x!r}")
    return math.gamma(x)


def lgamma(x):
    """``log |Gamma(x)|``."""
    if _is_pole(x):
        raise PoleError(f"lgamma has a pole at {x!r}")
    return math.lgamma(x)


def rgamma(x):
    """``1 / Gamma(x)``, zero at the poles."""
    if _is_pole(x):
        return 0.0
    if x > 171.0:
        return 0.0
    return 1.0 / math.gamma(x)
