"""Method registry: one callable per approximation id."""

import re

from . import baselines
from .errors import DomainError
from .perturbative import perturbative_series

BASELINE_IDS = (
    "SL", "SL_mean", "OW_implicit", "OW_star", "OW_inf_implicit", "OW_inf_star",
    "BM1", "BM2", "ALB1",
)
_PERT = re.compile(r"^PERT(?:\((\d+)\))?$")


def parse_method(token):
    """``(id, fixed_order)``; ``PERT`` alone takes its orders from the run."""
    token = token.strip()
    if token in BASELINE_IDS:
        return token, None
    m = _PERT.match(token)
    if m:
        return "PERT", None if m.group(1) is None else int(m.group(1))
    raise DomainError(f"unknown method id {token!r}; known: {', '.join(BASELINE_IDS)}, PERT, PERT(k)")


def evaluate(method, sev, freq, alpha, order=None):
    """Point estimate of the alpha quantile by ``method``."""
    if method == "PERT":
        return perturbative_series(sev, freq, alpha, order).value
    if method == "SL":
        return baselines.single_loss(sev, freq, alpha)
    if method == "SL_mean":
        return baselines.mean_corrected(sev, freq, alpha)
    if method == "OW_implicit":
        return baselines.ow_finite(sev, freq, alpha, "implicit").value
    if method == "OW_star":
        return baselines.ow_finite(sev, freq, alpha, "star").value
    if method == "OW_inf_implicit":
        return baselines.ow_infinite(sev, freq, alpha, mode="implicit").value
    if method == "OW_inf_star":
        return baselines.ow_infinite(sev, freq, alpha, mode="star").value
    if method == "BM1":
        return baselines.barbe_mccormick(sev, freq, alpha, 1).value
    if method == "BM2":
        return baselines.barbe_mccormick(sev, freq, alpha, 2).value
    if method == "ALB1":
        return baselines.albrecher_m1(sev, freq, alpha)
    raise DomainError(f"unknown method id {method!r}")
