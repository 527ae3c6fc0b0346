"""Transition density of S_T given S_0 under the three drivers.

All drivers share one functional form; only ``k`` (through ``y`` and
``w = k S_T^(2-alpha)``) changes.  The density is not renormalised: the
missing mass is the probability of absorption at zero.
"""

import math
from dataclasses import dataclass

from .errors import DomainError
from .model import chi_args
from .specfun import log_ive

_UNDERFLOW = -700.0


@dataclass(frozen=True)
class DensityPoint:
    s_T: float
    value: float


def log_density_w(w, y, order):
    """Log density of w = k S_T^(2-alpha) given y, Bessel order 1/(2-alpha).

    Equals ln[(y/w)^(order/2) e^{-y-w} I_order(2 sqrt(y w))].
    """
    if w == 0.0:
        # limit y^order / Gamma(order + 1) e^{-y}
        return order * math.log(y) - y - math.lgamma(order + 1.0)
    d = math.sqrt(y) - math.sqrt(w)
    return 0.5 * order * math.log(y / w) - d * d + log_ive(order, 2.0 * math.sqrt(y * w))


def log_transition_density(s_T, market, cev, driver, args=None):
    """ln P(S_T | S_0) for the given driver, assembled entirely in log space."""
    if not s_T > 0.0:
        raise DomainError(f"s_T must be > 0, got {s_T}", "s_T")
    if args is None:
        args = chi_args(market, cev, driver)
    two_a = 2.0 - cev.alpha
    order = 1.0 / two_a
    k, y = args.k, args.y
    w = k * s_T ** two_a
    # (2-alpha) k^order (y w^(1-2alpha))^(order/2) e^{-y-w} I_order(2 sqrt(yw))
    d = math.sqrt(y) - math.sqrt(w)
    return (math.log(two_a) + order * math.log(k)
            + 0.5 * order * (math.log(y) + (1.0 - 2.0 * cev.alpha) * math.log(w))
            - d * d + log_ive(order, 2.0 * math.sqrt(y * w)))


def transition_density(s_T, market, cev, driver, args=None):
    """P(S_T | S_0) per unit of currency; zero once the log drops below -700."""
    lp = log_transition_density(s_T, market, cev, driver, args)
    if lp < _UNDERFLOW:
        return 0.0
    return math.exp(lp)


def density_curve(points, market, cev, driver):
    """Evaluate the density on a sequence of terminal prices."""
    args = chi_args(market, cev, driver)
    return [DensityPoint(s, transition_density(s, market, cev, driver, args)) for s in points]
