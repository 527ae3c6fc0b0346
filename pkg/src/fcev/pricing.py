"""European call prices under the classical, fractional and mixed CEV models.

The closed form is Schroder's non-central chi-squared representation

    C = S0 Q(2z; 2 + 2/(2-alpha), 2y) - E e^{-rT} [1 - Q(2y; 2/(2-alpha), 2z)]

with driver-specific (y, z).  The bracket is accumulated as a lower tail
directly rather than as one minus an upper tail.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError
from .model import ALPHA_GUARD, Classical, Fractional, Mixed, chi_args
from .specfun import ncx2_normal_approx, ncx2_tails, normal_sf


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    BS_LIMIT = "bs_limit"


@dataclass(frozen=True)
class Diagnostics:
    phi: float = math.nan
    k: float = math.nan
    y: float = math.nan
    z: float = math.nan
    guard_triggered: bool = False
    precision_degraded: bool = False


@dataclass(frozen=True)
class CallQuote:
    price: float
    method: Method
    diagnostics: Diagnostics = field(default_factory=Diagnostics)


@dataclass(frozen=True)
class BsLimitArgs:
    d1: float
    d2: float
    variance: float


def effective_variance(sigma, driver, T):
    """Total variance sigma^2 (beta T + gamma T^{2H}) of the alpha -> 2 limit."""
    beta, gamma, hurst = driver.variance_weights()
    return sigma * sigma * (beta * T + gamma * T ** (2.0 * hurst))


def bs_limit_args(market, sigma, driver):
    v = effective_variance(sigma, driver, market.maturity)
    if not v > 0.0:
        raise DomainError("effective variance of the Black-Scholes limit is zero", "sigma")
    sd = math.sqrt(v)
    m = math.log(market.spot / market.strike) + market.rate * market.maturity
    return BsLimitArgs(d1=(m + 0.5 * v) / sd, d2=(m - 0.5 * v) / sd, variance=v)


def bs_limit_price(market, sigma, driver, guard_triggered=False):
    """Black-Scholes, fractional Black-Scholes or mixed-fractional Black-Scholes price.

    The driver picks the total variance: sigma^2 T (classical),
    sigma^2 T^{2H} (fractional) or sigma^2 (beta T + gamma T^{2H}) (mixed).
    """
    d = bs_limit_args(market, sigma, driver)
    disc = math.exp(-market.rate * market.maturity)
    price = market.spot * normal_sf(-d.d1) - market.strike * disc * normal_sf(-d.d2)
    return CallQuote(price, Method.BS_LIMIT, Diagnostics(guard_triggered=guard_triggered))


def call_price(market, cev, driver=Classical()):
    """Closed-form European call price.

    Args:
        market: spot, strike, rate and maturity.
        cev: sigma and alpha; alpha above ``ALPHA_GUARD`` is routed to
            :func:`bs_limit_price` and flagged.
        driver: ``Classical()``, ``Fractional(H)`` or ``Mixed(beta, gamma, H)``.

    Returns:
        CallQuote with the price and the (phi, k, y, z) used.
    """
    if cev.alpha > ALPHA_GUARD:
        return bs_limit_price(market, cev.sigma, driver, guard_triggered=True)
    args = chi_args(market, cev, driver)
    upper = ncx2_tails(2.0 * args.z, args.dof_plus, 2.0 * args.y)
    lower = ncx2_tails(2.0 * args.y, args.dof_minus, 2.0 * args.z)
    disc = math.exp(-market.rate * market.maturity)
    price = market.spot * upper.sf - market.strike * disc * lower.cdf
    diag = Diagnostics(phi=args.phi, k=args.k, y=args.y, z=args.z,
                       precision_degraded=upper.degraded or lower.degraded)
    return CallQuote(price, Method.CLOSED_FORM, diag)


def price(market, cev, driver=Classical()):
    """Shorthand for ``call_price(...).price``."""
    return call_price(market, cev, driver).price


def q_normal_approx(m, dof, nc):
    """Q(m, dof, nc) ~ Q_N((m - (dof + nc)) / sqrt(2 (dof + 2 nc)))."""
    if not dof > 0.0 or not nc >= 0.0:
        raise DomainError("need dof > 0 and nc >= 0", "dof")
    return ncx2_normal_approx(m, dof, nc)


__all__ = [
    "BsLimitArgs", "CallQuote", "Classical", "Diagnostics", "Fractional", "Method", "Mixed",
    "bs_limit_args", "bs_limit_price", "call_price", "effective_variance", "price", "q_normal_approx",
]
