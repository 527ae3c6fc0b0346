"""Independent oracles for the closed-form prices and Greeks.

* quadrature of the discounted payoff against the transition density,
* central finite differences of the closed-form price,
* Euler-Maruyama Monte Carlo with absorption at zero (classical driver),
* mass and discounted mean of the transition density.

None of these touch the chi-squared tail functions used by the closed form.
"""

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .density import log_transition_density
from .errors import ConvergenceError, DomainError
from .model import Classical, chi_args
from .pricing import price as _price


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    max_subdivisions: int = 200
    tail_quantile: float = 1.0 - 1e-12

    def __post_init__(self):
        # quadpack refuses relative tolerances below 50 machine epsilons
        if not 1e-13 <= self.rel_tol < 1e-3:
            raise DomainError("rel_tol must lie in [1e-13, 1e-3)", "rel_tol")
        if not 0.99 < self.tail_quantile < 1.0:
            raise DomainError("tail_quantile must lie in (0.99, 1)", "tail_quantile")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1", "max_subdivisions")


@dataclass(frozen=True)
class McSettings:
    paths: int = 100_000
    steps_per_year: int = 1000
    seed: int = 20190601

    def __post_init__(self):
        if self.paths < 1:
            raise DomainError("paths must be >= 1", "paths")
        if self.steps_per_year < 100:
            raise DomainError("steps_per_year must be >= 100", "steps_per_year")


def _w_expectation(market, cev, driver, payoff, w_lower, settings, span_scale=1.0):
    """Integrate payoff(S_T) P(S_T) dS_T over w >= w_lower.

    The integral runs in v = sqrt(w), where the density is close to a
    Gaussian of unit-order width centred on sqrt(y); the range is cut
    where exp(-(v - sqrt(y))^2) drops below the tail quantile (squared).
    """
    args = chi_args(market, cev, driver)
    k, y = args.k, args.y
    q = 1.0 / (2.0 - cev.alpha)
    half_width = span_scale * (2.0 * math.sqrt(-math.log1p(-settings.tail_quantile)) + 2.0)
    vy = math.sqrt(y)
    v_lo = max(math.sqrt(w_lower), vy - half_width, 0.0)
    v_hi = vy + half_width + math.sqrt(q + 1.0)
    if v_lo >= v_hi:
        return 0.0

    def integrand(v):
        w = v * v
        if w == 0.0:
            return 0.0
        s = (w / k) ** q
        lp = log_transition_density(s, market, cev, driver, args)
        # dS/dv = 2 v dS/dw = 2 q S / v
        return payoff(s) * math.exp(lp) * 2.0 * q * s / v

    edges = np.arange(v_lo, v_hi, 1.0).tolist() + [v_hi]
    if len(edges) > 1 and edges[-1] - edges[-2] < 1e-9:
        edges.pop(-2)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            out = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=settings.rel_tol,
                                 limit=settings.max_subdivisions, full_output=1)
        if len(out) > 3 and out[2].get("last", 0) >= settings.max_subdivisions:
            raise ConvergenceError(f"quadrature hit the subdivision cap on [{lo:.6g}, {hi:.6g}]")
        total += out[0]
    return total


def quadrature_price(market, cev, driver=Classical(), settings=QuadratureSettings(), span_scale=1.0):
    """e^{-rT} * integral over S_T > E of (S_T - E) P(S_T | S_0) dS_T."""
    args = chi_args(market, cev, driver)
    E = market.strike
    val = _w_expectation(market, cev, driver, lambda s: s - E, args.z, settings, span_scale)
    return math.exp(-market.rate * market.maturity) * val


def density_diagnostics(market, cev, driver=Classical(), settings=QuadratureSettings()):
    """(total mass, discounted mean) of the transition density.

    The mass falls short of one by the absorption probability at zero;
    the discounted mean should reproduce the spot.
    """
    mass = _w_expectation(market, cev, driver, lambda s: 1.0, 0.0, settings)
    mean = _w_expectation(market, cev, driver, lambda s: s, 0.0, settings)
    return mass, math.exp(-market.rate * market.maturity) * mean


DEFAULT_STEPS = {"delta": 1e-3, "gamma": 1e-2, "vega": 1e-4, "theta": 1e-4, "rho": 1e-5}


def fd_greek(which, market, cev, driver=Classical(), step=None):
    """Second-order central difference of the closed-form price.

    Steps default to ``DEFAULT_STEPS``; delta and gamma steps are
    relative to spot, the others absolute.  Vega bumps the local
    volatility sigma S^((alpha-2)/2) at fixed spot.
    """
    if which not in DEFAULT_STEPS:
        raise ValueError(f"unknown Greek {which!r}")
    h = DEFAULT_STEPS[which] if step is None else step
    if not h > 0.0:
        raise DomainError("step must be > 0", "step")

    def at(**kw):
        m = replace(market, **{k: v for k, v in kw.items() if k in ("spot", "rate", "maturity")})
        c = replace(cev, sigma=kw["sigma"]) if "sigma" in kw else cev
        return _price(m, c, driver)

    if which in ("delta", "gamma"):
        hs = h * market.spot
        up, dn = at(spot=market.spot + hs), at(spot=market.spot - hs)
        if which == "delta":
            return (up - dn) / (2.0 * hs)
        return (up - 2.0 * _price(market, cev, driver) + dn) / (hs * hs)
    if which == "vega":
        scale = market.spot ** (0.5 * (2.0 - cev.alpha))
        lv = cev.sigma / scale
        return (at(sigma=(lv + h) * scale) - at(sigma=(lv - h) * scale)) / (2.0 * h)
    if which == "theta":
        return (at(maturity=market.maturity + h) - at(maturity=market.maturity - h)) / (2.0 * h)
    return (at(rate=market.rate + h) - at(rate=market.rate - h)) / (2.0 * h)


def fd_greek_richardson(which, market, cev, driver=Classical(), step=None):
    """Richardson combination (4 D(h/2) - D(h)) / 3 of two central differences.

    Cancels the O(h^2) truncation term of :func:`fd_greek`, which at the
    default steps is of order 1e-3 relative for gamma and 1e-4 for delta
    and vega.
    """
    h = DEFAULT_STEPS[which] if step is None else step
    coarse = fd_greek(which, market, cev, driver, h)
    fine = fd_greek(which, market, cev, driver, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def fd_noise_bound(which, market, step=None, price_error=1e-12):
    """Rounding bound of :func:`fd_greek_richardson` given an absolute price error.

    Each price carries at most ``price_error``; the bound is that error
    times the sum of the absolute stencil weights of the combination.
    """
    h = DEFAULT_STEPS[which] if step is None else step
    if which in ("delta", "gamma"):
        h *= market.spot
    if which == "gamma":
        weight = 4.0 / 3.0 * 4.0 / (0.25 * h * h) + 1.0 / 3.0 * 4.0 / (h * h)
    else:
        weight = 4.0 / 3.0 * 2.0 / h + 1.0 / 3.0 * 2.0 / (2.0 * h)
    return price_error * weight


class McSummary(NamedTuple):
    price: float
    std_error: float
    lower: float
    upper: float
    paths_in_the_money: int


def _terminal_prices(market, cev, settings):
    n_steps = max(1, math.ceil(market.maturity * settings.steps_per_year))
    dt = market.maturity / n_steps
    growth = math.exp(market.rate * dt)
    vol = cev.sigma * math.sqrt(dt)
    half_alpha = 0.5 * cev.alpha
    rng = np.random.default_rng(settings.seed)
    s = np.full(settings.paths, float(market.spot))
    z = np.empty(settings.paths)
    diff = np.empty(settings.paths)
    for _ in range(n_steps):
        rng.standard_normal(out=z)
        if half_alpha == 0.5:
            np.sqrt(s, out=diff)
        else:
            np.power(s, half_alpha, out=diff)
        diff *= z
        diff *= vol
        s *= growth
        s += diff
        np.maximum(s, 0.0, out=s)
    return s


def mc_summary(market, cev, settings=McSettings(), z_score=1.96):
    """Monte Carlo price with a confidence interval.

    The interval is mean +- z_score * std_error, except when no path ends
    in the money: the sample variance is then zero and says nothing, so
    the upper end becomes the exact binomial bound.  With at most 3/n
    probability of finishing in the money (rule of three, 95%),
    Cauchy-Schwarz gives price <= e^{-rT} sqrt(3/n) sqrt(E[(S_T - E)^2]).
    """
    s = _terminal_prices(market, cev, settings)
    disc = math.exp(-market.rate * market.maturity)
    payoff = np.maximum(s - market.strike, 0.0) * disc
    n = settings.paths
    mean = float(payoff.mean())
    se = float(payoff.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    itm = int(np.count_nonzero(payoff))
    if itm == 0:
        second = float(np.mean((s - market.strike) ** 2))
        return McSummary(mean, se, 0.0, disc * math.sqrt(3.0 / n * second), 0)
    return McSummary(mean, se, mean - z_score * se, mean + z_score * se, itm)


def mc_price_classical(market, cev, settings=McSettings()):
    """Euler-Maruyama Monte Carlo price of the call under the classical driver.

    The drift is integrated exactly over each step, the diffusion uses
    max(S, 0)^(alpha/2) and paths that reach zero stay there.

    Returns:
        (discounted mean payoff, standard error)
    """
    out = mc_summary(market, cev, settings)
    return out.price, out.std_error


__all__ = [
    "DEFAULT_STEPS", "McSettings", "QuadratureSettings", "density_diagnostics", "fd_greek",
    "fd_greek_richardson", "fd_noise_bound", "McSummary", "mc_price_classical", "mc_summary", "quadrature_price",
]
