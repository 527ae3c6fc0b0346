"""Analytical Greeks of the CEV-family call formulas.

All five sensitivities share the bracket

    B = S f(2z; dof + 4, 2y) - E e^{-rT} f(2y; dof, 2z),   dof = 2/(2 - alpha),

because the price depends on (sigma, r, T) only through y, and the
partial derivative in z vanishes.  Theta and rho come in two flavours:
``"printed"`` uses the closed-form chain-rule factors per driver and
``"exact"`` differentiates phi through the Kummer series.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .model import (ALPHA_GUARD, Classical, Fractional, Mixed, chi_args, feller_coeffs,
                    phi_derivatives, phi_fractional)
from .specfun import ncx2_pdf, ncx2_tails

GREEK_NAMES = ("delta", "gamma", "vega", "theta", "rho")


@dataclass(frozen=True)
class GreekReport:
    delta: float
    gamma: float
    vega: float
    theta: float
    rho: float
    model: object
    fd_cross_check: Optional[dict] = None


class _Parts:
    """Quantities shared by every Greek at one parameter point."""

    def __init__(self, market, cev, driver):
        if cev.alpha > ALPHA_GUARD:
            raise DomainError(f"alpha = {cev.alpha} is beyond the analytic Greeks range", "alpha")
        self.market, self.cev, self.driver = market, cev, driver
        self.args = a = chi_args(market, cev, driver)
        self.two_a = 2.0 - cev.alpha
        self.dof = a.dof_minus
        self.S = market.spot
        self.K = market.strike * math.exp(-market.rate * market.maturity)
        y2, z2 = 2.0 * a.y, 2.0 * a.z
        self.f_up4 = ncx2_pdf(z2, self.dof + 4.0, y2)
        self.f_lo = ncx2_pdf(y2, self.dof, z2)
        self.bracket = self.S * self.f_up4 - self.K * self.f_lo
        self.q_up = ncx2_tails(z2, self.dof + 2.0, y2).sf
        self.p_lo = ncx2_tails(y2, self.dof, z2).cdf


def delta(market, cev, driver=Classical()):
    p = _Parts(market, cev, driver)
    d = p.q_up + 2.0 * p.args.y * p.two_a / p.S * p.bracket
    # far in the wings the two terms cancel to roundoff, which can leave -1e-40
    return min(max(d, 0.0), 1.0)


def gamma(market, cev, driver=Classical()):
    p = _Parts(market, cev, driver)
    y, z = p.args.y, p.args.z
    y2, z2 = 2.0 * y, 2.0 * z
    lead = 2.0 * y * p.two_a ** 2
    f_up6 = ncx2_pdf(z2, p.dof + 6.0, y2)
    f_lo2 = ncx2_pdf(y2, p.dof + 2.0, z2)
    first = ((3.0 - cev.alpha) / p.two_a - y) * p.f_up4 + y * f_up6
    second = y * p.f_lo - z * f_lo2
    return lead / p.S * first + lead / p.S ** 2 * p.K * second


def local_vol(cev, spot):
    """sigma S^((alpha - 2)/2), the volatility in which vega is quoted."""
    return cev.sigma * spot ** (0.5 * (cev.alpha - 2.0))


def vega(market, cev, driver=Classical()):
    """dC / d(local vol), with sigma = local_vol * S^((2 - alpha)/2)."""
    p = _Parts(market, cev, driver)
    return -4.0 * p.args.y / local_vol(cev, p.S) * p.bracket


def _dlogy_dT_printed(p):
    T, r = p.market.maturity, p.market.rate
    s2a2 = p.cev.sigma ** 2 * p.two_a ** 2
    d = p.driver
    if isinstance(d, Classical):
        return -r * p.two_a / math.expm1(r * p.two_a * T)
    if isinstance(d, Fractional):
        H = d.hurst
        return -H * T ** (2.0 * H - 1.0) * s2a2 / p.args.phi
    if isinstance(d, Mixed):
        H = d.hurst
        return -s2a2 / p.args.phi * (d.gamma * H * T ** (2.0 * H - 1.0) + 0.5 * d.beta)
    raise TypeError(f"unknown driver {d!r}")


def _dlogy_dr_printed(p):
    T, r = p.market.maturity, p.market.rate
    if r == 0.0:
        raise DomainError("the printed rho formulas are singular at r = 0; use variant='exact'", "rate")
    s2a2 = p.cev.sigma ** 2 * p.two_a ** 2
    phi = p.args.phi
    d = p.driver
    if isinstance(d, Classical):
        return 1.0 / r - p.two_a * T / math.expm1(r * p.two_a * T)
    if isinstance(d, Fractional):
        H = d.hurst
        return 2.0 * H / r - H * s2a2 * T ** (2.0 * H) / (r * phi)
    if isinstance(d, Mixed):
        H = d.hurst
        bt = r * p.two_a * T
        frac = 0.0
        if d.gamma:
            phi_h = phi_fractional(feller_coeffs(p.cev, r), H, T)
            frac = d.gamma * (2.0 * H * phi_h - H * s2a2 * T ** (2.0 * H))
        classical = d.beta * p.two_a * p.cev.sigma ** 2 / (2.0 * r) * (math.expm1(bt) - bt)
        return (frac + classical) / (phi * r)
    raise TypeError(f"unknown driver {d!r}")


def _phi_derivs(p):
    fc = feller_coeffs(p.cev, p.market.rate)
    return phi_derivatives(fc, p.driver, p.market.maturity, p.cev.alpha)


def theta(market, cev, driver=Classical(), variant="printed"):
    """dC / dT (sensitivity to maturity, not to calendar time)."""
    p = _Parts(market, cev, driver)
    if variant == "printed":
        dly = _dlogy_dT_printed(p)
    elif variant == "exact":
        phi_t, _ = _phi_derivs(p)
        dly = market.rate * p.two_a - phi_t / p.args.phi
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return 2.0 * p.args.y * dly * p.bracket + market.rate * p.K * p.p_lo


def rho(market, cev, driver=Classical(), variant="printed"):
    """dC / dr."""
    p = _Parts(market, cev, driver)
    if variant == "printed":
        dly = _dlogy_dr_printed(p)
    elif variant == "exact":
        _, phi_r = _phi_derivs(p)
        dly = p.two_a * market.maturity - phi_r / p.args.phi
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return 2.0 * p.args.y * dly * p.bracket + market.maturity * p.K * p.p_lo


def greeks(market, cev, driver=Classical(), variant="printed", fd_check=False):
    """All five Greeks, optionally with finite-difference counterparts.

    The cross-check uses Richardson-combined central differences at the
    default steps (and half of them); the steps are returned alongside.
    """
    report = dict(
        delta=delta(market, cev, driver),
        gamma=gamma(market, cev, driver),
        vega=vega(market, cev, driver),
        theta=theta(market, cev, driver, variant),
        rho=rho(market, cev, driver, variant),
    )
    fd = None
    if fd_check:
        from .verify import DEFAULT_STEPS, fd_greek_richardson
        fd = {name: fd_greek_richardson(name, market, cev, driver) for name in GREEK_NAMES}
        fd["steps"] = dict(DEFAULT_STEPS)
    return GreekReport(model=driver, fd_cross_check=fd, **report)
