"""Model parameters and the quantities shared by every pricing route.

The three drivers (standard, fractional and mixed Brownian motion) lead to
the same Feller-type transition law for ``x = S**(2 - alpha)``; they differ
only through the variance scale ``phi(T)``, whose reciprocal is the
scaling constant ``k`` of the non-central chi-squared arguments.
"""

import contextlib
import contextvars
import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, NumericalOverflow
from .specfun import kummer_m, whittaker_m

# alpha above this is priced with the Black-Scholes-family limit.
ALPHA_GUARD = 2.0 - 1e-6
# |b T| above this is rejected when evaluating phi.
MAX_BT = 50.0
_OVERFLOW = 1e300

# Test hook: multiplies k in chi_args (fault injection for the check suite).
_k_fault = contextvars.ContextVar("k_fault", default=1.0)


@contextlib.contextmanager
def perturbed_k(factor):
    """Scale every k returned by :func:`chi_args` by ``factor`` inside the block."""
    token = _k_fault.set(float(factor))
    try:
        yield
    finally:
        _k_fault.reset(token)


def _finite(value, name):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite number, got {value!r}", name)


@dataclass(frozen=True)
class MarketSpec:
    """Contract economics: spot, strike, continuously compounded rate, maturity."""

    spot: float
    strike: float
    rate: float
    maturity: float

    def __post_init__(self):
        for name in ("spot", "strike", "rate", "maturity"):
            _finite(getattr(self, name), name)
        if self.spot <= 0.0:
            raise DomainError(f"spot must be > 0, got {self.spot}", "s0")
        if self.strike <= 0.0:
            raise DomainError(f"strike must be > 0, got {self.strike}", "strike")
        if self.maturity <= 0.0:
            raise DomainError(f"maturity must be > 0, got {self.maturity}", "maturity")


@dataclass(frozen=True)
class CevSpec:
    """Diffusion scale ``sigma`` and elasticity ``alpha`` of dS = rS dt + sigma S^(alpha/2) dB."""

    sigma: float
    alpha: float

    def __post_init__(self):
        _finite(self.sigma, "sigma")
        _finite(self.alpha, "alpha")
        if self.sigma <= 0.0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}", "sigma")
        if not 0.0 <= self.alpha < 2.0:
            raise DomainError(f"alpha must lie in [0, 2), got {self.alpha}", "alpha")


def _check_hurst(hurst):
    _finite(hurst, "hurst")
    if not 0.5 <= hurst < 1.0:
        raise DomainError(f"hurst must lie in [1/2, 1), got {hurst}", "hurst")


@dataclass(frozen=True)
class Classical:
    """Standard Brownian driver."""

    def variance_weights(self):
        return 1.0, 0.0, 0.5


@dataclass(frozen=True)
class Fractional:
    """Fractional Brownian driver with Hurst exponent ``hurst``."""

    hurst: float

    def __post_init__(self):
        _check_hurst(self.hurst)

    def variance_weights(self):
        return 0.0, 1.0, self.hurst


@dataclass(frozen=True)
class Mixed:
    """Mixed driver ``beta B_t + gamma B^H_t``."""

    beta: float
    gamma: float
    hurst: float

    def __post_init__(self):
        _finite(self.beta, "beta")
        _finite(self.gamma, "gamma")
        _check_hurst(self.hurst)
        if self.beta < 0.0:
            raise DomainError(f"beta must be >= 0, got {self.beta}", "beta")
        if self.gamma < 0.0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}", "gamma")
        if self.beta + self.gamma <= 0.0:
            raise DomainError("beta + gamma must be > 0", "beta")

    def variance_weights(self):
        return self.beta, self.gamma, self.hurst


DriverSpec = Union[Classical, Fractional, Mixed]


@dataclass(frozen=True)
class FellerCoeffs:
    a: float
    b: float
    c: float


@dataclass(frozen=True)
class ChiSquareArgs:
    """Scaling constant and non-central chi-squared arguments of the call formula."""

    k: float
    y: float
    z: float
    phi: float
    dof_plus: float
    dof_minus: float


def feller_coeffs(cev, r):
    """Coefficients (a, b, c) of the Feller equation satisfied by x = S^(2 - alpha)."""
    two_a = 2.0 - cev.alpha
    s2 = cev.sigma * cev.sigma
    return FellerCoeffs(a=0.5 * two_a * two_a * s2, b=r * two_a, c=0.5 * two_a * (1.0 - cev.alpha) * s2)


def x_transform(S, alpha):
    """x = S^(2 - alpha)."""
    if not S > 0.0:
        raise DomainError(f"S must be > 0, got {S}", "S")
    return S ** (2.0 - alpha)


def _exprel(x):
    # (e^x - 1) / x, equal to 1 at 0
    if x == 0.0:
        return 1.0
    return math.expm1(x) / x


def _check_bt(fc, T):
    bt = fc.b * T
    if abs(bt) > MAX_BT:
        raise DomainError(f"|r (2 - alpha) T| = {abs(bt):.4g} exceeds {MAX_BT}", "rate")
    return bt


def phi_classical(fc, T):
    """(a / b)(e^{bT} - 1), continuous at b = 0."""
    bt = _check_bt(fc, T)
    return fc.a * T * _exprel(bt)


def phi_fractional(fc, hurst, T):
    """Variance scale of the fractional driver.

    Evaluated as (a / (2H + 1)) T^{2H} [2H + 1 + bT M(1, 2H + 2; bT)],
    which is the Whittaker expression rewritten through Kummer's M and
    stays finite at b = 0.
    """
    bt = _check_bt(fc, T)
    h2 = 2.0 * hurst
    return fc.a * T ** h2 * (1.0 + bt * kummer_m(1.0, h2 + 2.0, bt) / (h2 + 1.0))


def phi_fractional_whittaker(fc, hurst, T):
    """Same quantity through the printed Whittaker form (requires b > 0)."""
    bt = _check_bt(fc, T)
    if bt <= 0.0:
        raise DomainError("the Whittaker form of phi needs b T > 0", "rate")
    h2 = 2.0 * hurst
    bracket = h2 + 1.0 + math.exp(0.5 * bt) * bt ** (-hurst) * whittaker_m(hurst, hurst + 0.5, bt)
    return fc.a / (h2 + 1.0) * T ** h2 * bracket


def variance_scale_phi(fc, driver, T):
    """phi(T) for the given driver; k = 1 / phi."""
    if not T > 0.0:
        raise DomainError(f"maturity must be > 0, got {T}", "maturity")
    if isinstance(driver, Classical):
        return phi_classical(fc, T)
    if isinstance(driver, Fractional):
        return phi_fractional(fc, driver.hurst, T)
    if isinstance(driver, Mixed):
        out = 0.0
        if driver.gamma:
            out += driver.gamma * phi_fractional(fc, driver.hurst, T)
        if driver.beta:
            out += driver.beta * phi_classical(fc, T)
        return out
    raise TypeError(f"unknown driver {driver!r}")


def _phi_parts_derivs(fc, hurst, T, two_a):
    # phi_H = a T^{2H} g(bT), g(x) = sum_m x^m Gamma(2H+1)/Gamma(2H+1+m),
    # g'(x) = M(2, 2H+2; x) / (2H+1)
    bt = _check_bt(fc, T)
    h2 = 2.0 * hurst
    g = 1.0 + bt * kummer_m(1.0, h2 + 2.0, bt) / (h2 + 1.0)
    dg = kummer_m(2.0, h2 + 2.0, bt) / (h2 + 1.0)
    t2h = T ** h2
    d_t = fc.a * (h2 * T ** (h2 - 1.0) * g + t2h * dg * fc.b)
    d_r = fc.a * t2h * dg * two_a * T
    return d_t, d_r


def phi_derivatives(fc, driver, T, alpha):
    """(d phi / dT, d phi / dr) from term-wise differentiation of the Kummer series."""
    two_a = 2.0 - alpha
    beta, gamma, hurst = driver.variance_weights()
    d_t = d_r = 0.0
    if gamma:
        pt, pr = _phi_parts_derivs(fc, hurst, T, two_a)
        d_t += gamma * pt
        d_r += gamma * pr
    if beta:
        pt, pr = _phi_parts_derivs(fc, 0.5, T, two_a)
        d_t += beta * pt
        d_r += beta * pr
    return d_t, d_r


def chi_args(market, cev, driver):
    """k, y = k S0^(2-alpha) e^{r(2-alpha)T} and z = k E^(2-alpha) for the driver."""
    if cev.alpha > ALPHA_GUARD:
        raise DomainError(f"alpha = {cev.alpha} is too close to 2 for the chi-squared form", "alpha")
    fc = feller_coeffs(cev, market.rate)
    T = market.maturity
    phi = variance_scale_phi(fc, driver, T)
    k = _k_fault.get() / phi
    two_a = 2.0 - cev.alpha
    y = k * market.spot ** two_a * math.exp(fc.b * T)
    z = k * market.strike ** two_a
    if not (y < _OVERFLOW and z < _OVERFLOW):
        raise NumericalOverflow(f"chi-squared arguments overflow (y={y:.3g}, z={z:.3g}); sigma or T too small")
    dof_minus = 2.0 / two_a
    return ChiSquareArgs(k=k, y=y, z=z, phi=phi, dof_plus=dof_minus + 2.0, dof_minus=dof_minus)
