"""Special functions used by the CEV pricing formulas.

Everything here works on Python floats and is written to stay accurate
for the parameter ranges the pricing formulas produce: non-integer
degrees of freedom, non-centralities up to ~1e6 and Bessel arguments far
beyond the overflow threshold of ``exp``.  Densities are assembled in log
space and exponentiated once.
"""

import math
from typing import NamedTuple

from .errors import ConvergenceError, DomainError

_LN_2PI = math.log(2.0 * math.pi)
_TINY = 1e-17
# Poisson mass left out of the non-central series.
_POISSON_TAIL = 1e-16
# ncx2 switches to the normal approximation above this dof + noncentrality.
NCX2_NORMAL_THRESHOLD = 1e6
_KUMMER_MAX_TERMS = 1_000_000
_GAMMA_MAX_ITER = 1_000_000
_BESSEL_SERIES_PEAK = 5000


def ln_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"ln_gamma requires finite x > 0, got {x}", "x")
    return math.lgamma(x)


def _stirling_error(s):
    # lgamma(s + 1) - [(s + 1/2) ln s - s + ln(2 pi)/2]
    if s >= 15.0:
        s2 = 1.0 / (s * s)
        return (1.0 / 12.0 - s2 * (1.0 / 360.0 - s2 * (1.0 / 1260.0 - s2 * (1.0 / 1680.0 - s2 / 1188.0)))) / s
    return math.lgamma(s + 1.0) - (s + 0.5) * math.log(s) + s - 0.5 * _LN_2PI


def log_gamma_kernel(s, x):
    """ln(x**s * exp(-x) / Gamma(s + 1)) without cancellation for large s.

    This is the log Poisson pmf when ``s`` is an integer, and the term
    linking Q(s, x) to Q(s + 1, x) in general.
    """
    if x == 0.0:
        return 0.0 if s == 0.0 else -math.inf
    if s == 0.0:
        return -x
    t = (x - s) / s
    if t < -0.5:
        # far below the mode log1p gains nothing and x / s may be subnormal
        core = s * (math.log(x) - math.log(s)) - (x - s)
    else:
        core = s * (math.log1p(t) - t)
    return core - 0.5 * (_LN_2PI + math.log(s)) - _stirling_error(s)


def reg_gamma(s, x):
    """Regularized incomplete gamma pair ``(P(s, x), Q(s, x))``.

    The smaller of the two is computed directly (series below ``s + 1``,
    Lentz continued fraction above) and the other by complement.
    """
    if not s > 0.0 or math.isinf(s):
        raise DomainError(f"shape must be finite and > 0, got {s}", "s")
    if not x >= 0.0:
        raise DomainError(f"argument must be >= 0, got {x}", "x")
    if x == 0.0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    kern = log_gamma_kernel(s, x)
    if x < s + 1.0:
        # P = x^s e^-x / Gamma(s+1) * sum_n x^n / ((s+1)...(s+n))
        term = 1.0
        total = 1.0
        ap = s
        for _ in range(_GAMMA_MAX_ITER):
            ap += 1.0
            term *= x / ap
            total += term
            if term < total * _TINY:
                break
        else:
            raise ConvergenceError(f"incomplete gamma series failed for s={s}, x={x}")
        p = math.exp(kern) * total
        p = min(p, 1.0)
        return p, 1.0 - p
    # Q = x^s e^-x / Gamma(s) * CF, modified Lentz.
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise ConvergenceError(f"incomplete gamma fraction failed for s={s}, x={x}")
    q = math.exp(kern + math.log(s)) * h
    q = min(q, 1.0)
    return 1.0 - q, q


def reg_gamma_upper(s, x):
    """Q(s, x) = Gamma(s, x) / Gamma(s)."""
    return reg_gamma(s, x)[1]


def reg_gamma_lower(s, x):
    """P(s, x) = gamma(s, x) / Gamma(s)."""
    return reg_gamma(s, x)[0]


# --- modified Bessel function of the first kind ---------------------------

def _log_ive_series(v, x):
    # Ascending series summed outward from its largest term.
    h2 = 0.25 * x * x
    m0 = int(0.5 * (math.sqrt(v * v + x * x) - v))
    log_peak = (2 * m0 + v) * math.log(0.5 * x) - math.lgamma(m0 + 1.0) - math.lgamma(m0 + v + 1.0)
    total = 1.0
    term = 1.0
    m = m0
    while True:
        term *= h2 / ((m + 1.0) * (m + v + 1.0))
        total += term
        m += 1
        if term < _TINY * total:
            break
    term = 1.0
    m = m0
    while m > 0:
        term *= m * (m + v) / h2
        total += term
        m -= 1
        if term < _TINY * total:
            break
    return log_peak + math.log(total) - x


def _log_ive_hankel(v, x):
    mu = 4.0 * v * v
    total = 1.0
    term = 1.0
    prev = math.inf
    for k in range(1, 200):
        term *= -(mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(term) > prev:
            break
        total += term
        prev = abs(term)
        if prev < _TINY * abs(total):
            break
    return math.log(total) - 0.5 * (_LN_2PI + math.log(x))


def _debye_sum(p, v):
    p2 = p * p
    u1 = p * (3.0 - 5.0 * p2) / 24.0
    u2 = p2 * (81.0 + p2 * (-462.0 + 385.0 * p2)) / 1152.0
    u3 = p * p2 * (30375.0 + p2 * (-369603.0 + p2 * (765765.0 - 425425.0 * p2))) / 414720.0
    u4 = p2 * p2 * (4465125.0 + p2 * (-94121676.0 + p2 * (349922430.0 + p2 * (-446185740.0 + 185910725.0 * p2)))) / 39813120.0
    iv = 1.0 / v
    return 1.0 + iv * (u1 + iv * (u2 + iv * (u3 + iv * u4)))


def _log_ive_debye(v, x):
    z = x / v
    sq = math.sqrt(1.0 + z * z)
    # v * eta - x, with eta = sq + ln(z / (1 + sq)) and sq - z = 1 / (sq + z)
    expo = v / (sq + z) + v * math.log(z / (1.0 + sq))
    return expo - 0.5 * (_LN_2PI + math.log(v)) - 0.5 * math.log(sq) + math.log(_debye_sum(1.0 / sq, v))


def log_ive(v, x):
    """ln(I_v(x) * exp(-x)), the exponentially scaled Bessel I in log form.

    Orders in (-1, 0) are accepted because the non-central chi-squared
    density needs I_{dof/2 - 1} with dof < 2; for those orders the
    K-function correction is below double precision once the asymptotic
    branch is taken.
    """
    if not v > -1.0 or math.isinf(v):
        raise DomainError(f"Bessel order must be finite and > -1, got {v}", "order")
    if not x >= 0.0 or math.isinf(x):
        raise DomainError(f"Bessel argument must be finite and >= 0, got {x}", "x")
    if x == 0.0:
        if v == 0.0:
            return 0.0
        return -math.inf if v > 0.0 else math.inf
    if x >= 30.0 and v * v <= x:
        return _log_ive_hankel(v, x)
    peak = 0.5 * (math.sqrt(v * v + x * x) - v)
    if peak < _BESSEL_SERIES_PEAK or v < 50.0:
        return _log_ive_series(v, x)
    return _log_ive_debye(v, x)


def bessel_i_log_scaled(order, x):
    """ln I_order(x), finite far past the overflow point of I itself."""
    if not order >= 0.0:
        raise DomainError(f"Bessel order must be >= 0, got {order}", "order")
    return log_ive(order, x) + x


# --- confluent hypergeometric functions ----------------------------------

def _is_nonpositive_int(b):
    return b <= 0.0 and b == math.floor(b)


def kummer_m(a, b, z):
    """Kummer's confluent hypergeometric function M(a, b; z).

    Uses the defining power series with Neumaier-compensated summation;
    negative ``z`` goes through Kummer's transformation so the summed
    terms stay of one sign whenever ``b - a`` and ``b`` are positive.
    """
    if _is_nonpositive_int(b):
        raise DomainError(f"b must not be a non-positive integer, got {b}", "b")
    if abs(z) > 1e4:
        raise DomainError(f"|z| must be <= 1e4, got {z}", "z")
    if z == 0.0:
        return 1.0
    if z < 0.0 and not _is_nonpositive_int(a):
        return math.exp(z) * _kummer_series(b - a, b, -z)
    return _kummer_series(a, b, z)


def _kummer_series(a, b, z):
    total = 1.0
    comp = 0.0
    term = 1.0
    for n in range(_KUMMER_MAX_TERMS):
        term *= (a + n) * z / ((b + n) * (n + 1.0))
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        if term == 0.0 or (abs(term) < _TINY * abs(total) and n > abs(z)):
            return total + comp
    raise ConvergenceError(f"Kummer series did not converge for a={a}, b={b}, z={z}")


def whittaker_m(kappa, mu, l):
    """Whittaker M_{kappa,mu}(l) = l^(mu+1/2) e^(-l/2) M(mu - kappa + 1/2, 1 + 2 mu; l)."""
    if not l >= 0.0:
        raise DomainError(f"Whittaker argument must be >= 0, got {l}", "l")
    if _is_nonpositive_int(1.0 + 2.0 * mu):
        raise DomainError(f"1 + 2 mu must not be a non-positive integer, got mu={mu}", "mu")
    if l == 0.0:
        if mu + 0.5 > 0.0:
            return 0.0
        raise DomainError("Whittaker M at l = 0 needs mu + 1/2 > 0", "l")
    return math.exp((mu + 0.5) * math.log(l) - 0.5 * l) * kummer_m(mu - kappa + 0.5, 1.0 + 2.0 * mu, l)


# --- chi-squared family --------------------------------------------------

def _check_ncx2(dof, nc):
    if not dof > 0.0 or math.isinf(dof):
        raise DomainError(f"degrees of freedom must be finite and > 0, got {dof}", "dof")
    if not nc >= 0.0 or math.isinf(nc):
        raise DomainError(f"noncentrality must be finite and >= 0, got {nc}", "nc")


def ncx2_logpdf(l, dof, nc):
    """Log density of the non-central chi-squared law at ``l``."""
    _check_ncx2(dof, nc)
    if not l >= 0.0:
        raise DomainError(f"ncx2 argument must be >= 0, got {l}", "l")
    half = 0.5 * dof
    if l == 0.0:
        if dof > 2.0:
            return -math.inf
        if dof == 2.0:
            return -math.log(2.0) - 0.5 * nc
        return math.inf
    if math.isinf(l):
        return -math.inf
    if nc == 0.0:
        return (half - 1.0) * math.log(0.5 * l) - 0.5 * l - math.lgamma(half) - math.log(2.0)
    arg = math.sqrt(l * nc)
    diff = math.sqrt(l) - math.sqrt(nc)
    return (-math.log(2.0) - 0.5 * diff * diff + (0.25 * dof - 0.5) * math.log(l / nc)
            + log_ive(half - 1.0, arg))


def ncx2_pdf(l, dof, nc):
    """Non-central chi-squared density f(l; dof, nc)."""
    lp = ncx2_logpdf(l, dof, nc)
    if lp < -745.0:
        return 0.0
    return math.exp(lp)


class Ncx2Tails(NamedTuple):
    sf: float
    cdf: float
    degraded: bool


def normal_sf(x):
    """Standard normal upper tail Q_N(x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def ncx2_normal_approx(m, dof, nc):
    """Central-limit approximation of the ncx2 upper tail."""
    return normal_sf((m - (dof + nc)) / math.sqrt(2.0 * (dof + 2.0 * nc)))


def ncx2_tails(m, dof, nc):
    """Upper and lower tail of the non-central chi-squared law at ``m``.

    Each tail is accumulated separately from the Poisson mixture of
    central laws, so neither is formed as one minus the other.  Beyond
    ``dof + nc > NCX2_NORMAL_THRESHOLD`` the normal approximation is used
    and ``degraded`` is set.
    """
    _check_ncx2(dof, nc)
    if not m >= 0.0:
        raise DomainError(f"ncx2 argument must be >= 0, got {m}", "m")
    if m == 0.0:
        return Ncx2Tails(1.0, 0.0, False)
    if math.isinf(m):
        return Ncx2Tails(0.0, 1.0, False)
    if dof + nc > NCX2_NORMAL_THRESHOLD:
        z = (m - (dof + nc)) / math.sqrt(2.0 * (dof + 2.0 * nc))
        return Ncx2Tails(normal_sf(z), normal_sf(-z), True)
    x = 0.5 * m
    half = 0.5 * dof
    if nc == 0.0:
        p, q = reg_gamma(half, x)
        return Ncx2Tails(q, p, False)

    mu = 0.5 * nc
    j0 = int(mu)
    w0 = math.exp(log_gamma_kernel(float(j0), mu))
    p0, q0 = reg_gamma(half + j0, x)
    sf = w0 * q0
    cdf = w0 * p0

    # upward: Q(s+1) = Q(s) + g(s), P(s+1) = P(s) - g(s)
    w, q, p, j = w0, q0, p0, j0
    while True:
        g = math.exp(log_gamma_kernel(half + j, x))
        j += 1
        w *= mu / j
        q += g
        p = max(p - g, 0.0)
        sf += w * q
        cdf += w * p
        r = mu / (j + 1.0)
        if r < 1.0 and w * r / (1.0 - r) < _POISSON_TAIL:
            break

    # downward: Q(s-1) = Q(s) - g(s-1), P(s-1) = P(s) + g(s-1)
    w, q, p, j = w0, q0, p0, j0
    while j > 0:
        w *= j / mu
        j -= 1
        g = math.exp(log_gamma_kernel(half + j, x))
        q = max(q - g, 0.0)
        p += g
        sf += w * q
        cdf += w * p
        r = j / mu
        if w * r / (1.0 - r) < _POISSON_TAIL:
            break
    return Ncx2Tails(min(sf, 1.0), min(cdf, 1.0), False)


def ncx2_sf(m, dof, nc):
    """Complementary distribution Q(m, dof, nc) = P(X > m) for X ~ ncx2(dof, nc)."""
    return ncx2_tails(m, dof, nc).sf


def ncx2_cdf(m, dof, nc):
    """Distribution function 1 - Q(m, dof, nc), accumulated directly."""
    return ncx2_tails(m, dof, nc).cdf
