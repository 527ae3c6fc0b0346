import math

import numpy as np
import pytest

from fcev.errors import DomainError
from fcev.model import ALPHA_GUARD, CevSpec, Classical, Fractional, MarketSpec, Mixed
from fcev.pricing import (Method, bs_limit_args, bs_limit_price, call_price, effective_variance, price,
                          q_normal_approx)
from fcev.specfun import ncx2_sf, normal_sf

ATM = MarketSpec(100.0, 100.0, 0.05, 0.5)

# e^{-rT} int (S - E)^+ p(S) dS evaluated in mpmath (40 digits, besseli density,
# phi from quad of its defining integral); independent of the chi-squared tails.
ORACLE = [
    ((100.0, 100.0, 0.05, 0.2, 1.5, 0.5), Classical(), 3.26475832390108180931232820959441085845),
    ((100.0, 100.0, 0.05, 0.2, 1.0, 0.5), Classical(), 2.490623243171194560163620988822329797977),
    ((90.0, 100.0, 0.05, 0.3, 0.5, 1.5), Classical(), 0.002138607196461787089673263942132417568262),
    ((110.0, 100.0, 0.03, 0.25, 1.9, 2.0), Classical(), 20.97389494224971810578778160868650700998),
    ((100.0, 100.0, 0.05, 0.2, 1.5, 0.5), Fractional(0.7), 3.073515980186450185915775550642075957422),
    ((100.0, 100.0, 0.05, 0.2, 1.5, 0.5), Mixed(1.0, 1.0, 0.7), 3.774507890854285082557570030738436046038),
]


def _bs(S, E, r, sigma, T):
    sd = sigma * math.sqrt(T)
    d1 = (math.log(S / E) + (r + 0.5 * sigma * sigma) * T) / sd
    return S * normal_sf(-d1) - E * math.exp(-r * T) * normal_sf(-(d1 - sd))


class TestClosedForm:
    @pytest.mark.parametrize("params,driver,ref", ORACLE)
    def test_oracle(self, params, driver, ref):
        S, E, r, sigma, alpha, T = params
        np.testing.assert_allclose(price(MarketSpec(S, E, r, T), CevSpec(sigma, alpha), driver), ref, rtol=1e-11)

    def test_quote_diagnostics(self):
        q = call_price(ATM, CevSpec(0.2, 1.5))
        assert q.method is Method.CLOSED_FORM
        assert not q.diagnostics.guard_triggered and not q.diagnostics.precision_degraded
        np.testing.assert_allclose(q.diagnostics.k * q.diagnostics.phi, 1.0, rtol=1e-15)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 1.5, 1.9])
    @pytest.mark.parametrize("driver", [Classical(), Fractional(0.7), Mixed(1.0, 1.0, 0.9)])
    def test_no_arbitrage_bounds(self, alpha, driver):
        for S in (70.0, 100.0, 140.0):
            m = MarketSpec(S, 100.0, 0.05, 1.0)
            c = price(m, CevSpec(0.3, alpha), driver)
            assert max(S - 100.0 * math.exp(-0.05), 0.0) - 1e-12 <= c <= S

    @pytest.mark.parametrize("driver", [Classical(), Fractional(0.7), Mixed(1.0, 1.0, 0.7)])
    def test_increasing_in_sigma(self, driver):
        prices = [price(ATM, CevSpec(s, 1.5), driver) for s in (0.1, 0.2, 0.3, 0.5)]
        assert np.all(np.diff(prices) > 0)

    @pytest.mark.parametrize("driver", [Classical(), Fractional(0.7), Mixed(1.0, 1.0, 0.7)])
    def test_increasing_in_maturity(self, driver):
        prices = [price(MarketSpec(100.0, 100.0, 0.05, T), CevSpec(0.2, 1.5), driver) for T in (0.1, 0.5, 1.0, 3.0)]
        assert np.all(np.diff(prices) > 0)

    @pytest.mark.parametrize("driver", [Classical(), Fractional(0.7), Mixed(1.0, 1.0, 0.7)])
    def test_increasing_in_alpha_at_the_money(self, driver):
        prices = [price(ATM, CevSpec(0.2, a), driver) for a in np.linspace(0.5, 1.99, 30)]
        assert np.all(np.diff(prices) > 0)

    @pytest.mark.parametrize("T,sign", [(0.25, -1.0), (0.5, -1.0), (1.5, 1.0), (2.0, 1.0)])
    def test_hurst_split_at_unit_maturity(self, T, sign):
        m = MarketSpec(100.0, 100.0, 0.05, T)
        prices = [price(m, CevSpec(0.2, 1.5), Fractional(H)) for H in (0.5, 0.7, 0.9)]
        assert np.all(sign * np.diff(prices) > 0)

    def test_decreasing_in_strike(self):
        prices = [price(MarketSpec(100.0, E, 0.05, 0.5), CevSpec(0.2, 1.5)) for E in (80.0, 95.0, 100.0, 120.0)]
        assert np.all(np.diff(prices) < 0)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 1.9])
    @pytest.mark.parametrize("T", [0.25, 2.0])
    def test_half_hurst_equals_classical(self, alpha, T):
        m = MarketSpec(100.0, 100.0, 0.05, T)
        c = CevSpec(0.3, alpha)
        np.testing.assert_allclose(price(m, c, Fractional(0.5)), price(m, c, Classical()), rtol=1e-10)

    def test_mixed_collapses(self):
        c = CevSpec(0.2, 1.5)
        assert price(ATM, c, Mixed(1.0, 0.0, 0.8)) == price(ATM, c, Classical())
        assert price(ATM, c, Mixed(0.0, 1.0, 0.8)) == price(ATM, c, Fractional(0.8))

    def test_zero_rate_is_continuous(self):
        c = CevSpec(0.2, 1.5)
        at = price(MarketSpec(100.0, 100.0, 0.0, 0.5), c, Fractional(0.7))
        near = price(MarketSpec(100.0, 100.0, 1e-9, 0.5), c, Fractional(0.7))
        np.testing.assert_allclose(at, near, rtol=1e-7)

    def test_alpha_two_is_rejected(self):
        with pytest.raises(DomainError):
            CevSpec(0.2, 2.0)


class TestBlackScholesLimit:
    def test_classical_limit_matches_black_scholes(self):
        q = bs_limit_price(ATM, 0.2, Classical())
        np.testing.assert_allclose(q.price, _bs(100.0, 100.0, 0.05, 0.2, 0.5), rtol=1e-14)
        assert q.method is Method.BS_LIMIT

    def test_effective_variance(self):
        np.testing.assert_allclose(effective_variance(0.2, Classical(), 2.0), 0.08)
        np.testing.assert_allclose(effective_variance(0.2, Fractional(0.75), 2.0), 0.04 * 2.0 ** 1.5)
        np.testing.assert_allclose(effective_variance(0.2, Mixed(1.0, 1.0, 0.75), 2.0), 0.04 * (2.0 + 2.0 ** 1.5))

    def test_fractional_d1_d2(self):
        d = bs_limit_args(ATM, 0.2, Fractional(0.8))
        v = 0.04 * 0.5 ** 1.6
        np.testing.assert_allclose(d.d1, (0.05 * 0.5 + 0.5 * v) / math.sqrt(v), rtol=1e-14)
        np.testing.assert_allclose(d.d1 - d.d2, math.sqrt(v), rtol=1e-14)

    @pytest.mark.parametrize("driver", [Classical(), Fractional(0.7), Mixed(1.0, 1.0, 0.9)])
    @pytest.mark.parametrize("T", [0.25, 2.0])
    def test_converges_as_alpha_to_two(self, driver, T):
        m = MarketSpec(100.0, 100.0, 0.05, T)
        target = bs_limit_price(m, 0.2, driver).price
        errs = [abs(price(m, CevSpec(0.2, a), driver) - target) / target for a in (1.9, 1.99, 1.999, 1.9999)]
        assert all(e1 > e2 for e1, e2 in zip(errs, errs[1:]))
        assert errs[-1] < 1e-3

    def test_guard_routes_and_flags(self):
        q = call_price(ATM, CevSpec(0.2, 0.5 * (ALPHA_GUARD + 2.0)), Fractional(0.7))
        assert q.method is Method.BS_LIMIT and q.diagnostics.guard_triggered
        np.testing.assert_allclose(q.price, bs_limit_price(ATM, 0.2, Fractional(0.7)).price, rtol=0)

    def test_large_parameters_flag_degraded(self):
        q = call_price(ATM, CevSpec(0.2, 1.999))
        assert q.diagnostics.precision_degraded and q.method is Method.CLOSED_FORM

    def test_normal_approximation(self):
        np.testing.assert_allclose(q_normal_approx(1e4 + 5e3, 1e4, 5e3), 0.5, rtol=1e-15)
        assert abs(q_normal_approx(1.6e4, 1e4, 5e3) - ncx2_sf(1.6e4, 1e4, 5e3)) < 5e-3
        with pytest.raises(DomainError):
            q_normal_approx(1.0, 0.0, 1.0)
