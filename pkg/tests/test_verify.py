import math

import numpy as np
import pytest

from fcev.errors import ConvergenceError, DomainError
from fcev.model import CevSpec, Classical, Fractional, MarketSpec, Mixed
from fcev.pricing import price
from fcev.verify import (DEFAULT_STEPS, McSettings, QuadratureSettings, fd_greek, fd_greek_richardson,
                         fd_noise_bound, mc_price_classical, mc_summary, quadrature_price)

ATM = MarketSpec(100.0, 100.0, 0.05, 0.5)
SMALL_MC = McSettings(paths=20_000, steps_per_year=200)


class TestQuadrature:
    @pytest.mark.parametrize("driver", [Classical(), Fractional(0.7), Mixed(1.0, 1.0, 0.7)])
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 1.9])
    def test_matches_closed_form(self, driver, alpha):
        c = CevSpec(0.25, alpha)
        np.testing.assert_allclose(quadrature_price(ATM, c, driver), price(ATM, c, driver), rtol=1e-8)

    def test_vanishing_strike_gives_spot(self):
        m = MarketSpec(100.0, 1e-8, 0.05, 0.5)
        c = CevSpec(0.2, 1.5)
        # the absorbed mass is negligible here, so the call is worth the spot
        np.testing.assert_allclose(quadrature_price(m, c), 100.0, rtol=1e-8)

    def test_far_strike_is_worthless(self):
        assert quadrature_price(MarketSpec(100.0, 1000.0, 0.05, 0.25), CevSpec(0.2, 1.5)) < 1e-8 * 100.0

    def test_span_invariance(self):
        c = CevSpec(0.3, 1.2)
        a = quadrature_price(ATM, c, Fractional(0.8))
        b = quadrature_price(ATM, c, Fractional(0.8), span_scale=2.0)
        assert abs(a - b) <= 1e-9 * a

    def test_subdivision_cap_raises(self):
        tight = QuadratureSettings(rel_tol=1e-13, max_subdivisions=1)
        with pytest.raises(ConvergenceError):
            quadrature_price(MarketSpec(100.0, 100.0, 0.05, 2.0), CevSpec(0.6, 0.5), settings=tight)

    @pytest.mark.parametrize("kw", [dict(rel_tol=0.0), dict(rel_tol=1e-15), dict(rel_tol=0.1),
                                    dict(tail_quantile=0.5), dict(max_subdivisions=0)])
    def test_settings_validation(self, kw):
        with pytest.raises(DomainError):
            QuadratureSettings(**kw)


class TestFiniteDifferences:
    @pytest.mark.parametrize("which", sorted(DEFAULT_STEPS))
    def test_richardson_is_step_stable(self, which):
        c = CevSpec(0.2, 1.5)
        h = DEFAULT_STEPS[which]
        if which == "gamma":
            h = 2.5e-3
        a = fd_greek_richardson(which, ATM, c, step=h)
        b = fd_greek_richardson(which, ATM, c, step=0.5 * h)
        assert abs(a - b) <= 1e-6 * abs(a) + 2.0 * fd_noise_bound(which, ATM, 0.5 * h)

    def test_gamma_non_negative(self):
        for mny in (0.7, 1.0, 1.3):
            m = MarketSpec(100.0 * mny, 100.0, 0.05, 0.5)
            assert fd_greek("gamma", m, CevSpec(0.2, 1.5)) >= 0.0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            fd_greek("vanna", ATM, CevSpec(0.2, 1.5))
        with pytest.raises(DomainError):
            fd_greek("delta", ATM, CevSpec(0.2, 1.5), step=0.0)

    def test_noise_bound_scales_with_step(self):
        np.testing.assert_allclose(fd_noise_bound("rho", ATM, 1e-5) / fd_noise_bound("rho", ATM, 2e-5), 2.0)
        np.testing.assert_allclose(fd_noise_bound("gamma", ATM, 1e-2) / fd_noise_bound("gamma", ATM, 2e-2), 4.0)


class TestMonteCarlo:
    def test_deterministic_limit(self):
        m = MarketSpec(100.0, 90.0, 0.05, 0.5)
        p, se = mc_price_classical(m, CevSpec(1e-12, 1.0), McSettings(paths=1000, steps_per_year=100))
        np.testing.assert_allclose(p, 100.0 - 90.0 * math.exp(-0.025), rtol=1e-12)
        assert se < 1e-9

    def test_reproducible(self):
        c = CevSpec(0.2, 1.5)
        assert mc_summary(ATM, c, SMALL_MC) == mc_summary(ATM, c, SMALL_MC)

    def test_interval_contains_closed_form(self):
        c = CevSpec(0.2, 1.5)
        s = mc_summary(ATM, c)
        assert s.lower <= price(ATM, c) <= s.upper
        assert s.paths_in_the_money > 0

    def test_absorbing_paths_stay_non_negative(self):
        s = mc_summary(MarketSpec(1.0, 0.5, 0.05, 2.0), CevSpec(0.8, 1.0), SMALL_MC)
        assert s.price >= 0.5 - 0.5 * math.exp(-0.1) - 4.0 * s.std_error

    def test_degenerate_interval_uses_bound(self):
        m = MarketSpec(50.0, 100.0, 0.05, 0.1)
        s = mc_summary(m, CevSpec(0.2, 1.5), SMALL_MC)
        assert s.paths_in_the_money == 0 and s.price == 0.0
        # upper bound ~ e^{-rT} sqrt(3/n) (E - S0 e^{rT})
        expected = math.exp(-0.005) * math.sqrt(3.0 / SMALL_MC.paths) * (100.0 - 50.0 * math.exp(0.005))
        np.testing.assert_allclose(s.upper, expected, rtol=1e-3)
        assert s.lower == 0.0 and price(m, CevSpec(0.2, 1.5)) <= s.upper

    @pytest.mark.parametrize("kw", [dict(paths=0), dict(steps_per_year=10)])
    def test_settings_validation(self, kw):
        with pytest.raises(DomainError):
            McSettings(**kw)
