"""Cross-examine one contract with every independent oracle.

The closed form never integrates anything, so agreement with direct
quadrature over the transition density, with a Monte Carlo simulation of
the CEV dynamics and with finite differences of itself is a meaningful
check rather than a tautology.
"""

from fcev import CevSpec, Classical, Fractional, MarketSpec, McSettings, density_diagnostics, price, quadrature_price
from fcev import greeks as G
from fcev.verify import mc_summary

market = MarketSpec(spot=100.0, strike=100.0, rate=0.05, maturity=0.5)
cev = CevSpec(sigma=0.2, alpha=1.5)

cf = price(market, cev)
quad = quadrature_price(market, cev)
print(f"closed form       {cf:.12f}")
print(f"quadrature        {quad:.12f}  (rel. gap {abs(cf - quad) / cf:.1e})")

# smaller run than the acceptance check so the demo stays quick
mc = mc_summary(market, cev, McSettings(paths=20_000, steps_per_year=500))
print(f"monte carlo       {mc.price:.6f} in [{mc.lower:.6f}, {mc.upper:.6f}]")

mass, mean = density_diagnostics(market, cev, Fractional(0.7))
print(f"fractional density: mass {mass:.12f}, discounted mean {mean:.10f}")

rep = G.greeks(market, cev, Classical(), fd_check=True)
print("\n        analytic        finite diff.")
for name in G.GREEK_NAMES:
    a, f = getattr(rep, name), rep.fd_cross_check[name]
    print(f"{name:>6} {a:15.9f} {f:15.9f}  ({abs(a - f) / abs(f):.1e})")

# Theta and rho in closed form versus the exact derivative of the variance scale.
frac = Fractional(0.7)
for name in ("theta", "rho"):
    fn = getattr(G, name)
    print(f"{name} (fractional): printed {fn(market, cev, frac):.10f}, exact {fn(market, cev, frac, 'exact'):.10f}")
