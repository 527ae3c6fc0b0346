"""How the CEV call turns into Black-Scholes as alpha approaches 2.

The closed form is a difference of two noncentral chi-squared tails whose
degrees of freedom and noncentralities blow up like 1/(2 - alpha).  This
script walks alpha towards 2 for the three driving noises and prints the
relative distance to the matching Black-Scholes price, then shows what
happens past the guard, where the library switches to the limit formula.
"""

from fcev import CevSpec, Classical, Fractional, MarketSpec, Mixed, bs_limit_price, call_price

market = MarketSpec(spot=100.0, strike=100.0, rate=0.05, maturity=0.5)
drivers = [Classical(), Fractional(0.7), Mixed(1.0, 1.0, 0.7)]

print(f"{'alpha':>8} " + " ".join(f"{str(d):>28}" for d in drivers))
for alpha in (1.5, 1.9, 1.99, 1.999, 1.9999):
    cells = []
    for d in drivers:
        target = bs_limit_price(market, 0.2, d).price
        q = call_price(market, CevSpec(0.2, alpha), d)
        flag = "*" if q.diagnostics.precision_degraded else " "
        cells.append(f"{q.price:12.6f} ({abs(q.price - target) / target:8.1e}){flag}")
    print(f"{alpha:8.4f} " + " ".join(f"{c:>28}" for c in cells))
print("(relative gap to the Black-Scholes limit; * marks the normal approximation of the tails)")

# Past the guard the chi-squared arguments are meaningless; the limit formula is used instead.
q = call_price(market, CevSpec(0.2, 2.0 - 1e-9), Fractional(0.7))
print(f"\nalpha = 2 - 1e-9: method={q.method.value}, guard_triggered={q.diagnostics.guard_triggered}, "
      f"price={q.price:.6f}")
