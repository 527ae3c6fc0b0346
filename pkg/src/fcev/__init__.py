"""European call pricing under the classical, fractional and mixed-fractional CEV models.

>>> from fcev import MarketSpec, CevSpec, Fractional, price
>>> round(price(MarketSpec(100, 100, 0.05, 0.5), CevSpec(0.2, 1.5), Fractional(0.5)), 6)
3.264758
"""

from .errors import ConvergenceError, DomainError, FcevError, NumericalOverflow
from .model import (ALPHA_GUARD, ChiSquareArgs, CevSpec, Classical, FellerCoeffs, Fractional,
                    MarketSpec, Mixed, chi_args, feller_coeffs, perturbed_k, variance_scale_phi)
from .density import density_curve, transition_density
from .pricing import (CallQuote, Diagnostics, Method, bs_limit_price, call_price, effective_variance,
                      price)
from .greeks import GreekReport, delta, gamma, rho, theta, vega  # fcev.greeks.greeks for all five
from .verify import (McSettings, QuadratureSettings, density_diagnostics, fd_greek,
                     mc_price_classical, quadrature_price)

__version__ = "0.1.0"
