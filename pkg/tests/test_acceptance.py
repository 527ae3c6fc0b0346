"""One test per acceptance criterion; each prints a PASS/FAIL line.

The lines are echoed again in the terminal summary so the whole table is
visible at the end of a ``pytest -v`` run.
"""

import pytest

from fcev import checks

from conftest import ACCEPTANCE_LINES

# (criterion, check, tolerance on the measured value, runtime budget in seconds)
CRITERIA = [
    (1, checks.check_bs_limit_classical, 1e-3, 10.0),
    (2, checks.check_bs_limit_fractional, 1e-3, 10.0),
    (3, checks.check_bs_limit_mixed, 1e-3, 10.0),
    (4, checks.check_reduction_lattice, 1e-12, None),
    (5, checks.check_oracle_quadrature, 1e-6, 60.0),
    (6, checks.check_monte_carlo, 1.0, 120.0),     # at most one of eight points outside the interval
    (7, checks.check_greeks_fd, 1.0, None),        # worst gap over its allowance
    (8, checks.check_density, 1e-6, None),
    (9, checks.check_figures, None, None),         # qualitative; measured is the smallest margin
    (10, checks.check_specfun, 1.0, 30.0),         # worst error over its own tolerance
]


@pytest.mark.parametrize("number,check,tol,budget", CRITERIA, ids=[c[1].__name__[6:] for c in CRITERIA])
def test_criterion(number, check, tol, budget):
    res = check()
    line = f"[{number:2d}] {res.line()}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.passed, res.detail
    if tol is not None:
        assert res.measured <= tol
    else:
        assert res.measured >= 0.0
    if budget is not None:
        assert res.seconds < budget
