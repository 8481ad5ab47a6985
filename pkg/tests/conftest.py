import math

import mpmath
import numpy as np
import pytest

from medmarg import ConditionalFamily, PriorSpec

mpmath.mp.dps = 30

# (family, prior) pairs built into the package
BUILTIN_SETUPS = {
    "exp|uniform": (ConditionalFamily.exponential(), PriorSpec.uniform()),
    "exp|exp": (ConditionalFamily.exponential(), PriorSpec.exponential()),
    "normvar|uniform": (ConditionalFamily.normal_var(0.0), PriorSpec.uniform()),
    "normvar|exp": (ConditionalFamily.normal_var(0.0), PriorSpec.exponential()),
    "normsd|uniform": (ConditionalFamily.normal_sd(0.0), PriorSpec.uniform()),
    "normsd|exp": (ConditionalFamily.normal_sd(0.0), PriorSpec.exponential()),
}

CLOSED_FORM_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)

# one verdict line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = []


def ex1_median(x):
    return 1 - math.exp(-x / 2)


def ex1_mean(x):
    return 1 + (math.exp(-x) - 1) / x


def ex2_median(x):
    return 1 - math.exp(x * math.log(0.5))


def ex2_mean(x):
    return 1 - 1 / (x + 1)


def z_oracle(p):
    """Standard normal quantile via mpmath's erfinv (independent of scipy)."""
    return float(mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(p) - 1))


def phi_oracle(z):
    return float(mpmath.ncdf(z))


def mixture_cdf_oracle(x, on="variance", prior="exponential", theta=0.0):
    """F_X(x) for N(theta, .) mixed over a prior on the variance or sd, by mpmath quadrature."""
    x = mpmath.mpf(x) - theta

    def cond(nu):
        s = mpmath.sqrt(nu) if on == "variance" else nu
        return mpmath.ncdf(x / s)

    if prior == "exponential":
        return float(mpmath.quad(lambda nu: cond(nu) * mpmath.exp(-nu), [0, 1, 5, mpmath.inf]))
    return float(mpmath.quad(cond, [0, 0.5, 1]))


def setup_ids():
    return list(BUILTIN_SETUPS)


@pytest.fixture(params=setup_ids())
def setup(request):
    return BUILTIN_SETUPS[request.param]


def probe_grid(family, n=500):
    if family.is_location:
        return np.linspace(family.theta - 6, family.theta + 6, n)
    return np.linspace(0.0, 20.0, n)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
