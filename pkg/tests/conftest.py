import math

import numpy as np
import pytest

Z975 = 1.959963984540054
Z95 = 1.6448536269514722


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def mp_cdf(x):
    """High-precision reference for the normal CDF."""
    import mpmath

    mpmath.mp.dps = 40
    return float(mpmath.ncdf(mpmath.mpf(x)))


def bisect_quantile(p, lo=-40.0, hi=40.0):
    """Quantile oracle by plain bisection on the mpmath CDF."""
    import mpmath

    mpmath.mp.dps = 40
    p = mpmath.mpf(p)
    lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
    for _ in range(200):
        mid = (lo + hi) / 2
        if mpmath.ncdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def angle(s1, s2):
    return math.acos(s2 / s1)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
