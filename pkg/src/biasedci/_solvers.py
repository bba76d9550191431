"""Scalar bisection and golden-section search.

Both are short enough that owning them is simpler than adapting scipy's
signatures, and the callers rely on their exact bracketing behaviour.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import NumericalFailure

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def bisect_increasing(f: Callable[[float], float], target: float, lo: float, hi: float,
                      *, rtol: float = 4e-16, max_iter: int = 200) -> float:
    """Root of ``f(x) = target`` for ``f`` increasing on ``[lo, hi]``.

    The bracket must show a sign change; otherwise `NumericalFailure`.
    Iterates until the bracket collapses to a few ulps.
    """
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo > 0.0 or fhi < 0.0:
        raise NumericalFailure(
            f"no sign change on [{lo}, {hi}]: f(lo)-target={flo}, f(hi)-target={fhi}")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= rtol * abs(mid):
            break
        fm = f(mid) - target
        if fm == 0.0:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    # pick the endpoint with the smaller residual
    if abs(f(lo) - target) <= abs(f(hi) - target):
        return lo
    return hi


def golden_section_min(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-8) -> tuple[float, float]:
    """Minimise ``f`` on ``[a, b]`` by golden-section search.

    Stops once the bracket is no wider than ``tol``.  Returns ``(x, f(x))``
    for the best point evaluated, endpoints included.
    """
    if b < a:
        a, b = b, a
    best_x, best_f = a, f(a)
    fb = f(b)
    if fb < best_f:
        best_x, best_f = b, fb
    h = b - a
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc, fd = f(c), f(d)
    while h > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = f(d)
    for x, fx in ((c, fc), (d, fd)):
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f
