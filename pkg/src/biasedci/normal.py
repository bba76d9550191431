"""Standard normal CDF/quantile and a seeded bivariate normal sampler.

Everything else in the package reduces to these primitives.  The CDF goes
through ``erfc`` so both tails keep full absolute accuracy; arguments such as
``-2z - sqrt(3)`` show up routinely in the coverage formulas.

Random streams come from numpy's counter-based Philox bit generator.  A
sub-stream is identified by ``(seed, key...)`` and derived through
``SeedSequence(seed, spawn_key=key)``, so chunk ``i`` of a simulation draws
the same numbers no matter which worker handles it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "std_normal_cdf",
    "std_normal_pdf",
    "std_normal_quantile",
    "interval_prob",
    "substream",
    "sample_bivariate",
    "MAX_SEED",
]

MAX_SEED = 2**64 - 1

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Acklam's rational approximation, relative error ~1.15e-9 before polishing.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def std_normal_cdf(x):
    """Standard normal CDF, ``Phi(x) = erfc(-x / sqrt(2)) / 2``.

    Accepts a float or an array.  Non-finite input raises `DomainError`.
    """
    if np.ndim(x) == 0:
        x = float(x)
        if not math.isfinite(x):
            raise DomainError(f"std_normal_cdf needs a finite argument, got {x}")
        return 0.5 * math.erfc(-x / _SQRT2)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("std_normal_cdf needs finite arguments")
    return 0.5 * special.erfc(-x / _SQRT2)


def std_normal_pdf(x):
    if np.ndim(x) == 0:
        x = float(x)
        return _INV_SQRT_2PI * math.exp(-0.5 * x * x)
    x = np.asarray(x, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def interval_prob(lo, hi):
    """``P(lo <= Z <= hi)`` for standard normal ``Z``, with ``lo <= hi``.

    Intervals lying in the upper half are reflected into the lower tail
    before differencing, so tail probabilities keep their relative precision.
    """
    if isinstance(lo, float) and isinstance(hi, float):
        return _interval_prob1(lo, hi)
    if np.ndim(lo) == 0 and np.ndim(hi) == 0:
        return _interval_prob1(float(lo), float(hi))
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    upper = lo > 0.0
    direct = std_normal_cdf(hi) - std_normal_cdf(lo)
    reflected = std_normal_cdf(-lo) - std_normal_cdf(-hi)
    return np.where(upper, reflected, direct)


def _interval_prob1(lo: float, hi: float) -> float:
    # scalar kernel, no validation; infinite bounds are fine for erfc
    if lo > 0.0:
        return 0.5 * (math.erfc(lo / _SQRT2) - math.erfc(hi / _SQRT2))
    return 0.5 * (math.erfc(-hi / _SQRT2) - math.erfc(-lo / _SQRT2))


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def std_normal_quantile(p: float) -> float:
    """Inverse of `std_normal_cdf` on the open interval (0, 1).

    Acklam's rational approximation followed by two Newton steps on
    ``Phi(z) - p``.  The upper half is handled by reflection (``1 - p`` is
    exact for ``p >= 0.5``), so the round trip holds to about 1e-16.
    """
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"quantile level must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -std_normal_quantile(1.0 - p)
    z = _acklam(p)
    for _ in range(2):
        dens = std_normal_pdf(z)
        if dens == 0.0:
            break
        z -= (std_normal_cdf(z) - p) / dens
    return z


def _check_seed(seed) -> int:
    if isinstance(seed, (bool, float)) or int(seed) != seed:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox generator for sub-stream ``key`` of ``seed``."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def sample_bivariate(mu1: float, mu2: float, s1: float, s2: float, rho: float,
                     seed: int, n: int, *, key: tuple = ()) -> np.ndarray:
    """Draw ``n`` pairs from the bivariate normal with the given moments.

    Built from two independent standard normals ``u, v``::

        x1 = mu1 + s1 * u
        x2 = mu2 + s2 * (rho * u + sqrt(1 - rho^2) * v)

    With ``rho = 1`` and ``s1 == s2`` the second column is the first shifted
    by ``mu2 - mu1``.  Returns an ``(n, 2)`` array.  ``key`` selects a sub-stream of ``seed``.
    """
    if s1 < 0 or s2 < 0:
        raise DomainError(f"standard deviations must be nonnegative, got s1={s1}, s2={s2}")
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"correlation must lie in [-1, 1], got {rho}")
    if n < 0:
        raise DomainError(f"sample size must be nonnegative, got {n}")
    rng = substream(seed, *key)
    u = rng.standard_normal(n)
    v = rng.standard_normal(n)
    out = np.empty((n, 2))
    out[:, 0] = mu1 + s1 * u
    if rho == 1.0 and s1 == s2:
        # keep the exact shift so that x2 - x1 == mu2 - mu1
        out[:, 1] = out[:, 0] + (mu2 - mu1)
    else:
        out[:, 1] = mu2 + s2 * (rho * u + math.sqrt(1.0 - rho * rho) * v)
    return out
