"""Coverage probabilities of intervals centred at a biased estimator.

Two estimators of a scalar ``theta`` are jointly normal::

    theta1_hat ~ N(theta, s1^2)
    theta2_hat ~ N(theta + b2, s2^2),      b2^2 + s2^2 <= s1^2

with correlation ``rho`` when needed.  On the equal-MSE frontier the pair
``(b2, s2)`` is written through an angle ``t``: ``b2 = s1 sin t`` and
``s2 = s1 cos t``.  All coverage functions are for intervals whose
half-width is a multiple ``z`` of ``s1``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._solvers import golden_section_min
from .errors import AssumptionViolation, DegenerateCombination, DomainError
from .normal import _interval_prob1, interval_prob, std_normal_quantile

__all__ = [
    "EstimatorModel",
    "WorstCase",
    "HALF_PI",
    "cp_t",
    "cp_from_bias",
    "cp_w",
    "cp_combination",
    "worst_case_cp",
    "coverage_threshold_level",
]

log = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
_MSE_SLACK = 1e-12
# relative size below which a combination variance counts as exactly zero
_DEGENERATE_RTOL = 64 * 2.0 ** -52


@dataclass(frozen=True)
class EstimatorModel:
    """Joint-normal sampling model of the unbiased/biased estimator pair.

    ``theta`` is only used by simulations.  ``rho`` may be ``None`` when the
    correlation is unknown; intervals that need it will refuse to build.
    """

    b2: float = 0.0
    s1: float = 1.0
    s2: float = 1.0
    rho: Optional[float] = None
    theta: float = 0.0

    def __post_init__(self):
        if not self.s1 > 0:
            raise DomainError(f"s1 must be positive, got {self.s1}")
        if self.s2 < 0:
            raise DomainError(f"s2 must be nonnegative, got {self.s2}")
        if self.rho is not None and not -1.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [-1, 1], got {self.rho}")
        if self.s2 > self.s1:
            raise AssumptionViolation(f"s2={self.s2} exceeds s1={self.s1}")
        if self.b2 ** 2 + self.s2 ** 2 > self.s1 ** 2 * (1.0 + _MSE_SLACK):
            raise AssumptionViolation(
                f"MSE bound violated: b2^2 + s2^2 = {self.b2 ** 2 + self.s2 ** 2} > s1^2 = {self.s1 ** 2}")

    def bias_bound(self) -> float:
        """Largest ``|b2|`` compatible with the MSE bound, ``sqrt(s1^2 - s2^2)``."""
        return math.sqrt(max(self.s1 ** 2 - self.s2 ** 2, 0.0))

    @property
    def angle(self) -> float:
        """Frontier angle ``acos(s2 / s1)`` of the bounding equal-MSE model."""
        return math.acos(min(self.s2 / self.s1, 1.0))

    @classmethod
    def from_angle(cls, t: float, s1: float = 1.0, rho: Optional[float] = None,
                   theta: float = 0.0) -> "EstimatorModel":
        """Equal-MSE model with ``b2 = s1 sin t``, ``s2 = s1 cos t``."""
        _check_angle(t)
        return cls(b2=s1 * math.sin(t), s1=s1, s2=s1 * math.cos(t), rho=rho, theta=theta)


class WorstCase(NamedTuple):
    t_min: float
    cp_min: float


def _scalars(*vals) -> bool:
    return all(isinstance(v, (float, int)) for v in vals)


def _check_angle(t):
    if _scalars(t):
        bad = t < 0.0 or t > HALF_PI
    else:
        bad = np.any(np.asarray(t) < 0.0) or np.any(np.asarray(t) > HALF_PI)
    if bad:
        raise DomainError(f"bias angle must lie in [0, pi/2], got {t}")


def _check_positive(name, value):
    ok = value > 0.0 if _scalars(value) else np.all(np.asarray(value) > 0.0)
    if not ok:
        raise DomainError(f"{name} must be positive, got {value}")


def _check_weight(w, rho):
    if _scalars(w):
        bad_w = not 0.0 <= w <= 1.0
    else:
        bad_w = np.any(np.asarray(w) < 0.0) or np.any(np.asarray(w) > 1.0)
    if bad_w:
        raise DomainError(f"weight must lie in [0, 1], got {w}")
    if rho is None:
        raise DomainError("a correlation is required")
    bad_rho = abs(rho) > 1.0 if _scalars(rho) else np.any(np.abs(np.asarray(rho)) > 1.0)
    if bad_rho:
        raise DomainError(f"rho must lie in [-1, 1], got {rho}")


def _step(z, shift):
    # point mass at theta + shift: covered iff |shift| <= z (boundary counts)
    return np.where(np.abs(shift) <= z, 1.0, 0.0)


def _cp_t1(t: float, z: float) -> float:
    # scalar kernel of cp_t, inputs already validated
    if t >= HALF_PI:
        return 1.0 if z >= 1.0 else 0.0
    c, s = math.cos(t), math.sin(t)
    return _interval_prob1((-z - s) / c, (z - s) / c)


def _cp_w1(t: float, z: float, w: float, rho: float) -> float:
    # scalar kernel of cp_w; with w == 1 every operation matches _cp_t1 bitwise
    c = 0.0 if t >= HALF_PI else math.cos(t)
    s = math.sin(t)
    scale = (1.0 - w) ** 2 + w * w * c * c
    d2 = scale + 2.0 * rho * w * (1.0 - w) * c
    d = 0.0 if d2 <= _DEGENERATE_RTOL * scale else math.sqrt(d2)
    if d == 0.0:
        if w == 1.0:
            return 1.0 if z >= w * s else 0.0
        raise DegenerateCombination(f"zero-variance combination: w={w}, rho={rho}, cos t={c}")
    return _interval_prob1((-z - w * s) / d, (z - w * s) / d)


def cp_t(t, z):
    """Coverage of ``theta2_hat +/- z s1`` on the equal-MSE frontier.

    ``Phi(z sec t - tan t) - Phi(-z sec t - tan t)``.  At ``t = pi/2`` the
    biased estimator is a point mass at ``theta + s1`` and the result is the
    indicator of ``z >= 1``.  Vectorised over ``t`` and ``z``.
    """
    _check_angle(t)
    _check_positive("z", z)
    if _scalars(t, z) or (np.ndim(t) == 0 and np.ndim(z) == 0):
        return _cp_t1(float(t), float(z))
    t, z = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(z, dtype=float))
    edge = t >= HALF_PI
    c = np.where(edge, 1.0, np.cos(t))
    s = np.sin(t)
    out = interval_prob((-z - s) / c, (z - s) / c)
    return np.where(edge, _step(z, 1.0), out)


def cp_from_bias(b2, s1, s2, z):
    """Coverage of ``theta2_hat +/- z s1`` for bias ``b2`` and sd ``s2``.

    ``Phi((z s1 - b2)/s2) - Phi((-z s1 - b2)/s2)``; even in ``b2``.  With
    ``s2 = 0`` the estimator is a point mass and the result is the indicator
    of ``|b2| <= z s1``.
    """
    _check_positive("s1", s1)
    _check_positive("z", z)
    if np.any(np.asarray(s2) < 0.0):
        raise DomainError(f"s2 must be nonnegative, got {s2}")
    if all(np.ndim(v) == 0 for v in (b2, s1, s2, z)):
        b2, s1, s2, z = float(b2), float(s1), float(s2), float(z)
        if s2 == 0.0:
            return 1.0 if abs(b2) <= z * s1 else 0.0
        # |b2| keeps the two signs of b2 bitwise identical
        b = abs(b2)
        return _interval_prob1((-z * s1 - b) / s2, (z * s1 - b) / s2)
    b = np.abs(np.asarray(b2, dtype=float))
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    z = np.asarray(z, dtype=float)
    zero = s2 == 0.0
    den = np.where(zero, 1.0, s2)
    out = interval_prob((-z * s1 - b) / den, (z * s1 - b) / den)
    return np.where(zero, _step(z * s1, b), out)


def cp_w(t, z, w, rho):
    """Coverage of ``(1-w) theta1_hat + w theta2_hat +/- z s1`` on the frontier.

    The combination has bias ``w s1 sin t`` and standard deviation
    ``s1 sqrt((1-w)^2 + w^2 cos^2 t + 2 rho w (1-w) cos t)``.  With ``w = 1``
    this is exactly `cp_t`; a zero standard deviation for interior ``w``
    (``rho = -1`` and ``cos t = (1-w)/w``) raises `DegenerateCombination`.
    """
    _check_angle(t)
    _check_positive("z", z)
    _check_weight(w, rho)
    if _scalars(t, z, w, rho) or all(np.ndim(v) == 0 for v in (t, z, w, rho)):
        return _cp_w1(float(t), float(z), float(w), float(rho))
    out = _cp_w_array(t, z, w, rho)
    if np.any(np.isnan(out)):
        raise DegenerateCombination(f"zero-variance combination for some of w={w}, rho={rho}")
    return out


def _cp_w_array(t, z, w, rho):
    """Broadcast `cp_w`; degenerate interior combinations come back as NaN."""
    t, z, w, rho = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, z, w, rho)))
    edge = t >= HALF_PI
    c = np.where(edge, 0.0, np.cos(t))
    s = np.sin(t)
    scale = (1.0 - w) ** 2 + w * w * c * c
    d2 = scale + 2.0 * rho * w * (1.0 - w) * c
    zero = d2 <= _DEGENERATE_RTOL * scale
    d = np.sqrt(np.where(zero, 1.0, d2))
    den = np.where(zero, 1.0, d)
    shift = w * s
    out = interval_prob((-z - shift) / den, (z - shift) / den)
    step = np.where(w == 1.0, _step(z, shift), np.nan)
    return np.where(zero, step, out)


def cp_combination(b2, s1, s2, rho, z, w):
    """Coverage of ``(1-w) theta1_hat + w theta2_hat +/- z s1`` for any bias ``b2``.

    Off-frontier generalisation of `cp_w`, used to check simulations of models
    strictly inside the MSE bound.
    """
    _check_positive("s1", s1)
    _check_positive("z", z)
    _check_weight(w, rho)
    scale = (1 - w) ** 2 * s1 ** 2 + w ** 2 * s2 ** 2
    v3 = scale + 2 * rho * w * (1 - w) * s1 * s2
    s3 = 0.0 if v3 <= _DEGENERATE_RTOL * scale else math.sqrt(v3)
    if s3 == 0.0:
        if w == 1.0 or w == 0.0:
            return 1.0 if abs(w * b2) <= z * s1 else 0.0
        raise DegenerateCombination(f"zero-variance combination: w={w}, rho={rho}")
    shift = abs(w * b2)
    return _interval_prob1((-z * s1 - shift) / s3, (z * s1 - shift) / s3)


def worst_case_cp(z: float, w: float = 1.0, rho: Optional[float] = None,
                  n_grid: int = 2001, tol: float = 1e-8) -> WorstCase:
    """Minimum over ``t in [0, pi/2]`` of the frontier coverage at critical value ``z``.

    A dense grid locates the basin, then golden-section search refines
    within the neighbouring grid cells.  No unimodality in ``t`` is assumed.
    With ``w < 1`` the combination coverage `cp_w` is minimised instead.
    """
    _check_positive("z", z)
    if n_grid < 3:
        raise DomainError("worst-case grid needs at least 3 points")
    grid = np.linspace(0.0, HALF_PI, n_grid)
    if w == 1.0:
        values = cp_t(grid, z)
        f = lambda x: _cp_t1(x, z)
    else:
        values = cp_w(grid, z, w, rho)
        f = lambda x: _cp_w1(x, z, w, rho)
    i = int(np.argmin(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, n_grid - 1)]
    if i == n_grid - 1:
        # the pi/2 endpoint is a limit value; refine strictly inside
        hi = math.nextafter(HALF_PI, 0.0)
    t_ref, cp_ref = golden_section_min(f, lo, hi, tol)
    if values[i] < cp_ref:
        return WorstCase(float(grid[i]), float(values[i]))
    return WorstCase(float(t_ref), float(cp_ref))


def coverage_threshold_level(tol: float = 1e-4, lo: float = 0.85, hi: float = 0.95,
                             slack: float = 1e-12) -> float:
    """Smallest confidence level at which the frontier coverage never drops below it.

    Bisection on the level ``L``: ``L`` is too low when
    ``min_t cp_t(t, z_{(1+L)/2}) < L``.  Above the threshold the minimum
    sits at ``t = 0`` and equals ``L`` up to rounding, hence ``slack``.
    """
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")

    def undercovers(level):
        z = std_normal_quantile(0.5 * (1.0 + level))
        return worst_case_cp(z).cp_min < level - slack

    if not undercovers(lo) or undercovers(hi):
        raise DomainError(f"threshold is not bracketed by [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if undercovers(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
