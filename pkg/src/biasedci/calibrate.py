"""Critical values calibrated to the worst bias allowed by the MSE bound.

`calibrated_z` solves ``cp_t(acos(s2/s1), z) = level`` for the interval
``theta2_hat +/- z s1``.  `calibrated_z_w` does the same for the convex
combination ``(1-w) theta1_hat + w theta2_hat`` and `optimal_w` picks the
weight giving the shortest calibrated interval.  Coverage is increasing in
``z``, so each equation has a single root and bisection is used throughout.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ._solvers import bisect_increasing, golden_section_min
from .coverage import HALF_PI, _cp_t1, _cp_w1, _cp_w_array, cp_t, cp_w
from .errors import AssumptionViolation, DegenerateCombination, DomainError, NumericalFailure
from .normal import std_normal_quantile

__all__ = [
    "Calibration",
    "OptimalWeight",
    "LengthRatioRow",
    "calibrated_z",
    "calibrated_z_w",
    "optimal_w",
    "length_ratio_table",
]

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
_GRID_ITERS = 64


@dataclass(frozen=True)
class Calibration:
    """A solved critical value and the inputs it was solved for.

    ``degenerate`` marks the ``s2 = 0``, ``w = 1`` case where coverage is a
    step in ``z`` and ``z_tilde = 1`` is the smallest value with full coverage.
    It is also set when coverage is so steep that the root is only resolved
    to machine precision.
    """

    z_tilde: float
    level: float
    s2_over_s1: float
    rho: Optional[float]
    w: float
    bias_bound_over_s1: float
    degenerate: bool = False

    @property
    def angle(self) -> float:
        return math.acos(self.s2_over_s1)

    @property
    def z_normal(self) -> float:
        """The uncalibrated normal critical value ``z_{(1+level)/2}``."""
        return std_normal_quantile(0.5 * (1.0 + self.level))

    @property
    def length_ratio(self) -> float:
        """Length relative to the interval using ``z_normal``."""
        return self.z_tilde / self.z_normal

    def coverage(self) -> float:
        """Worst-case coverage at the solved critical value."""
        if self.w == 1.0:
            return cp_t(self.angle, self.z_tilde)
        return cp_w(self.angle, self.z_tilde, self.w, self.rho)

    def residual(self) -> float:
        return self.coverage() - self.level

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z_normal"] = self.z_normal
        d["length_ratio"] = self.length_ratio
        return d


class OptimalWeight(NamedTuple):
    w_star: float
    cal: Calibration


class LengthRatioRow(NamedTuple):
    s2_over_s1: float
    rho: Optional[float]
    ratio_ci5: float
    ratio_ci6: Optional[float]


def _check_inputs(s1, s2, level, rho=None, w=1.0):
    if not s1 > 0:
        raise DomainError(f"s1 must be positive, got {s1}")
    if not s2 >= 0:
        raise DomainError(f"s2 must be nonnegative, got {s2}")
    if s2 > s1:
        raise AssumptionViolation(f"s2={s2} exceeds s1={s1}: the MSE bound cannot hold")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    if rho is not None and not -1.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [-1, 1], got {rho}")
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"weight must lie in [0, 1], got {w}")
    ratio = min(s2 / s1, 1.0)
    return ratio, math.acos(ratio)


def _solve(cp, level: float) -> float:
    """Bisection for ``cp(z) = level`` on ``[0, 10 z_normal]``, widened if needed."""
    f = lambda z: 0.0 if z == 0.0 else cp(z)
    hi = 10.0 * std_normal_quantile(0.5 * (1.0 + level))
    for _ in range(60):
        if f(hi) >= level:
            break
        hi *= 2.0
    else:
        raise NumericalFailure(f"could not bracket the critical value for level {level}")
    return bisect_increasing(f, level, 0.0, hi)


def calibrated_z(s1: float, s2: float, level: float) -> Calibration:
    """Critical value ``z~`` with worst-case coverage exactly ``level``.

    Depends on ``(s1, s2)`` only through ``s2/s1``.  With ``s2 = 0`` the
    coverage is a step at ``z = 1``; the result is ``z~ = 1`` flagged
    degenerate.

    Raises
    ------
    AssumptionViolation
        If ``s2 > s1``.
    """
    ratio, t = _check_inputs(s1, s2, level)
    bound = math.sqrt(max(1.0 - ratio * ratio, 0.0))
    if t >= HALF_PI:
        return Calibration(1.0, level, ratio, None, 1.0, bound, degenerate=True)
    if t == 0.0:
        # zero bias bound: the ordinary normal critical value
        return Calibration(std_normal_quantile(0.5 * (1.0 + level)), level, ratio, None, 1.0, 0.0)
    z = _solve(lambda z: _cp_t1(t, z), level)
    return _check_residual(Calibration(z, level, ratio, None, 1.0, bound))


def calibrated_z_w(s1: float, s2: float, rho: Optional[float], level: float,
                   w: float) -> Calibration:
    """Critical value for the convex combination with weight ``w`` on ``theta2_hat``.

    ``w = 1`` reproduces `calibrated_z`; ``w = 0`` gives the plain normal
    quantile since the unbiased estimator alone has sd ``s1``.
    """
    ratio, t = _check_inputs(s1, s2, level, rho, w)
    if w == 1.0:
        cal = calibrated_z(s1, s2, level)
        return Calibration(cal.z_tilde, level, ratio, rho, 1.0, cal.bias_bound_over_s1,
                           cal.degenerate)
    if rho is None:
        raise DomainError("a correlation is required when w < 1")
    bound = math.sqrt(max(1.0 - ratio * ratio, 0.0))
    # raises DegenerateCombination before any solving
    cp_w(t, 1.0, w, rho)
    z = _solve(lambda z: _cp_w1(t, z, w, rho), level)
    return _check_residual(Calibration(z, level, ratio, rho, w, bound))


def _check_residual(cal: Calibration) -> Calibration:
    """Enforce the fixed-point residual.

    Very close to ``s2 = 0`` the coverage is so steep in ``z`` that adjacent
    doubles straddle the level by more than the tolerance.  If the root is
    pinned to a few ulps the result is kept and flagged ``degenerate``.
    """
    r = cal.residual()
    if abs(r) <= RESIDUAL_TOL:
        return cal
    z = cal.z_tilde
    below = replace(cal, z_tilde=z - 4 * math.ulp(z)).coverage()
    above = replace(cal, z_tilde=z + 4 * math.ulp(z)).coverage()
    if below <= cal.level <= above:
        log.info("critical value resolved to machine precision only (residual %.3e): %s", r, cal)
        return replace(cal, degenerate=True)
    raise NumericalFailure(f"calibration residual {r:.3e} exceeds {RESIDUAL_TOL:g}: {cal}")


def _z_tilde_grid(t: float, rho: float, level: float, ws: np.ndarray) -> np.ndarray:
    """Vectorised bisection for the calibrated critical value at many weights.

    Degenerate weights come back as ``inf``.
    """
    ws = np.asarray(ws, dtype=float)
    lo = np.zeros_like(ws)
    hi = np.full_like(ws, 10.0 * std_normal_quantile(0.5 * (1.0 + level)))
    bad = np.isnan(_cp_w_array(t, 1.0, ws, rho))
    for _ in range(60):
        short = _cp_w_array(t, hi, ws, rho) < level
        if not np.any(short & ~bad):
            break
        hi = np.where(short & ~bad, 2.0 * hi, hi)
    for _ in range(_GRID_ITERS):
        mid = 0.5 * (lo + hi)
        below = _cp_w_array(t, mid, ws, rho) < level
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.where(bad, np.inf, hi)


def _count_local_minima(values: np.ndarray) -> int:
    v = values[np.isfinite(values)]
    if v.size < 3:
        return 1
    interior = (v[1:-1] < v[:-2]) & (v[1:-1] <= v[2:])
    return int(interior.sum()) + int(v[0] < v[1]) + int(v[-1] < v[-2])


def optimal_w(s1: float, s2: float, rho: float, level: float,
              n_grid: int = 1001, tol: float = 1e-6) -> OptimalWeight:
    """Weight minimising the calibrated critical value of the convex combination.

    A ``n_grid``-point scan over ``[0, 1]`` is refined by golden-section
    search in the cells around the best grid point.  Near-ties (relative
    1e-12) go to the larger weight, so ``w* = 1`` is kept whenever the
    combination does not help.  The returned critical value never exceeds
    ``calibrated_z(s1, s2, level).z_tilde``.
    """
    ratio, t = _check_inputs(s1, s2, level, rho)
    if rho is None:
        raise DomainError("optimal_w needs a correlation")
    ws = np.linspace(0.0, 1.0, n_grid)
    zs = _z_tilde_grid(t, rho, level, ws)
    n_min = _count_local_minima(zs)
    if n_min > 1:
        log.info("calibrated z over w has %d local minima (s2/s1=%.6g, rho=%.6g, level=%.6g)",
                 n_min, ratio, rho, level)
    zmin = np.min(zs)
    i = int(np.flatnonzero(zs <= zmin * (1.0 + 1e-12))[-1])

    def objective(w):
        try:
            return calibrated_z_w(s1, s2, rho, level, w).z_tilde
        except (DegenerateCombination, NumericalFailure):
            return math.inf

    w_ref, z_ref = golden_section_min(objective, ws[max(i - 1, 0)], ws[min(i + 1, n_grid - 1)], tol)
    candidates = [(float(w_ref), z_ref), (float(ws[i]), objective(float(ws[i]))),
                  (1.0, objective(1.0))]
    best = min(z for _, z in candidates)
    w_star = float(max(w for w, z in candidates if z <= best * (1.0 + 1e-12)))
    return OptimalWeight(w_star, calibrated_z_w(s1, s2, rho, level, w_star))


def length_ratio_table(level: float, s2_over_s1_grid: Sequence[float],
                       rho_grid: Optional[Sequence[float]] = None) -> list[LengthRatioRow]:
    """Calibrated interval lengths relative to ``theta2_hat +/- z s1``.

    One row per ``(s2/s1, rho)`` cell.  ``ratio_ci6`` is ``None`` when no
    correlation grid is given; ``ratio_ci5`` does not depend on ``rho``.
    """
    rows = []
    for r in s2_over_s1_grid:
        r = float(r)
        ratio5 = calibrated_z(1.0, r, level).length_ratio
        if rho_grid is None:
            rows.append(LengthRatioRow(r, None, ratio5, None))
            continue
        for rho in rho_grid:
            cal = optimal_w(1.0, r, float(rho), level).cal
            rows.append(LengthRatioRow(r, float(rho), ratio5, cal.length_ratio))
    return rows
