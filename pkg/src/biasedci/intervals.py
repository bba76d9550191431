"""Symmetric two-sided intervals built from the two point estimates.

=====  ======================================  ==========================
kind   centre                                  half-width
=====  ======================================  ==========================
CI1    theta1_hat                              z s1
CI2    theta2_hat                              z s1
CI3    theta1_hat                              z s2   (undercovers)
CI4    theta2_hat                              z s2   (undercovers)
CI5    theta2_hat                              z~ s1
CI6    (1-w*) theta1_hat + w* theta2_hat       z~_{w*} s1
CI6S   as CI6 with rho replaced by (1+rho)/2
=====  ======================================  ==========================

``z = z_{(1+level)/2}``; ``z~`` and ``z~_w`` come from `biasedci.calibrate`.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional

from .calibrate import Calibration, calibrated_z, optimal_w
from .errors import AssumptionViolation, DomainError
from .normal import std_normal_quantile

__all__ = ["Kind", "Interval", "ci1", "ci2", "ci3", "ci4", "ci5", "ci6", "build"]


class Kind(str, enum.Enum):
    CI1 = "CI1"
    CI2 = "CI2"
    CI3 = "CI3"
    CI4 = "CI4"
    CI5 = "CI5"
    CI6 = "CI6"
    CI6S = "CI6S"

    @classmethod
    def parse(cls, name: str) -> "Kind":
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise DomainError(f"unknown interval kind {name!r}") from None


@dataclass(frozen=True)
class Interval:
    center: float
    half_width: float
    level: float
    kind: Kind
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.half_width >= 0:
            raise DomainError(f"half-width must be nonnegative, got {self.half_width}")

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    @property
    def length(self) -> float:
        return 2.0 * self.half_width

    def contains(self, value: float) -> bool:
        """Closed-interval membership; boundary hits count as covered."""
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "level": self.level,
            "center": self.center,
            "lower": self.lower,
            "upper": self.upper,
            "half_width": self.half_width,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Interval":
        return cls(float(d["center"]), float(d["half_width"]), float(d["level"]),
                   Kind.parse(d["kind"]), dict(d.get("diagnostics") or {}))


def _z(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    return std_normal_quantile(0.5 * (1.0 + level))


def _positive(name, value):
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value}")


def ci1(theta1_hat: float, s1: float, level: float) -> Interval:
    """Benchmark interval ``theta1_hat +/- z s1``."""
    _positive("s1", s1)
    return Interval(float(theta1_hat), _z(level) * s1, level, Kind.CI1)


def ci2(theta2_hat: float, s1: float, level: float) -> Interval:
    """Biased centre with the unbiased estimator's standard error."""
    _positive("s1", s1)
    return Interval(float(theta2_hat), _z(level) * s1, level, Kind.CI2)


def _undercovering(kind, centre, s2, level):
    if not s2 >= 0:
        raise DomainError(f"s2 must be nonnegative, got {s2}")
    diag = {"undercovers": True}
    if s2 == 0:
        diag["note"] = "zero width, 0% coverage"
    return Interval(float(centre), _z(level) * s2, level, kind, diag)


def ci3(theta1_hat: float, s2: float, level: float) -> Interval:
    """``theta1_hat +/- z s2``; a comparator that always undercovers."""
    return _undercovering(Kind.CI3, theta1_hat, s2, level)


def ci4(theta2_hat: float, s2: float, level: float) -> Interval:
    """``theta2_hat +/- z s2``; ignores the bias and so undercovers."""
    return _undercovering(Kind.CI4, theta2_hat, s2, level)


def _resolve_s2(s1, s2, clip):
    _positive("s1", s1)
    if not s2 >= 0:
        raise DomainError(f"s2 must be nonnegative, got {s2}")
    if s2 <= s1:
        return s2, False
    if not clip:
        raise AssumptionViolation(
            f"s2={s2} exceeds s1={s1}, so the biased estimator cannot have lower MSE")
    return s1, True


def _cal_diag(cal: Calibration, clipped: bool) -> dict:
    d = {
        "z_tilde": cal.z_tilde,
        "w": cal.w,
        "s2_over_s1": cal.s2_over_s1,
        "bias_bound_over_s1": cal.bias_bound_over_s1,
    }
    if cal.rho is not None:
        d["rho"] = cal.rho
    if cal.degenerate:
        d["degenerate"] = True
    if clipped:
        d["clipped"] = True
    return d


def ci5(theta2_hat: float, s1: float, s2: float, level: float, clip: bool = False) -> Interval:
    """``theta2_hat +/- z~ s1`` with ``z~`` calibrated to the worst admissible bias.

    ``s2 > s1`` raises `AssumptionViolation` unless ``clip`` is set, in which
    case ``s2`` is replaced by ``s1`` (zero bias bound, ``z~ = z``) and the
    interval is tagged ``clipped``.
    """
    s2, clipped = _resolve_s2(s1, s2, clip)
    cal = calibrated_z(s1, s2, level)
    return Interval(float(theta2_hat), cal.z_tilde * s1, level, Kind.CI5, _cal_diag(cal, clipped))


def ci6(theta1_hat: float, theta2_hat: float, s1: float, s2: float, rho: Optional[float],
        level: float, shrink_rho: bool = False, clip: bool = False) -> Interval:
    """Interval centred at the length-minimising convex combination.

    With ``shrink_rho`` the correlation is replaced by ``(1 + rho)/2`` for
    both the weight search and the calibration, giving CI6S.
    """
    if rho is None:
        raise DomainError("CI6 needs the correlation between the estimators")
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [-1, 1], got {rho}")
    s2, clipped = _resolve_s2(s1, s2, clip)
    rho_used = 0.5 * (1.0 + rho) if shrink_rho else rho
    w_star, cal = optimal_w(s1, s2, rho_used, level)
    centre = (1.0 - w_star) * theta1_hat + w_star * theta2_hat
    diag = _cal_diag(cal, clipped)
    if shrink_rho:
        diag["rho_input"] = rho
    kind = Kind.CI6S if shrink_rho else Kind.CI6
    return Interval(float(centre), cal.z_tilde * s1, level, kind, diag)


def build(kind, theta1_hat: float, theta2_hat: float, s1: float, s2: float,
          rho: Optional[float], level: float, clip: bool = False) -> Interval:
    """Construct any interval kind from the full set of inputs."""
    kind = kind if isinstance(kind, Kind) else Kind.parse(kind)
    if kind is Kind.CI1:
        return ci1(theta1_hat, s1, level)
    if kind is Kind.CI2:
        return ci2(theta2_hat, s1, level)
    if kind is Kind.CI3:
        return ci3(theta1_hat, s2, level)
    if kind is Kind.CI4:
        return ci4(theta2_hat, s2, level)
    if kind is Kind.CI5:
        return ci5(theta2_hat, s1, s2, level, clip=clip)
    return ci6(theta1_hat, theta2_hat, s1, s2, rho, level,
               shrink_rho=kind is Kind.CI6S, clip=clip)
