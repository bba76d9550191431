"""Confidence intervals centred at an intentionally biased, lower-MSE estimator."""

from .calibrate import Calibration, calibrated_z, calibrated_z_w, length_ratio_table, optimal_w
from .coverage import (EstimatorModel, coverage_threshold_level, cp_combination, cp_from_bias,
                       cp_t, cp_w, worst_case_cp)
from .errors import (AssumptionViolation, BootstrapFailure, DegenerateCombination, DomainError,
                     NumericalFailure)
from .intervals import Interval, Kind, build, ci1, ci2, ci3, ci4, ci5, ci6
from .montecarlo import (BootstrapEstimates, SimulationConfig, SimulationResult, demo_dgp,
                         pairs_bootstrap, run_study, simulate_joint_normal)
from .normal import sample_bivariate, std_normal_cdf, std_normal_quantile

__version__ = "0.1.0"

__all__ = [
    "Calibration", "calibrated_z", "calibrated_z_w", "length_ratio_table", "optimal_w",
    "EstimatorModel", "coverage_threshold_level", "cp_combination", "cp_from_bias", "cp_t",
    "cp_w", "worst_case_cp",
    "AssumptionViolation", "BootstrapFailure", "DegenerateCombination", "DomainError",
    "NumericalFailure",
    "Interval", "Kind", "build", "ci1", "ci2", "ci3", "ci4", "ci5", "ci6",
    "BootstrapEstimates", "SimulationConfig", "SimulationResult", "demo_dgp", "pairs_bootstrap",
    "run_study", "simulate_joint_normal",
    "sample_bivariate", "std_normal_cdf", "std_normal_quantile",
]
