"""Fit GARCH-normal(1,1) parameters from moments and autocovariance of returns.

A neural network maps (E(x^2), Gamma_4, third statistic) to alpha1; beta1 and
alpha0 then follow in closed form from the kurtosis and the variance.
"""

from .errors import GarchNetError
from .fit import FitResult, fit, invert_alpha0, invert_beta1, solve_exact
from .moments import GarchParams
from .params import FeatureSetKind
from .pathsim import EmpiricalStats, estimate_stats, simulate

__all__ = [
    "EmpiricalStats",
    "FeatureSetKind",
    "FitResult",
    "GarchNetError",
    "GarchParams",
    "estimate_stats",
    "fit",
    "invert_alpha0",
    "invert_beta1",
    "simulate",
    "solve_exact",
]
