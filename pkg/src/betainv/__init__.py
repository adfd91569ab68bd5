"""Quantiles of the beta distribution: inversion of the incomplete beta function I_x(p,q)."""

from .beta_cdf import Parameters, beta_cdf, beta_pdf, beta_sf
from .dispatch import DOUBLE, SINGLE, invert, quantile, select_region_scheme1, select_region_scheme2
from .errors import ConvergenceError, DomainError
from .result import InversionResult, MethodKind
from .tail_bounds import TailInterval, lower_tail_interval, upper_tail_interval

__all__ = [
    "Parameters", "beta_cdf", "beta_pdf", "beta_sf",
    "DOUBLE", "SINGLE", "invert", "quantile", "select_region_scheme1", "select_region_scheme2",
    "ConvergenceError", "DomainError", "InversionResult", "MethodKind",
    "TailInterval", "lower_tail_interval", "upper_tail_interval",
]
