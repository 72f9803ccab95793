"""Numerical laboratory for the mean value bound on polynomial critical values."""

from .polycore import Polynomial, PolynomialError, RootConfiguration, from_roots
from .rootfind import all_roots, critical_points
from .smale import RhoReport, conjectured_bound, is_in_class, rho, rho_at, smale_quotient

__all__ = [
    "Polynomial",
    "PolynomialError",
    "RhoReport",
    "RootConfiguration",
    "all_roots",
    "conjectured_bound",
    "critical_points",
    "from_roots",
    "is_in_class",
    "rho",
    "rho_at",
    "smale_quotient",
]
__version__ = "0.1.0"
