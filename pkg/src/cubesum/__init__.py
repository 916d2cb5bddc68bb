"""Cube sums of primes p = 8 (mod 9): a finite-field criterion and the numerics behind it."""

from .criterion import CriterionReport, Verdict, check_prime, scan
from .curves import Point, WeierstrassModel, conductor, minimal_model
from .heights import canonical_height
from .lfunctions import Classification, classify, l_value
from .qseries import QSeries

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "CriterionReport",
    "Point",
    "QSeries",
    "Verdict",
    "WeierstrassModel",
    "canonical_height",
    "check_prime",
    "classify",
    "conductor",
    "l_value",
    "minimal_model",
    "scan",
]
