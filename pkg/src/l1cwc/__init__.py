"""Constant-weight codes in the l1 metric."""

from .bounds import BoundResult, known_value, upper_bound
from .core import Code, CodeParams, Codeword, UNBOUNDED, VerificationReport, l1_distance, verify_code

__version__ = "0.1.0"

__all__ = [
    "BoundResult",
    "Code",
    "CodeParams",
    "Codeword",
    "UNBOUNDED",
    "VerificationReport",
    "known_value",
    "l1_distance",
    "upper_bound",
    "verify_code",
]
