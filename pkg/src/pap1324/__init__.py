"""Enumeration and asymptotic analysis of 1324-avoiding permutations."""
from ._backend import BACKEND
from .signature import Signature, parse, format_signature

__all__ = ["BACKEND", "Signature", "parse", "format_signature"]
__version__ = "0.1.0"
