"""
Input parsers for hardness-chain
"""

from .base_parser import BaseParser
from .dimacs_parser import DimacsParser
from .document_parser import DocumentParser
from .ilp_parser import ILPParser

__all__ = [
    "BaseParser",
    "DimacsParser",
    "DocumentParser",
    "ILPParser",
]
