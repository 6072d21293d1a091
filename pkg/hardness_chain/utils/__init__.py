"""
Utilities for hardness-chain: documents, exports and small helpers
"""

from .data_utils import file_digest, format_magnitude, from_decimal, to_decimal
from .export_utils import ExportManager

__all__ = [
    "ExportManager",
    "file_digest",
    "format_magnitude",
    "from_decimal",
    "to_decimal",
]
