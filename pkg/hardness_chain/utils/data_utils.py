"""
Data utilities for hardness-chain
"""

import hashlib
import re
from pathlib import Path
from typing import Iterable, List, Union

_DECIMAL = re.compile(r"^-?[0-9]+$")


def to_decimal(value: int) -> str:
    """Big integer as a decimal string"""
    return str(int(value))


def from_decimal(text: Union[str, int]) -> int:
    """Parse a decimal string written by to_decimal"""
    if isinstance(text, bool):
        raise ValueError("booleans are not decimal integers")
    if isinstance(text, int):
        return text
    if not _DECIMAL.match(text):
        raise ValueError(f"not a decimal integer: {text!r}")
    return int(text)


def decimals(values: Iterable[int]) -> List[str]:
    return [to_decimal(v) for v in values]


def integers(values: Iterable[Union[str, int]]) -> List[int]:
    return [from_decimal(v) for v in values]


def file_digest(path: Union[str, Path]) -> str:
    """SHA-256 of a file, used to compare outputs of repeated runs"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def format_magnitude(value: int) -> str:
    """Human-readable size of a big integer: '1234 bits (372 digits)'"""
    value = abs(int(value))
    return f"{value.bit_length()} bits ({len(str(value))} digits)"
