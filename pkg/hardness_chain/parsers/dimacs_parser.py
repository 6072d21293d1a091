"""
DIMACS CNF parser
"""

from ..core.sat import Formula, parse_dimacs
from .base_parser import BaseParser


class DimacsParser(BaseParser):
    """Parser for DIMACS CNF files"""

    def __init__(self, settings):
        super().__init__(settings)
        self.supported_extensions = [".cnf", ".dimacs"]

    def parse_text(self, text: str) -> Formula:
        formula = parse_dimacs(text)
        self.logger.info(
            f"Parsed formula with {formula.num_vars} variables and {formula.num_clauses} clauses"
        )
        return formula
