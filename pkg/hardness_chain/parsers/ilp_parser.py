"""
Parser for .2ssilp files
"""

from ..core.stoch_ilp import TwoStageILP, read_2ssilp
from .base_parser import BaseParser


class ILPParser(BaseParser):
    """Parser for 2-stage stochastic ILP instances in .2ssilp text"""

    def __init__(self, settings):
        super().__init__(settings)
        self.supported_extensions = [".2ssilp"]

    def parse_text(self, text: str) -> TwoStageILP:
        ilp = read_2ssilp(text)
        self.logger.info(f"Parsed 2-stage ILP: n={ilp.n}, r={ilp.r}, s={ilp.s}, t={ilp.t}")
        return ilp
