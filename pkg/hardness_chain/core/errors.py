"""
Exception hierarchy for hardness-chain

Every layer of the reduction chain has its own base class so callers can
catch a whole layer at once; concrete errors that signal bad input also
derive from ValueError.
"""

from fractions import Fraction
from typing import Dict, List, Optional


class HardnessChainError(Exception):
    """Base class for all errors raised by hardness-chain"""


# Number theory

class NumberTheoryError(HardnessChainError):
    """Base class for arithmetic primitive errors"""


class InvalidArgument(NumberTheoryError, ValueError):
    """An argument lies outside the documented domain"""


class NotCoprime(NumberTheoryError, ValueError):
    """No modular inverse exists because gcd(a, m) != 1"""

    def __init__(self, a: int, m: int, g: int):
        super().__init__(f"{a} has no inverse modulo {m} (gcd = {g})")
        self.a = a
        self.m = m
        self.gcd = g


class ModuliNotCoprime(NumberTheoryError, ValueError):
    """CRT moduli share a common factor"""

    def __init__(self, m1: int, m2: int):
        super().__init__(f"moduli {m1} and {m2} are not coprime")
        self.moduli = (m1, m2)


# Formulas

class FormulaError(HardnessChainError):
    """Base class for CNF parsing and SAT oracle errors"""


class MalformedHeader(FormulaError, ValueError):
    pass


class LiteralOutOfRange(FormulaError, ValueError):
    pass


class ClauseTooLarge(FormulaError, ValueError):
    pass


class MissingTerminator(FormulaError, ValueError):
    pass


class TooManyVariables(FormulaError, ValueError):
    pass


# Quadratic congruences

class QCError(HardnessChainError):
    """Base class for the 3-SAT -> QC layer"""


class EmptyFormula(QCError, ValueError):
    pass


class TooFewClauses(QCError, ValueError):
    """The simplified formula has fewer than two clauses"""

    def __init__(self, m_prime: int):
        super().__init__(
            f"simplified formula has {m_prime} clause(s); at least 2 are required"
        )
        self.m_prime = m_prime


class PaperModeNonIntegral(QCError, ValueError):
    """The literal coefficient formulas produced a non-integral value"""

    def __init__(self, coeffs: List[Fraction], tau: Fraction, offending: List[int]):
        super().__init__(
            f"paper-mode coefficients are non-integral at indices {offending}"
        )
        self.coeffs = coeffs
        self.tau = tau
        self.offending = offending


class AssignmentDoesNotSatisfy(QCError, ValueError):
    pass


class TooManySigns(QCError, ValueError):
    pass


class CapExceeded(HardnessChainError, ValueError):
    """A brute-force oracle was asked to scan beyond its limit"""


class AuditViolation(QCError):
    """One or more structural checks failed"""

    def __init__(self, failed: List[str], values: Optional[Dict[str, object]] = None):
        super().__init__(f"audit failed: {', '.join(failed)}")
        self.failed = failed
        self.values = values or {}


# Multiple-Residue

class MRDError(HardnessChainError):
    """Base class for the QC -> MRD layer"""


class UnsupportedExponent(MRDError, ValueError):
    pass


class InvalidMRDInstance(MRDError, ValueError):
    pass


class SearchSpaceTooLarge(HardnessChainError, ValueError):
    pass


class ResidueNotCovered(MRDError):
    """Some z mod q_i is not among the stored residues"""

    def __init__(self, index: int, q: int, residue: int):
        super().__init__(
            f"equation {index}: residue {residue} mod {q} is not a stored root"
        )
        self.index = index
        self.q = q
        self.residue = residue


# Two-stage stochastic ILP

class ILPError(HardnessChainError):
    """Base class for the MRD -> 2-stage ILP layer"""


class NoInstanceInput(ILPError, ValueError):
    pass


class WitnessMismatch(ILPError, ValueError):
    pass


class DimensionMismatch(ILPError, ValueError):
    pass


class NegativeCoefficient(ILPError, ValueError):
    """A coefficient has no binary digit encoding"""


class InvalidBounds(ILPError, ValueError):
    pass


class ChainViolation(ILPError):
    pass


class MalformedILPFile(ILPError, ValueError):
    pass


# Files and orchestration

class DocumentError(HardnessChainError):
    """Base class for instance/witness document errors"""


class MalformedDocument(DocumentError, ValueError):
    pass


class UnreadableInput(DocumentError):
    """An input file is missing, too large or not valid text"""


class PipelineError(HardnessChainError):
    """A module error raised inside the pipeline, tagged with its layer"""

    def __init__(self, layer: str, cause: Exception):
        super().__init__(f"[{layer}] {cause}")
        self.layer = layer
        self.cause = cause
