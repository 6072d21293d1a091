"""
Core modules for hardness-chain

Number theory, formulas and the three reductions
3-SAT -> Quadratic Congruences -> Multiple-Residue -> 2-stage stochastic ILP.
The pipeline lives in `hardness_chain.core.pipeline`.
"""

from .mrd import NO_INSTANCE, MRDInstance, NoInstance, reduce_qc_to_mrd, solve_mrd
from .qc_reduction import QCInstance, SatLinearSystem, audit, reduce_sat_to_qc
from .sat import Assignment, Formula, parse_dimacs, simplify, solve_brute
from .stoch_ilp import EncodedILP, Solution, TwoStageILP, encode_binary, reduce_mrd_to_ilp

__all__ = [
    "Assignment",
    "EncodedILP",
    "Formula",
    "MRDInstance",
    "NO_INSTANCE",
    "NoInstance",
    "QCInstance",
    "SatLinearSystem",
    "Solution",
    "TwoStageILP",
    "audit",
    "encode_binary",
    "parse_dimacs",
    "reduce_mrd_to_ilp",
    "reduce_qc_to_mrd",
    "reduce_sat_to_qc",
    "simplify",
    "solve_brute",
    "solve_mrd",
]
