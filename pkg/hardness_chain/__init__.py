"""
hardness-chain: the 3-SAT -> Quadratic Congruences -> Multiple-Residue ->
2-stage stochastic ILP reduction chain, with witness propagation, exact
verification and structural audits.
"""

__version__ = "1.0.0"

from .core.pipeline import PipelineOptions, PipelineResult, ReductionPipeline, run_pipeline

__all__ = [
    "PipelineOptions",
    "PipelineResult",
    "ReductionPipeline",
    "run_pipeline",
    "__version__",
]
