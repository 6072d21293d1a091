"""
Reduction pipeline

parse -> simplify -> SAT oracle -> QC -> MRD -> 2-stage ILP (-> binary
encoding). When the formula is satisfiable, the oracle's model is carried
through every layer and each certificate is verified on its own instance.
"""

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import pandas as pd

from ..config.settings import Settings
from ..parsers.dimacs_parser import DimacsParser
from ..utils import documents
from ..utils.export_utils import ExportManager
from .errors import HardnessChainError, PipelineError, ResidueNotCovered
from .mrd import MRDResult, NoInstance, mrd_witness_from_z, pair_mode_misses, reduce_qc_to_mrd, verify_mrd
from .qc_reduction import (
    AuditReport,
    QCInstance,
    SatLinearSystem,
    UniquenessReport,
    audit,
    check_uniqueness,
    qc_witness,
    reduce_sat_to_qc,
    verify_qc,
)
from .sat import Assignment, Formula, eval_formula, lift_assignment, parse_dimacs, simplify, solve_brute
from .stoch_ilp import (
    EncodedILP,
    Solution,
    TwoStageILP,
    decode_solution,
    encode_binary,
    encode_solution,
    ilp_from_witness,
    reduce_mrd_to_ilp,
    verify_solution,
)


@dataclass
class PipelineOptions:
    """Per-run options; defaults come from Settings"""
    coeff_mode: str = "derived"
    residue_mode: str = "full"
    encode: bool = False
    seed: int = 0
    check_uniqueness: bool = True
    # assignments the SAT oracle may enumerate
    brute_cap: int = 10 ** 7

    @classmethod
    def from_settings(cls, settings: Settings) -> "PipelineOptions":
        return cls(
            coeff_mode=settings.reduction.coeff_mode,
            residue_mode=settings.reduction.residue_mode,
            encode=settings.reduction.encode,
            seed=settings.audit.seed,
            check_uniqueness=settings.audit.uniqueness_samples > 0,
            brute_cap=settings.oracle.brute_cap,
        )


@dataclass
class LayerWitnesses:
    """Certificates of one satisfiable run, one per layer"""
    model: Optional[Assignment] = None
    z: Optional[int] = None
    signs: Optional[Tuple[int, ...]] = None
    choice: Optional[Tuple[int, ...]] = None
    solution: Optional[Solution] = None
    encoded_solution: Optional[Solution] = None


@dataclass
class PipelineResult:
    """Everything one pipeline run produced"""
    formula: Formula
    simplified: Formula
    options: PipelineOptions
    sat_answer: Optional[Assignment] = None
    qc: Optional[QCInstance] = None
    system: Optional[SatLinearSystem] = None
    mrd: Optional[MRDResult] = None
    ilp: Optional[TwoStageILP] = None
    encoded: Optional[EncodedILP] = None
    witnesses: LayerWitnesses = field(default_factory=LayerWitnesses)
    audit: Optional[AuditReport] = None
    uniqueness: Optional[UniquenessReport] = None
    layer_checks: Dict[str, bool] = field(default_factory=dict)
    pair_misses: List[Tuple[int, int]] = field(default_factory=list)
    trivially_reduced: bool = False

    @property
    def satisfiable(self) -> bool:
        return self.sat_answer is not None

    @property
    def no_instance(self) -> bool:
        return isinstance(self.mrd, NoInstance)

    @property
    def all_checks_pass(self) -> bool:
        return all(self.layer_checks.values())

    @property
    def exit_code(self) -> int:
        return 0 if self.satisfiable else 1


class ReductionPipeline:
    """Runs the reduction chain and writes its artifacts"""

    def __init__(self, settings: Optional[Settings] = None, config_path: Optional[str] = None):
        self.settings = settings or Settings(config_path)
        self.logger = logging.getLogger(__name__)
        self.parser = DimacsParser(self.settings)
        self.exporter = ExportManager(self.settings)

    @contextmanager
    def _layer(self, name: str) -> Iterator[None]:
        """Tag module errors raised inside the block with the layer name"""
        try:
            yield
        except PipelineError:
            raise
        except HardnessChainError as e:
            self.logger.error(f"[{name}] {e}")
            raise PipelineError(name, e) from e

    def load(self, source: Union[str, Path, Formula]) -> Formula:
        """Formula from a Formula, a path to a DIMACS file or DIMACS text"""
        with self._layer("parse"):
            if isinstance(source, Formula):
                return source
            if isinstance(source, Path):
                return self.parser.parse_file(source)
            return parse_dimacs(source)

    def run(
        self, source: Union[str, Path, Formula], options: Optional[PipelineOptions] = None
    ) -> PipelineResult:
        """
        Run the full chain on one formula

        Args:
            source: Formula, DIMACS path or DIMACS text
            options: reduction modes, encoding and seed

        Returns:
            PipelineResult with instances, certificates and layer checks
        """
        options = options or PipelineOptions.from_settings(self.settings)
        start_time = time.perf_counter()

        formula = self.load(source)
        simplified = simplify(formula)
        result = PipelineResult(formula=formula, simplified=simplified, options=options)

        # 1. SAT oracle
        max_vars = min(self.settings.oracle.max_sat_vars, options.brute_cap.bit_length() - 1)
        with self._layer("sat"):
            model = solve_brute(simplified, max_vars)
        if model is not None:
            result.witnesses.model = model
            result.sat_answer = lift_assignment(simplified, model, formula.num_vars)
            result.layer_checks["sat"] = eval_formula(formula, result.sat_answer)[0]

        if simplified.num_clauses < 2:
            result.trivially_reduced = True
            self.logger.info(
                f"simplified formula has {simplified.num_clauses} clause(s); "
                f"answered by the SAT oracle: {'satisfiable' if model is not None else 'unsatisfiable'}"
            )
            return result

        # 2. SAT -> QC and its audit
        with self._layer("qc"):
            result.qc, result.system = reduce_sat_to_qc(simplified, options.coeff_mode)
            result.audit = audit(result.qc, result.system, strict=self.settings.audit.strict)
        result.layer_checks["audit"] = result.audit.passed

        if options.check_uniqueness and result.system.n + 1 <= self.settings.oracle.max_sign_bits:
            with self._layer("qc"):
                result.uniqueness = check_uniqueness(
                    result.system,
                    samples=self.settings.audit.uniqueness_samples,
                    seed=options.seed,
                    max_bits=self.settings.oracle.max_sign_bits,
                )
            result.layer_checks["uniqueness"] = result.uniqueness.holds

        # 3. QC -> MRD
        with self._layer("mrd"):
            result.mrd = reduce_qc_to_mrd(result.qc, options.residue_mode)

        # 4. MRD -> ILP, optional encoding
        if not result.no_instance:
            with self._layer("ilp"):
                result.ilp = reduce_mrd_to_ilp(result.mrd)
            if options.encode:
                with self._layer("encode"):
                    result.encoded = encode_binary(result.ilp)

        if model is not None:
            self._propagate_witness(result, model)

        self.logger.info(
            f"pipeline finished in {time.perf_counter() - start_time:.2f}s: "
            f"{'satisfiable' if result.satisfiable else 'unsatisfiable'}, "
            f"checks {result.layer_checks}"
        )
        return result

    def _propagate_witness(self, result: PipelineResult, model: Assignment):
        """Push a model of the simplified formula through every layer"""
        witnesses = result.witnesses

        with self._layer("qc"):
            witnesses.z, witnesses.signs = qc_witness(result.system, model)
        z = witnesses.z
        result.layer_checks["qc"] = verify_qc(result.qc, z)

        if result.options.residue_mode == "pair":
            result.pair_misses = pair_mode_misses(result.qc, z)

        if result.no_instance:
            self.logger.warning("satisfiable formula reduced to NoInstance")
            result.layer_checks["mrd"] = False
            return

        try:
            witnesses.choice = mrd_witness_from_z(result.mrd, z)
        except ResidueNotCovered as e:
            self.logger.warning(f"QC witness is not covered by the MRD instance: {e}")
            result.layer_checks["mrd"] = False
            return
        result.layer_checks["mrd"] = verify_mrd(result.mrd, z)
        if not result.layer_checks["mrd"]:
            return

        with self._layer("ilp"):
            witnesses.solution = ilp_from_witness(result.mrd, z, witnesses.choice)
            result.layer_checks["ilp"] = verify_solution(result.ilp, witnesses.solution)

        if result.encoded is not None:
            with self._layer("encode"):
                encoded = encode_solution(result.encoded, witnesses.solution)
                witnesses.encoded_solution = encoded
                result.layer_checks["encode"] = (
                    verify_solution(result.encoded.ilp, encoded)
                    and decode_solution(result.encoded, encoded) == witnesses.solution
                )

    def save_results(self, result: PipelineResult, output_dir: Union[str, Path]) -> List[str]:
        """Write every artifact of a run; returns the written paths"""
        output_path = Path(output_dir)
        output_path.mkdir(parents=True, exist_ok=True)
        export = self.exporter.export
        written = []

        origin = " ".join(str(v) for v in result.simplified.origin)
        written.append(export(
            result.simplified, "cnf", output_path / "formula.cnf",
            comments=["simplified formula", f"origin {origin}"],
        ))

        if result.sat_answer is not None:
            written.append(export(
                documents.witness_document("sat", assignment=result.sat_answer.values),
                "document", output_path / "witness-sat.yaml",
            ))

        if result.trivially_reduced:
            return written

        written.append(export(documents.qc_document(result.qc, result.system), "document", output_path / "qc.yaml"))
        written.append(export(
            documents.mrd_document(result.mrd, result.options.residue_mode),
            "document", output_path / "mrd.yaml",
        ))
        if result.ilp is not None:
            written.append(export(result.ilp, "2ssilp", output_path / "instance.2ssilp"))
        if result.encoded is not None:
            written.append(export(result.encoded.ilp, "2ssilp", output_path / "encoded.2ssilp"))

        witnesses = result.witnesses
        if witnesses.z is not None:
            written.append(export(
                documents.witness_document("qc", z=witnesses.z, signs=witnesses.signs),
                "document", output_path / "witness-qc.yaml",
            ))
        if witnesses.choice is not None:
            written.append(export(
                documents.witness_document("mrd", z=witnesses.z, choice=witnesses.choice),
                "document", output_path / "witness-mrd.yaml",
            ))
        if witnesses.solution is not None:
            written.append(export(
                documents.witness_document("2ssilp", solution=witnesses.solution.x),
                "document", output_path / "witness-2ssilp.yaml",
            ))
        if witnesses.encoded_solution is not None:
            written.append(export(
                documents.witness_document("2ssilp", solution=witnesses.encoded_solution.x),
                "document", output_path / "witness-encoded.yaml",
            ))

        written.append(export(documents.audit_document(result.audit), "document", output_path / "audit.yaml"))
        written.append(export(
            result.audit, "summary", output_path / "audit.txt", uniqueness=result.uniqueness,
        ))

        self.logger.info(f"Saved {len(written)} files to {output_path}")
        return written


def run_pipeline(
    source: Union[str, Path, Formula],
    options: Optional[PipelineOptions] = None,
    settings: Optional[Settings] = None,
) -> PipelineResult:
    return ReductionPipeline(settings).run(source, options)


# Corpus reports

AUDIT_COLUMNS = (
    "n", "ell_prime", "m_prime", "size_parameter", "num_primes", "alpha_bits",
    "beta_bits", "gamma_bits", "max_prime", "grid_threshold", "p_star_shifted",
)


def corpus_audit_frame(results: Sequence[PipelineResult]) -> pd.DataFrame:
    """One row per reduced formula with its audit values"""
    rows = []
    for index, result in enumerate(results):
        if result.audit is None:
            continue
        row = {"index": index}
        row.update({name: result.audit.values.get(name) for name in AUDIT_COLUMNS})
        row["satisfiable"] = result.satisfiable
        row["audit_passed"] = result.audit.passed
        row["checks_passed"] = result.all_checks_pass
        rows.append(row)
    return pd.DataFrame(rows, columns=["index", *AUDIT_COLUMNS, "satisfiable", "audit_passed", "checks_passed"])


@dataclass
class GrowthReport:
    """Bit lengths aggregated by l+m, with monotonicity flags"""
    table: pd.DataFrame
    monotone: Dict[str, bool]


def growth_report(frame: pd.DataFrame) -> GrowthReport:
    """Mean sizes per l+m and whether they grow with it"""
    columns = ["num_primes", "alpha_bits", "beta_bits", "gamma_bits"]
    if frame.empty:
        return GrowthReport(pd.DataFrame(columns=["size_parameter", *columns]), {c: True for c in columns})
    table = (
        frame.groupby("size_parameter")[columns]
        .mean()
        .reset_index()
        .sort_values("size_parameter")
    )
    table["beta_bits_per_size_squared"] = table["beta_bits"] / table["size_parameter"] ** 2
    monotone = {c: bool(table[c].is_monotonic_increasing) for c in columns}
    return GrowthReport(table, monotone)
