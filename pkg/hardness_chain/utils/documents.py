"""
Versioned YAML documents for instances, witnesses and audits

Every document carries `kind` and `version: 1`. Integers that can grow
beyond 64 bits are stored as decimal strings.
"""

from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, StringConstraints, ValidationError

from ..core.errors import MalformedDocument
from ..core.mrd import NO_INSTANCE, MRDInstance, MRDResult, NoInstance
from ..core.numtheory import Factorization
from ..core.qc_reduction import AuditReport, QCInstance, SatLinearSystem
from ..core.sat import Formula
from .data_utils import decimals, from_decimal, integers, to_decimal

DOCUMENT_VERSION = 1

DecimalStr = Annotated[str, StringConstraints(pattern=r"^-?[0-9]+$")]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FactorEntry(_Strict):
    prime: DecimalStr
    exponent: int = Field(ge=1)


class FormulaSection(_Strict):
    num_vars: int = Field(ge=0)
    clauses: List[List[int]]
    origin: List[int]


class SystemSection(_Strict):
    mode: Literal["derived", "paper"]
    m_prime: int
    ell_prime: int
    n: int
    p_star: DecimalStr
    p_star_rank: int
    grid_threshold: DecimalStr
    M1: DecimalStr
    tau: DecimalStr
    H: DecimalStr
    K: DecimalStr
    clause_primes: List[DecimalStr]
    grid_primes: List[List[DecimalStr]]
    coeffs: List[DecimalStr]
    thetas: List[DecimalStr]
    formula: FormulaSection


class QCDocument(_Strict):
    kind: Literal["qc"] = "qc"
    version: Literal[1] = DOCUMENT_VERSION
    alpha: DecimalStr
    beta: DecimalStr
    gamma: DecimalStr
    factorization: List[FactorEntry]
    system: Optional[SystemSection] = None


class EquationEntry(_Strict):
    q: DecimalStr
    roots: List[DecimalStr]


class MRDDocument(_Strict):
    kind: Literal["mrd"] = "mrd"
    version: Literal[1] = DOCUMENT_VERSION
    mode: Literal["pair", "full"]
    no_instance: bool = False
    zeta: Optional[DecimalStr] = None
    equations: List[EquationEntry] = Field(default_factory=list)


class WitnessDocument(_Strict):
    kind: Literal["witness"] = "witness"
    version: Literal[1] = DOCUMENT_VERSION
    layer: Literal["sat", "qc", "mrd", "2ssilp"]
    assignment: Optional[List[bool]] = None
    z: Optional[DecimalStr] = None
    signs: Optional[List[int]] = None
    choice: Optional[List[DecimalStr]] = None
    solution: Optional[List[DecimalStr]] = None


AuditValue = Union[bool, DecimalStr, float, None]


class AuditDocument(_Strict):
    kind: Literal["audit"] = "audit"
    version: Literal[1] = DOCUMENT_VERSION
    passed: bool
    checks: Dict[str, bool]
    values: Dict[str, AuditValue]


Document = Union[QCDocument, MRDDocument, WitnessDocument, AuditDocument]

_MODELS = {
    "qc": QCDocument,
    "mrd": MRDDocument,
    "witness": WitnessDocument,
    "audit": AuditDocument,
}


def dump_document(document: Document) -> str:
    return yaml.safe_dump(
        document.model_dump(mode="json", exclude_none=True),
        sort_keys=False,
        default_flow_style=None,
        width=1 << 16,
    )


def load_document(text: str, expected_kind: Optional[str] = None) -> Document:
    """Parse and validate a document; the kind is taken from the data

    Raises:
        MalformedDocument: invalid YAML, unknown kind or failed validation.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise MalformedDocument(f"invalid YAML: {e}") from e
    if not isinstance(data, dict):
        raise MalformedDocument("document must be a mapping")
    kind = data.get("kind")
    if kind not in _MODELS:
        raise MalformedDocument(f"unknown document kind {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise MalformedDocument(f"expected a {expected_kind!r} document, got {kind!r}")
    try:
        return _MODELS[kind].model_validate(data)
    except ValidationError as e:
        raise MalformedDocument(f"invalid {kind} document: {e}") from e


# Formula


def formula_section(formula: Formula) -> FormulaSection:
    return FormulaSection(
        num_vars=formula.num_vars,
        clauses=[sorted(c, key=lambda lit: (abs(lit), lit < 0)) for c in formula.clauses],
        origin=list(formula.origin),
    )


def formula_from_section(section: FormulaSection) -> Formula:
    return Formula(
        section.num_vars,
        tuple(frozenset(c) for c in section.clauses),
        tuple(section.origin),
    )


# QC


def system_section(system: SatLinearSystem) -> SystemSection:
    return SystemSection(
        mode=system.mode,
        m_prime=system.m_prime,
        ell_prime=system.ell_prime,
        n=system.n,
        p_star=to_decimal(system.p_star),
        p_star_rank=system.p_star_rank,
        grid_threshold=to_decimal(system.grid_threshold),
        M1=to_decimal(system.M1),
        tau=to_decimal(system.tau),
        H=to_decimal(system.H),
        K=to_decimal(system.K),
        clause_primes=decimals(system.clause_primes),
        grid_primes=[decimals(row) for row in system.grid_primes],
        coeffs=decimals(system.coeffs),
        thetas=decimals(system.thetas),
        formula=formula_section(system.formula),
    )


def system_from_section(section: SystemSection) -> SatLinearSystem:
    return SatLinearSystem(
        formula=formula_from_section(section.formula),
        m_prime=section.m_prime,
        ell_prime=section.ell_prime,
        n=section.n,
        clause_primes=tuple(integers(section.clause_primes)),
        grid_primes=tuple(tuple(integers(row)) for row in section.grid_primes),
        p_star=from_decimal(section.p_star),
        M1=from_decimal(section.M1),
        coeffs=tuple(integers(section.coeffs)),
        tau=from_decimal(section.tau),
        thetas=tuple(integers(section.thetas)),
        H=from_decimal(section.H),
        K=from_decimal(section.K),
        mode=section.mode,
        p_star_rank=section.p_star_rank,
        grid_threshold=from_decimal(section.grid_threshold),
    )


def qc_document(instance: QCInstance, system: Optional[SatLinearSystem] = None) -> QCDocument:
    return QCDocument(
        alpha=to_decimal(instance.alpha),
        beta=to_decimal(instance.beta),
        gamma=to_decimal(instance.gamma),
        factorization=[
            FactorEntry(prime=to_decimal(p), exponent=e)
            for p, e in instance.beta_factorization.factors
        ],
        system=system_section(system) if system is not None else None,
    )


def qc_from_document(document: QCDocument) -> Tuple[QCInstance, Optional[SatLinearSystem]]:
    try:
        factorization = Factorization(
            tuple((from_decimal(f.prime), f.exponent) for f in document.factorization)
        )
        instance = QCInstance(
            from_decimal(document.alpha),
            from_decimal(document.beta),
            from_decimal(document.gamma),
            factorization,
        )
        system = system_from_section(document.system) if document.system else None
    except ValueError as e:
        raise MalformedDocument(f"inconsistent qc document: {e}") from e
    return instance, system


# MRD


def mrd_document(result: MRDResult, mode: str) -> MRDDocument:
    if isinstance(result, NoInstance):
        return MRDDocument(mode=mode, no_instance=True)
    return MRDDocument(
        mode=result.mode,
        zeta=to_decimal(result.zeta),
        equations=[
            EquationEntry(q=to_decimal(q), roots=decimals(sorted(roots)))
            for q, roots in result.equations
        ],
    )


def mrd_from_document(document: MRDDocument) -> MRDResult:
    if document.no_instance:
        return NO_INSTANCE
    if document.zeta is None:
        raise MalformedDocument("mrd document without no_instance needs zeta")
    try:
        return MRDInstance.from_pairs(
            [(from_decimal(e.q), integers(e.roots)) for e in document.equations],
            from_decimal(document.zeta),
            document.mode,
        )
    except ValueError as e:
        raise MalformedDocument(f"inconsistent mrd document: {e}") from e


# Witnesses


def witness_document(layer: str, **fields: Any) -> WitnessDocument:
    """Build a witness; integer fields are converted to decimal strings"""
    if "z" in fields and fields["z"] is not None:
        fields["z"] = to_decimal(fields["z"])
    for key in ("choice", "solution"):
        if fields.get(key) is not None:
            fields[key] = decimals(fields[key])
    if fields.get("signs") is not None:
        fields["signs"] = list(fields["signs"])
    if fields.get("assignment") is not None:
        fields["assignment"] = [bool(v) for v in fields["assignment"]]
    return WitnessDocument(layer=layer, **fields)


def _require(document: WitnessDocument, name: str) -> Any:
    value = getattr(document, name)
    if value is None:
        raise MalformedDocument(f"{document.layer} witness needs '{name}'")
    return value


def witness_z(document: WitnessDocument) -> int:
    return from_decimal(_require(document, "z"))


def witness_choice(document: WitnessDocument) -> Tuple[int, ...]:
    return tuple(integers(_require(document, "choice")))


def witness_solution(document: WitnessDocument) -> Tuple[int, ...]:
    return tuple(integers(_require(document, "solution")))


def witness_assignment(document: WitnessDocument) -> Tuple[bool, ...]:
    return tuple(_require(document, "assignment"))


# Audit


def _audit_value(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, float):
        return value
    if isinstance(value, int):
        return to_decimal(value)
    return str(value)


def audit_document(report: AuditReport) -> AuditDocument:
    return AuditDocument(
        passed=report.passed,
        checks=dict(report.checks),
        values={k: _audit_value(v) for k, v in report.values.items()},
    )

