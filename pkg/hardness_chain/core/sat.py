"""
3-CNF formulas: DIMACS codec, simplification and a brute-force oracle
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

from .errors import (
    ClauseTooLarge,
    LiteralOutOfRange,
    MalformedHeader,
    MissingTerminator,
    TooManyVariables,
)

logger = logging.getLogger(__name__)

MAX_CLAUSE_SIZE = 3
MAX_BRUTE_VARS = 24

Clause = FrozenSet[int]


@dataclass(frozen=True)
class Formula:
    """CNF formula over variables 1..num_vars

    `origin[i - 1]` is the original index of variable i; it is the identity
    unless the formula came out of `simplify`.
    """

    num_vars: int
    clauses: Tuple[Clause, ...]
    origin: Tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.num_vars < 0:
            raise MalformedHeader("variable count must be non-negative")
        for clause in self.clauses:
            if not 1 <= len(clause) <= MAX_CLAUSE_SIZE:
                raise ClauseTooLarge(
                    f"clause {sorted(clause)} has {len(clause)} literals"
                )
            for literal in clause:
                if literal == 0 or abs(literal) > self.num_vars:
                    raise LiteralOutOfRange(
                        f"literal {literal} outside [1, {self.num_vars}]"
                    )
        if not self.origin:
            object.__setattr__(self, "origin", tuple(range(1, self.num_vars + 1)))
        elif len(self.origin) != self.num_vars:
            raise MalformedHeader("origin map must cover every variable")

    @classmethod
    def from_lists(cls, num_vars: int, clauses: Sequence[Sequence[int]]) -> "Formula":
        return cls(num_vars, tuple(frozenset(c) for c in clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class Assignment:
    """Total truth assignment; values[i - 1] is r(x_i)"""

    values: Tuple[bool, ...]

    def __getitem__(self, var: int) -> bool:
        return self.values[var - 1]

    @property
    def num_vars(self) -> int:
        return len(self.values)

    def as_bits(self) -> List[int]:
        return [int(v) for v in self.values]


def _sorted_clause(clause: Clause) -> List[int]:
    return sorted(clause, key=lambda lit: (abs(lit), lit < 0))


def parse_dimacs(text: Union[str, TextIO]) -> Formula:
    """Parse DIMACS CNF text into a Formula

    Duplicate literals inside a clause collapse; clauses keep file order.
    """
    if not isinstance(text, str):
        text = text.read()

    num_vars: Optional[int] = None
    declared_clauses = 0
    clauses: List[Clause] = []
    pending: List[int] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("%"):
            # SATLIB end-of-data marker
            break
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise MalformedHeader(f"line {line_no}: duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeader(f"line {line_no}: expected 'p cnf <vars> <clauses>'")
            try:
                num_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError as e:
                raise MalformedHeader(f"line {line_no}: {e}") from e
            if num_vars < 0 or declared_clauses < 0:
                raise MalformedHeader(f"line {line_no}: negative counts")
            continue
        if num_vars is None:
            raise MalformedHeader(f"line {line_no}: clause before header")
        for token in line.split():
            try:
                literal = int(token)
            except ValueError as e:
                raise MalformedHeader(f"line {line_no}: bad token {token!r}") from e
            if literal == 0:
                clause = frozenset(pending)
                if not 1 <= len(clause) <= MAX_CLAUSE_SIZE:
                    raise ClauseTooLarge(
                        f"line {line_no}: clause has {len(clause)} distinct literals"
                    )
                clauses.append(clause)
                pending = []
                continue
            if abs(literal) > num_vars:
                raise LiteralOutOfRange(
                    f"line {line_no}: literal {literal} outside [1, {num_vars}]"
                )
            pending.append(literal)

    if num_vars is None:
        raise MalformedHeader("missing 'p cnf' header")
    if pending:
        raise MissingTerminator("last clause is not terminated by 0")
    if len(clauses) != declared_clauses:
        logger.warning(
            f"header declares {declared_clauses} clauses, found {len(clauses)}"
        )
    return Formula(num_vars, tuple(clauses))


def write_dimacs(formula: Formula, comments: Sequence[str] = ()) -> str:
    """Serialize a formula as DIMACS CNF (newline-terminated)"""
    lines = [f"c {comment}" for comment in comments]
    lines.append(f"p cnf {formula.num_vars} {formula.num_clauses}")
    for clause in formula.clauses:
        lines.append(" ".join(str(lit) for lit in _sorted_clause(clause)) + " 0")
    return "\n".join(lines) + "\n"


def simplify(formula: Formula) -> Formula:
    """Drop duplicate and tautological clauses, then compact the variables

    The first occurrence of a duplicate clause is kept. Variables that no
    longer occur are removed and the rest renumbered in increasing order;
    `origin` records the original index of every surviving variable.
    """
    seen = set()
    kept: List[Clause] = []
    for clause in formula.clauses:
        if any(-lit in clause for lit in clause):
            continue
        if clause in seen:
            continue
        seen.add(clause)
        kept.append(clause)

    occurring = sorted({abs(lit) for clause in kept for lit in clause})
    renumber = {old: new for new, old in enumerate(occurring, start=1)}
    clauses = tuple(
        frozenset((1 if lit > 0 else -1) * renumber[abs(lit)] for lit in clause)
        for clause in kept
    )
    origin = tuple(formula.origin[old - 1] for old in occurring)

    dropped = formula.num_clauses - len(clauses)
    if dropped:
        logger.debug(f"simplify dropped {dropped} clause(s)")
    return Formula(len(occurring), clauses, origin)


def eval_formula(formula: Formula, assignment: Assignment) -> Tuple[bool, List[int]]:
    """Per-clause satisfied-literal counts and overall satisfaction"""
    if assignment.num_vars != formula.num_vars:
        raise ValueError(
            f"assignment covers {assignment.num_vars} variables, "
            f"formula has {formula.num_vars}"
        )
    counts = [
        sum(1 for lit in clause if assignment[abs(lit)] == (lit > 0))
        for clause in formula.clauses
    ]
    return all(c >= 1 for c in counts), counts


def _check_brute_size(formula: Formula, max_vars: int) -> None:
    if formula.num_vars > max_vars:
        raise TooManyVariables(
            f"{formula.num_vars} variables exceed the brute-force limit {max_vars}"
        )


def iter_models(formula: Formula, max_vars: int = MAX_BRUTE_VARS) -> Iterator[Assignment]:
    """All satisfying assignments in lexicographic order

    false < true, variable 1 most significant.
    """
    _check_brute_size(formula, max_vars)
    n = formula.num_vars
    # clauses as (positive mask, negative mask) with variable 1 at bit n-1
    masks = []
    for clause in formula.clauses:
        pos = neg = 0
        for lit in clause:
            bit = 1 << (n - abs(lit))
            if lit > 0:
                pos |= bit
            else:
                neg |= bit
        masks.append((pos, neg))

    full = (1 << n) - 1
    for bits in range(1 << n):
        inverted = full ^ bits
        if all((bits & pos) or (inverted & neg) for pos, neg in masks):
            yield Assignment(tuple(bool((bits >> (n - i)) & 1) for i in range(1, n + 1)))


def solve_brute(formula: Formula, max_vars: int = MAX_BRUTE_VARS) -> Optional[Assignment]:
    """Lexicographically smallest model, or None when unsatisfiable"""
    return next(iter_models(formula, max_vars), None)


def lift_assignment(simplified: Formula, assignment: Assignment, num_vars: int) -> Assignment:
    """Map a model of a simplified formula back onto the original variables

    Variables eliminated by `simplify` are set to false.
    """
    values = [False] * num_vars
    for new_index, old_index in enumerate(simplified.origin, start=1):
        values[old_index - 1] = assignment[new_index]
    return Assignment(tuple(values))
