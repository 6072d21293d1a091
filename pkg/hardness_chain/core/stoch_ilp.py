"""
Multiple-Residue -> 2-stage stochastic ILP

The constraint matrix has the shape

    A_1 B_1  0  ...  0
    A_2  0  B_2 ...  0
    ...
    A_n  0   0  ... B_n

with s shared first-stage columns and t columns per block. All arithmetic
is exact; matrices are kept as nested tuples and multiplied through numpy
object arrays so Python integers never overflow.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    CapExceeded,
    ChainViolation,
    DimensionMismatch,
    InvalidBounds,
    MalformedILPFile,
    NegativeCoefficient,
    NoInstanceInput,
    SearchSpaceTooLarge,
    WitnessMismatch,
)
from .mrd import WIDE_MODULUS, MRDInstance, MRDResult, NoInstance, mrd_witness_from_z, verify_mrd

logger = logging.getLogger(__name__)

FORMAT_HEADER = "2SSILP 1"
SCAN_LIMIT = 10 ** 7
EXHAUSTIVE_LIMIT = 10 ** 7

Matrix = Tuple[Tuple[int, ...], ...]


def _matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in row) for row in rows)


@dataclass(frozen=True)
class TwoStageILP:
    """Feasibility problem A x = b, L <= x <= U over the block matrix above"""

    n: int
    r: int
    s: int
    t: int
    A_blocks: Tuple[Matrix, ...]
    B_blocks: Tuple[Matrix, ...]
    b: Tuple[int, ...]
    L: Tuple[int, ...]
    U: Tuple[int, ...]
    w: Tuple[int, ...]

    def __post_init__(self):
        if min(self.n, self.r, self.s, self.t) < 1:
            raise DimensionMismatch("n, r, s and t must be positive")
        if len(self.A_blocks) != self.n or len(self.B_blocks) != self.n:
            raise DimensionMismatch(f"expected {self.n} blocks")
        for i, (a, bb) in enumerate(zip(self.A_blocks, self.B_blocks)):
            if len(a) != self.r or any(len(row) != self.s for row in a):
                raise DimensionMismatch(f"A_{i + 1} must be {self.r}x{self.s}")
            if len(bb) != self.r or any(len(row) != self.t for row in bb):
                raise DimensionMismatch(f"B_{i + 1} must be {self.r}x{self.t}")
        if len(self.b) != self.n * self.r:
            raise DimensionMismatch(f"b must have length {self.n * self.r}")
        for name in ("L", "U", "w"):
            if len(getattr(self, name)) != self.num_columns:
                raise DimensionMismatch(f"{name} must have length {self.num_columns}")
        for j, (lo, hi) in enumerate(zip(self.L, self.U)):
            if lo > hi:
                raise InvalidBounds(f"column {j}: lower bound {lo} exceeds upper bound {hi}")

    @property
    def num_columns(self) -> int:
        return self.s + self.n * self.t

    @property
    def delta(self) -> int:
        """Largest absolute entry of the constraint matrix"""
        entries = [abs(v) for blocks in (self.A_blocks, self.B_blocks) for m in blocks for row in m for v in row]
        return max(entries, default=0)

    def block_columns(self, i: int) -> range:
        """Global indices of the second-stage columns of block i (0-based)"""
        start = self.s + i * self.t
        return range(start, start + self.t)

    def block_rows(self, i: int) -> np.ndarray:
        """[A_i | B_i] as an exact object array"""
        return np.array(
            [list(a) + list(bb) for a, bb in zip(self.A_blocks[i], self.B_blocks[i])],
            dtype=object,
        )

    def block_rhs(self, i: int) -> Tuple[int, ...]:
        return self.b[i * self.r:(i + 1) * self.r]


@dataclass(frozen=True)
class Solution:
    """First-stage values followed by every block's values in block order"""

    x: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class ReductionTag:
    """What solve_reduced needs to know about an ILP built from an MRD instance"""

    moduli: Tuple[int, ...]
    roots: Tuple[Tuple[int, ...], ...]
    zeta: int

    @property
    def rho(self) -> int:
        return max(len(r) for r in self.roots)

    @classmethod
    def from_mrd(cls, instance: MRDInstance) -> "ReductionTag":
        return cls(
            moduli=tuple(instance.moduli),
            roots=tuple(tuple(instance.sorted_roots(i)) for i in range(len(instance.equations))),
            zeta=instance.zeta,
        )

    @classmethod
    def from_ilp(cls, ilp: TwoStageILP) -> "ReductionTag":
        """Recover the tag from the layout reduce_mrd_to_ilp emits

        Selector columns have upper bound 1, pad columns upper bound 0.
        Anything else raises DimensionMismatch.
        """
        if ilp.s != 1 or ilp.r != 2 or ilp.t < 2:
            raise DimensionMismatch("not a reduction-shaped instance (s=1, r=2, t>=2)")
        if any(ilp.L) or any(ilp.w) or ilp.b != (0, 1) * ilp.n:
            raise DimensionMismatch("reduction-shaped instances have L = 0, w = 0 and b = (0, 1, ...)")
        zeta = ilp.U[0]
        moduli, roots = [], []
        for i in range(ilp.n):
            if ilp.A_blocks[i] != ((-1,), (0,)):
                raise DimensionMismatch(f"block {i + 1}: A must be [[-1], [0]]")
            residues, selectors = ilp.B_blocks[i]
            upper = [ilp.U[j] for j in ilp.block_columns(i)]
            width = sum(selectors)
            pattern = (0,) + (1,) * width + (0,) * (ilp.t - 1 - width)
            q = residues[0]
            block_roots = residues[1:1 + width]
            if (
                width < 1
                or selectors != pattern
                or upper != [zeta] + list(pattern[1:])
                or any(residues[1 + width:])
                or q < 2
                or list(block_roots) != sorted(set(block_roots))
                or not all(0 <= v < q for v in block_roots)
            ):
                raise DimensionMismatch(f"block {i + 1} does not follow the residue/selector layout")
            moduli.append(q)
            roots.append(block_roots)
        return cls(tuple(moduli), tuple(roots), zeta)


@dataclass(frozen=True)
class EncodedILP:
    """Result of the binary digit gadget

    group_map[g] is the (start, stop) range of the digit columns that
    replace the g-th original second-stage column (block-major order).
    """

    ilp: TwoStageILP
    digit_count: int
    group_map: Tuple[Tuple[int, int], ...]
    source: TwoStageILP = field(compare=False, repr=False)


def reduce_mrd_to_ilp(instance: MRDResult) -> TwoStageILP:
    """One block per residue equation

    Block i reads -z + q_i*lambda_i + sum_k root_k*sel_k = 0 and
    sum_k sel_k = 1, with pad columns (coefficient 0, bounds [0, 0]) up to
    the largest root set.
    """
    if isinstance(instance, NoInstance):
        raise NoInstanceInput("cannot build an ILP from NoInstance")
    rho = instance.max_roots
    t = 1 + rho
    zeta = instance.zeta

    A_blocks, B_blocks, upper = [], [], [zeta]
    for i, (q, _) in enumerate(instance.equations):
        roots = instance.sorted_roots(i)
        pad = rho - len(roots)
        A_blocks.append(((-1,), (0,)))
        B_blocks.append((
            tuple([q] + roots + [0] * pad),
            tuple([0] + [1] * len(roots) + [0] * pad),
        ))
        upper.extend([zeta] + [1] * len(roots) + [0] * pad)

    n = len(instance.equations)
    columns = 1 + n * t
    ilp = TwoStageILP(
        n=n,
        r=2,
        s=1,
        t=t,
        A_blocks=tuple(A_blocks),
        B_blocks=tuple(B_blocks),
        b=(0, 1) * n,
        L=(0,) * columns,
        U=tuple(upper),
        w=(0,) * columns,
    )
    logger.info(f"MRD->ILP: n={n}, r=2, s=1, t={t}, delta={ilp.delta}")
    return ilp


def ilp_from_witness(instance: MRDInstance, z: int, choice: Sequence[int]) -> Solution:
    """Solution with x[0] = z, multipliers (z - v_i)/q_i and one selector per block"""
    if not verify_mrd(instance, z):
        raise WitnessMismatch(f"z = {z} does not solve the MRD instance")
    if tuple(choice) != mrd_witness_from_z(instance, z):
        raise WitnessMismatch(f"choice vector {tuple(choice)} does not match z = {z}")

    rho = instance.max_roots
    x = [z]
    for i, (q, _) in enumerate(instance.equations):
        roots = instance.sorted_roots(i)
        selectors = [0] * rho
        selectors[roots.index(choice[i])] = 1
        x.append((z - choice[i]) // q)
        x.extend(selectors)
    return Solution(tuple(x))


def verify_solution(ilp: TwoStageILP, solution: Union[Solution, Sequence[int]]) -> bool:
    """Exact check of every block equation and every bound"""
    x = solution.x if isinstance(solution, Solution) else tuple(solution)
    if len(x) != ilp.num_columns:
        raise DimensionMismatch(f"solution has {len(x)} entries, instance has {ilp.num_columns} columns")
    if any(v < lo or v > hi for v, lo, hi in zip(x, ilp.L, ilp.U)):
        return False
    first = list(x[:ilp.s])
    for i in range(ilp.n):
        vector = np.array(first + [x[j] for j in ilp.block_columns(i)], dtype=object)
        if tuple(ilp.block_rows(i).dot(vector)) != ilp.block_rhs(i):
            return False
    return True


def _feasible_first_stage(tag: ReductionTag, z: np.ndarray, bound: int) -> np.ndarray:
    mask = np.ones(z.shape, dtype=bool)
    for q, roots in zip(tag.moduli, tag.roots):
        block = np.zeros(z.shape, dtype=bool)
        for v in roots:
            shifted = z - v
            block |= (shifted >= 0) & (shifted % q == 0) & (shifted // q <= bound)
        mask &= block
    return mask


def _block_hit(tag: ReductionTag, z: int) -> bool:
    return all(
        any(z >= v and (z - v) % q == 0 and (z - v) // q <= tag.zeta for v in roots)
        for q, roots in zip(tag.moduli, tag.roots)
    )


def _reduced_solution(tag: ReductionTag, z: int) -> Solution:
    x = [z]
    for q, roots in zip(tag.moduli, tag.roots):
        selectors = [0] * tag.rho
        for k, v in enumerate(roots):
            if z >= v and (z - v) % q == 0 and (z - v) // q <= tag.zeta:
                selectors[k] = 1
                x.append((z - v) // q)
                break
        x.extend(selectors)
    return Solution(tuple(x))


def solve_reduced(
    ilp: TwoStageILP,
    tag: Optional[ReductionTag] = None,
    limit: int = SCAN_LIMIT,
    chunk: int = 10 ** 6,
) -> Optional[Solution]:
    """Least feasible first-stage value z >= 1 for a reduction-shaped ILP

    z is feasible when every block has a root v with z == v (mod q_i) and
    0 <= (z - v)/q_i <= zeta.
    """
    tag = tag or ReductionTag.from_ilp(ilp)
    low, top = max(ilp.L[0], 1), ilp.U[0]
    if top > limit:
        raise CapExceeded(f"first-stage range {top} exceeds the limit {limit}")

    if max(tag.moduli) >= WIDE_MODULUS:
        hit = next((z for z in range(low, top + 1) if _block_hit(tag, z)), None)
    else:
        hit = None
        # (z - v) // q <= z <= top
        bound = min(tag.zeta, top)
        for lo in range(low, top + 1, chunk):
            z = np.arange(lo, min(lo + chunk, top + 1), dtype=np.int64)
            hits = np.flatnonzero(_feasible_first_stage(tag, z, bound))
            if hits.size:
                hit = int(z[hits[0]])
                break
    if hit is None:
        return None

    solution = _reduced_solution(tag, hit)
    if not verify_solution(ilp, solution):
        raise ArithmeticError(f"reduced solution for z = {hit} does not verify")
    return solution


class _BlockSearch:
    """Lexicographic depth-first search over the columns of one block

    A column that is the last non-zero entry of some row is computed from
    that row instead of branched on. Partial sums are pruned against the
    exact range the remaining columns can still contribute.
    """

    def __init__(self, ilp: TwoStageILP, i: int):
        self.rows = [list(row) for row in ilp.B_blocks[i]]
        self.first = [list(row) for row in ilp.A_blocks[i]]
        self.rhs = ilp.block_rhs(i)
        columns = ilp.block_columns(i)
        self.lower = [ilp.L[j] for j in columns]
        self.upper = [ilp.U[j] for j in columns]
        t = ilp.t

        self.fixed_by: List[Optional[int]] = [None] * t
        for row_index, row in enumerate(self.rows):
            nonzero = [k for k, c in enumerate(row) if c != 0]
            if nonzero and self.fixed_by[nonzero[-1]] is None:
                self.fixed_by[nonzero[-1]] = row_index

        # reach[row][k]: (min, max) of sum_{c >= k} row[c] * x_c within bounds
        self.reach = []
        for row in self.rows:
            lows, highs = [0] * (t + 1), [0] * (t + 1)
            for k in range(t - 1, -1, -1):
                a, b = row[k] * self.lower[k], row[k] * self.upper[k]
                lows[k] = lows[k + 1] + min(a, b)
                highs[k] = highs[k + 1] + max(a, b)
            self.reach.append((lows, highs))

    @property
    def free_space(self) -> int:
        return math.prod(
            hi - lo + 1
            for lo, hi, fixed in zip(self.lower, self.upper, self.fixed_by)
            if fixed is None
        )

    def _candidates(self, k: int, partial: List[int]) -> Iterator[int]:
        row_index = self.fixed_by[k]
        if row_index is None:
            return iter(range(self.lower[k], self.upper[k] + 1))
        c = self.rows[row_index][k]
        rest = self.rhs[row_index] - partial[row_index]
        if rest % c != 0 or not self.lower[k] <= rest // c <= self.upper[k]:
            return iter(())
        return iter((rest // c,))

    def _within_reach(self, k: int, partial: List[int]) -> bool:
        for row_index, (lows, highs) in enumerate(self.reach):
            if not lows[k] <= self.rhs[row_index] - partial[row_index] <= highs[k]:
                return False
        return True

    def _search(self, k: int, partial: List[int]) -> Optional[List[int]]:
        if k == len(self.lower):
            return [] if list(self.rhs) == partial else None
        for value in self._candidates(k, partial):
            moved = [p + row[k] * value for p, row in zip(partial, self.rows)]
            if not self._within_reach(k + 1, moved):
                continue
            tail = self._search(k + 1, moved)
            if tail is not None:
                return [value] + tail
        return None

    def solve(self, first_stage: Sequence[int]) -> Optional[List[int]]:
        partial = [sum(a * v for a, v in zip(row, first_stage)) for row in self.first]
        if not self._within_reach(0, partial):
            return None
        return self._search(0, partial)


def solve_exhaustive(ilp: TwoStageILP, limit: int = EXHAUSTIVE_LIMIT) -> Optional[Solution]:
    """First feasible vector of the box in lexicographic order

    Blocks only share the first-stage columns, so for a fixed first stage
    the lexicographically least completion is found block by block.
    """
    searches = [_BlockSearch(ilp, i) for i in range(ilp.n)]
    first_ranges = [range(ilp.L[j], ilp.U[j] + 1) for j in range(ilp.s)]
    space = math.prod(len(r) for r in first_ranges) * math.prod(s.free_space for s in searches)
    if space > limit:
        raise SearchSpaceTooLarge(f"{space} free assignments exceed the limit {limit}")

    for first_stage in itertools.product(*first_ranges):
        x = list(first_stage)
        for search in searches:
            block = search.solve(first_stage)
            if block is None:
                break
            x.extend(block)
        else:
            return Solution(tuple(x))
    return None


def _digits(c: int, digit_count: int) -> List[int]:
    if c == -1:
        return [-1] + [0] * (digit_count - 1)
    return [(c >> k) & 1 for k in range(digit_count)]


def encode_binary(ilp: TwoStageILP) -> EncodedILP:
    """Replace every second-stage column by D digit columns u_k = v * 2^k

    Each coefficient c becomes its binary digits over the group, and chain
    rows 2 u_k - u_{k+1} = 0 keep the digits of a group consistent. After
    encoding no entry exceeds 2 in absolute value.
    """
    for i, (a, bb) in enumerate(zip(ilp.A_blocks, ilp.B_blocks)):
        for row in a:
            if any(abs(c) > 1 for c in row):
                raise NegativeCoefficient(f"block {i + 1}: first-stage entries must lie in {{-1, 0, 1}}")
        for row in bb:
            if any(c < -1 for c in row):
                raise NegativeCoefficient(f"block {i + 1}: second-stage entry below -1")

    delta = max((c for m in ilp.B_blocks for row in m for c in row), default=0)
    D = delta.bit_length() if delta > 1 else 1
    t = ilp.t

    chain_rows = []
    for j in range(t):
        for k in range(D - 1):
            row = [0] * (t * D)
            row[j * D + k] = 2
            row[j * D + k + 1] = -1
            chain_rows.append(tuple(row))

    A_blocks, B_blocks, rhs = [], [], []
    for i in range(ilp.n):
        digit_rows = [tuple(d for c in row for d in _digits(c, D)) for row in ilp.B_blocks[i]]
        A_blocks.append(ilp.A_blocks[i] + ((0,) * ilp.s,) * len(chain_rows))
        B_blocks.append(tuple(digit_rows) + tuple(chain_rows))
        rhs.extend(ilp.block_rhs(i))
        rhs.extend([0] * len(chain_rows))

    lower, upper, weights = list(ilp.L[:ilp.s]), list(ilp.U[:ilp.s]), list(ilp.w[:ilp.s])
    groups = []
    for j in range(ilp.s, ilp.num_columns):
        start = len(lower)
        for k in range(D):
            lower.append(ilp.L[j] << k)
            upper.append(ilp.U[j] << k)
            weights.append(ilp.w[j] if k == 0 else 0)
        groups.append((start, start + D))

    encoded = TwoStageILP(
        n=ilp.n,
        r=ilp.r + t * (D - 1),
        s=ilp.s,
        t=t * D,
        A_blocks=tuple(A_blocks),
        B_blocks=tuple(B_blocks),
        b=tuple(rhs),
        L=tuple(lower),
        U=tuple(upper),
        w=tuple(weights),
    )
    logger.info(f"encode: delta {ilp.delta} -> {encoded.delta}, D={D}, r'={encoded.r}, t'={encoded.t}")
    return EncodedILP(encoded, D, tuple(groups), source=ilp)


def encode_solution(enc: EncodedILP, solution: Solution) -> Solution:
    """Digits (v, 2v, 4v, ...) for every second-stage value v"""
    source = enc.source
    if len(solution) != source.num_columns:
        raise DimensionMismatch("solution does not match the source instance")
    x = list(solution.x[:source.s])
    for v in solution.x[source.s:]:
        x.extend(v << k for k in range(enc.digit_count))
    return Solution(tuple(x))


def decode_solution(enc: EncodedILP, solution: Solution) -> Solution:
    """Keep u_0 of every digit group and the first-stage values"""
    if len(solution) != enc.ilp.num_columns:
        raise DimensionMismatch("solution does not match the encoded instance")
    x = list(solution.x[:enc.ilp.s])
    for start, stop in enc.group_map:
        digits = solution.x[start:stop]
        for k in range(len(digits) - 1):
            if digits[k + 1] != 2 * digits[k]:
                raise ChainViolation(f"digits {digits} at columns {start}..{stop - 1} do not double")
        x.append(digits[0])
    return Solution(tuple(x))


def ilp_parameters(ilp: TwoStageILP) -> Dict[str, int]:
    """Size parameters of an instance"""
    return {
        "n": ilp.n,
        "r": ilp.r,
        "s": ilp.s,
        "t": ilp.t,
        "delta": ilp.delta,
        "columns": ilp.num_columns,
        "rows": ilp.n * ilp.r,
        "b_inf": max(abs(v) for v in ilp.b),
        "L_inf": max(abs(v) for v in ilp.L),
        "U_inf": max(abs(v) for v in ilp.U),
    }


def _join(values: Sequence[int]) -> str:
    return " ".join(str(v) for v in values)


def write_2ssilp(ilp: TwoStageILP) -> str:
    """Serialize to the newline-terminated .2ssilp text format"""
    lines = [FORMAT_HEADER, _join((ilp.n, ilp.r, ilp.s, ilp.t))]
    for a, bb in zip(ilp.A_blocks, ilp.B_blocks):
        lines.extend(_join(ra + rb) for ra, rb in zip(a, bb))
    for name in ("b", "L", "U", "w"):
        lines.append(f"{name}: {_join(getattr(ilp, name))}")
    return "\n".join(lines) + "\n"


def _ints(tokens: Sequence[str], line_no: int) -> List[int]:
    try:
        return [int(tok) for tok in tokens]
    except ValueError as e:
        raise MalformedILPFile(f"line {line_no}: {e}") from e


def read_2ssilp(text: str) -> TwoStageILP:
    """Parse the .2ssilp text format

    Raises:
        MalformedILPFile: wrong header, counts or shapes.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise MalformedILPFile(f"first line must be {FORMAT_HEADER!r}")
    if len(lines) < 2:
        raise MalformedILPFile("missing dimension line")
    dims = _ints(lines[1].split(), 2)
    if len(dims) != 4:
        raise MalformedILPFile("line 2: expected 'n r s t'")
    n, r, s, t = dims
    if min(dims) < 1:
        raise MalformedILPFile("line 2: dimensions must be positive")

    expected = 2 + n * r + 4
    body = [line for line in lines if line.strip()]
    if len(body) != expected:
        raise MalformedILPFile(f"expected {expected} non-empty lines, found {len(body)}")

    A_blocks, B_blocks = [], []
    for i in range(n):
        rows = []
        for k in range(r):
            line_no = 3 + i * r + k
            row = _ints(body[line_no - 1].split(), line_no)
            if len(row) != s + t:
                raise MalformedILPFile(f"line {line_no}: expected {s + t} entries")
            rows.append(row)
        A_blocks.append(_matrix(row[:s] for row in rows))
        B_blocks.append(_matrix(row[s:] for row in rows))

    vectors = {}
    for offset, name in enumerate(("b", "L", "U", "w")):
        line_no = 3 + n * r + offset
        prefix, _, rest = body[line_no - 1].partition(":")
        if prefix.strip() != name:
            raise MalformedILPFile(f"line {line_no}: expected '{name}:'")
        vectors[name] = tuple(_ints(rest.split(), line_no))

    try:
        return TwoStageILP(
            n=n, r=r, s=s, t=t,
            A_blocks=tuple(A_blocks),
            B_blocks=tuple(B_blocks),
            **vectors,
        )
    except (DimensionMismatch, InvalidBounds) as e:
        raise MalformedILPFile(str(e)) from e
