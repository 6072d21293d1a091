"""
Quadratic Congruences -> Multiple-Residue

Each prime power q_i of beta turns into one equation "z mod q_i is one of
the square roots of alpha mod q_i". In pair mode only the roots +-x_i are
kept; full mode keeps every root, which matters modulo 16 where an odd
square has four roots.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    CapExceeded,
    InvalidArgument,
    InvalidMRDInstance,
    ResidueNotCovered,
    SearchSpaceTooLarge,
    UnsupportedExponent,
)
from .numtheory import mod_inverse, pairwise_coprime, sqrt_mod_odd_prime, sqrt_mod_two_pow
from .qc_reduction import QCInstance

logger = logging.getLogger(__name__)

RESIDUE_MODES = ("pair", "full")
MAX_TWO_EXPONENT = 4
SEARCH_LIMIT = 1 << 24
SCAN_LIMIT = 10 ** 7
# moduli from here on no longer fit the int64 scan
WIDE_MODULUS = 1 << 62

Equation = Tuple[int, FrozenSet[int]]


class NoInstance:
    """Canonical unsatisfiable marker returned instead of an MRD instance"""

    _singleton = None

    def __new__(cls):
        if cls._singleton is None:
            cls._singleton = super().__new__(cls)
        return cls._singleton

    def __repr__(self) -> str:
        return "NoInstance"


NO_INSTANCE = NoInstance()


@dataclass(frozen=True)
class MRDInstance:
    """Find 1 <= z <= zeta with z mod q_i in roots_i for every equation"""

    equations: Tuple[Equation, ...]
    zeta: int
    mode: str = "full"

    def __post_init__(self):
        if self.mode not in RESIDUE_MODES:
            raise InvalidMRDInstance(f"unknown residue mode {self.mode!r}")
        if not self.equations:
            raise InvalidMRDInstance("instance needs at least one equation")
        if self.zeta < 1:
            raise InvalidMRDInstance("zeta must be positive")
        for q, roots in self.equations:
            if q < 2:
                raise InvalidMRDInstance(f"modulus {q} must be >= 2")
            if not roots:
                raise InvalidMRDInstance(f"modulus {q} has an empty root set")
            if any(not 0 <= r < q for r in roots):
                raise InvalidMRDInstance(f"roots {sorted(roots)} outside [0, {q})")
            if self.mode == "pair" and len(roots) > 2:
                raise InvalidMRDInstance(f"pair mode allows two roots, modulus {q} has {len(roots)}")
        if not pairwise_coprime(self.moduli):
            raise InvalidMRDInstance("moduli must be pairwise coprime")

    @classmethod
    def from_pairs(cls, equations: Sequence[Tuple[int, Sequence[int]]], zeta: int, mode: str = "full") -> "MRDInstance":
        return cls(tuple((int(q), frozenset(int(r) for r in roots)) for q, roots in equations), zeta, mode)

    @property
    def moduli(self) -> List[int]:
        return [q for q, _ in self.equations]

    @property
    def modulus_product(self) -> int:
        return math.prod(self.moduli)

    @property
    def max_roots(self) -> int:
        return max(len(roots) for _, roots in self.equations)

    def sorted_roots(self, index: int) -> List[int]:
        return sorted(self.equations[index][1])


MRDResult = Union[MRDInstance, NoInstance]


def _roots_mod_prime_power(alpha: int, prime: int, exponent: int) -> FrozenSet[int]:
    q = prime ** exponent
    if prime == 2:
        if exponent > MAX_TWO_EXPONENT:
            raise UnsupportedExponent(f"2^{exponent} exceeds 2^{MAX_TWO_EXPONENT}")
        return sqrt_mod_two_pow(alpha % q, exponent)
    if exponent != 1:
        raise UnsupportedExponent(f"odd prime {prime} has exponent {exponent}")
    return sqrt_mod_odd_prime(alpha % q, prime)


def _pair(roots: FrozenSet[int], q: int) -> FrozenSet[int]:
    x = min(roots)
    return frozenset({x, (q - x) % q})


def residue_sets(qc: QCInstance, mode: str = "full") -> List[Tuple[int, FrozenSet[int]]]:
    """Root set of alpha modulo each prime power of beta (possibly empty)"""
    if mode not in RESIDUE_MODES:
        raise InvalidArgument(f"unknown residue mode {mode!r}")
    equations = []
    for prime, exponent in qc.beta_factorization.factors:
        q = prime ** exponent
        roots = _roots_mod_prime_power(qc.alpha, prime, exponent)
        if roots and mode == "pair":
            roots = _pair(roots, q)
        equations.append((q, roots))
    return equations


def reduce_qc_to_mrd(qc: QCInstance, mode: str = "full") -> MRDResult:
    """One residue equation per prime power of beta, zeta = gamma

    Returns NO_INSTANCE when alpha is a non-residue modulo some prime power
    or gamma leaves no positive candidate.
    """
    equations = residue_sets(qc, mode)
    for q, roots in equations:
        if not roots:
            logger.info(f"alpha is a non-residue modulo {q}; emitting NoInstance")
            return NO_INSTANCE
    if qc.gamma < 1:
        logger.info("gamma < 1 admits no positive z; emitting NoInstance")
        return NO_INSTANCE

    instance = MRDInstance(tuple(equations), qc.gamma, mode)
    logger.info(
        f"QC->MRD ({mode}): {len(equations)} equations, "
        f"{math.prod(len(r) for _, r in equations)} choice vectors"
    )
    return instance


def _crt_basis(moduli: Sequence[int]) -> Tuple[List[int], int]:
    """e_i with e_i == 1 (mod q_i) and e_i == 0 (mod q_j), j != i"""
    product = math.prod(moduli)
    basis = []
    for q in moduli:
        cofactor = product // q
        basis.append(cofactor * mod_inverse(cofactor, q))
    return basis, product


def crt_closed_form(moduli: Sequence[int], choices: Sequence[int]) -> int:
    """sum_i v_i * s_i * prod_{j != i} q_j reduced modulo prod q_i

    s_i is the inverse of prod_{j != i} q_j modulo q_i.
    """
    if len(moduli) != len(choices):
        raise InvalidArgument("one choice per modulus is required")
    basis, product = _crt_basis(moduli)
    return sum(v * e for v, e in zip(choices, basis)) % product


def solve_mrd(
    instance: MRDResult, search_limit: int = SEARCH_LIMIT
) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """Least positive z <= zeta over all choice vectors, with its choice vector

    A CRT value of 0 is lifted to prod q_i because z must be positive.
    Distinct choice vectors must give distinct z; a collision raises
    InvalidMRDInstance.
    """
    if isinstance(instance, NoInstance):
        return None
    space = math.prod(len(roots) for _, roots in instance.equations)
    if space > search_limit:
        raise SearchSpaceTooLarge(f"{space} choice vectors exceed the limit {search_limit}")

    basis, product = _crt_basis(instance.moduli)
    options = [
        [(r, r * e) for r in instance.sorted_roots(i)] for i, e in enumerate(basis)
    ]
    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    seen = set()
    for choice in itertools.product(*options):
        z = sum(term for _, term in choice) % product or product
        if z in seen:
            raise InvalidMRDInstance(f"two choice vectors map to z = {z}")
        seen.add(z)
        if best is None or z < best[0]:
            best = (z, tuple(r for r, _ in choice))

    logger.debug(f"solve_mrd scanned {space} choice vectors, least z = {best[0]}")
    if best[0] > instance.zeta:
        return None
    return best


def solve_mrd_scan(
    instance: MRDResult, limit: int = SCAN_LIMIT, chunk: int = 10 ** 6
) -> Optional[int]:
    """Least z in [1, min(zeta, prod q_i)] meeting every equation, by scanning"""
    if isinstance(instance, NoInstance):
        return None
    top = min(instance.zeta, instance.modulus_product)
    if top > limit:
        raise CapExceeded(f"scan range {top} exceeds the limit {limit}")

    if max(instance.moduli) >= WIDE_MODULUS:
        for z in range(1, top + 1):
            if all(z % q in roots for q, roots in instance.equations):
                return z
        return None

    tables = [(q, np.array(sorted(roots), dtype=np.int64)) for q, roots in instance.equations]
    for lo in range(1, top + 1, chunk):
        z = np.arange(lo, min(lo + chunk, top + 1), dtype=np.int64)
        mask = np.ones(z.shape, dtype=bool)
        for q, roots in tables:
            mask &= np.isin(z % q, roots)
        hits = np.flatnonzero(mask)
        if hits.size:
            return int(z[hits[0]])
    return None


def mrd_witness_from_z(instance: MRDInstance, z: int) -> Tuple[int, ...]:
    """Choice vector v_i = z mod q_i, checked against the stored roots"""
    if z < 1:
        raise InvalidArgument("z must be positive")
    choice = []
    for index, (q, roots) in enumerate(instance.equations):
        residue = z % q
        if residue not in roots:
            raise ResidueNotCovered(index, q, residue)
        choice.append(residue)
    return tuple(choice)


def verify_mrd(instance: MRDResult, z: int) -> bool:
    if isinstance(instance, NoInstance):
        return False
    if not 1 <= z <= instance.zeta:
        return False
    return all(z % q in roots for q, roots in instance.equations)


def pair_mode_misses(qc: QCInstance, z: int) -> List[Tuple[int, int]]:
    """Equations whose pair-mode residues miss a QC solution z

    Returns (q, z mod q) for every miss; only moduli 2^k can appear since an
    odd prime has at most two roots.
    """
    misses = []
    for q, roots in residue_sets(qc, "pair"):
        residue = z % q
        if residue not in roots:
            misses.append((q, residue))
    if misses:
        logger.warning(f"pair mode misses z = {z} at {misses}")
    return misses
