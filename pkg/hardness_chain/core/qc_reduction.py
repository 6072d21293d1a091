"""
3-SAT -> Quadratic Congruences

Turns a simplified 3-CNF formula into an instance (alpha, beta, gamma) of
the Quadratic Congruences problem whose modulus beta has a known
factorization: 2 with exponent 4, every odd prime once. The full set of
intermediate values is kept in a SatLinearSystem so that witnesses can be
propagated and the construction audited afterwards.

Two coefficient modes exist. "derived" expands the clause equation
symbolically and is always integral; "paper" evaluates the printed
coefficient formulas literally and refuses non-integral results.
"""

import itertools
import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    AssignmentDoesNotSatisfy,
    AuditViolation,
    CapExceeded,
    EmptyFormula,
    PaperModeNonIntegral,
    TooFewClauses,
    TooManySigns,
)
from .numtheory import (
    Factorization,
    crt,
    integer_root_ceil,
    mod_inverse,
    next_prime,
    nth_primes,
    primes_above,
    primorial,
)
from .sat import Assignment, Formula, eval_formula

logger = logging.getLogger(__name__)

COEFF_MODES = ("derived", "paper")

# Constant the running-time argument gives for the grid threshold
CLAIMED_GRID_THRESHOLD = 32

BRUTE_LIMIT = 10 ** 7
MAX_SIGN_BITS = 20


@dataclass(frozen=True)
class PrimeLayout:
    """Every prime the construction needs for given m' and n"""

    m_prime: int
    n: int
    clause_primes: Tuple[int, ...]
    threshold_bound: int
    grid_threshold: int
    grid_primes: Tuple[Tuple[int, ...], ...]
    p_star: int
    p_star_rank: int
    p_star_rank_prime: int

    @property
    def p_star_shifted(self) -> bool:
        return self.p_star != self.p_star_rank_prime

    @property
    def flat_grid(self) -> List[int]:
        return [p for row in self.grid_primes for p in row]


@lru_cache(maxsize=64)
def layout_primes(m_prime: int, n: int) -> PrimeLayout:
    """Clause primes, grid primes and p* for a formula with m' clauses

    p* is the (n^2 + 2n + 2m' + 13)th prime when that prime exceeds every
    grid prime. Otherwise the least prime above the grid is taken instead,
    so that p* never collides with a grid prime.
    """
    clause_primes = tuple(nth_primes(2 * m_prime + 1))
    size = (n + 1) ** 2
    bound = 4 * (n + 1) * 8 * primorial(size)
    flat = primes_above(size, size, bound, clause_primes[-1])
    grid = tuple(tuple(flat[i * (n + 1):(i + 1) * (n + 1)]) for i in range(n + 1))

    rank = n * n + 2 * n + 2 * m_prime + 13
    rank_prime = nth_primes(rank)[-1]
    p_star = rank_prime
    if p_star <= flat[-1]:
        p_star = next_prime(flat[-1])
        logger.warning(
            f"the {rank}th prime ({rank_prime}) does not exceed the largest grid "
            f"prime {flat[-1]}; using p* = {p_star}"
        )
    return PrimeLayout(
        m_prime=m_prime,
        n=n,
        clause_primes=clause_primes,
        threshold_bound=bound,
        grid_threshold=integer_root_ceil(bound, size),
        grid_primes=grid,
        p_star=p_star,
        p_star_rank=rank,
        p_star_rank_prime=rank_prime,
    )


@dataclass(frozen=True)
class LinearForm:
    """sum_j coeffs[j] * alpha_j == tau (mod M1), alpha_j in {-1, +1}"""

    coeffs: Tuple[int, ...]
    tau: int
    M1: int
    clause_primes: Tuple[int, ...]


@dataclass(frozen=True)
class PaperCoefficients:
    """The printed coefficient formulas evaluated exactly"""

    coeffs: Tuple[Fraction, ...]
    tau: Fraction
    tau_phi: int
    f_plus: Tuple[int, ...]
    f_minus: Tuple[int, ...]

    @property
    def non_integral(self) -> List[int]:
        return [j for j, c in enumerate(self.coeffs) if c.denominator != 1]


@dataclass(frozen=True)
class SatLinearSystem:
    """All intermediate data of the SAT -> QC construction"""

    formula: Formula
    m_prime: int
    ell_prime: int
    n: int
    clause_primes: Tuple[int, ...]
    grid_primes: Tuple[Tuple[int, ...], ...]
    p_star: int
    M1: int
    coeffs: Tuple[int, ...]
    tau: int
    thetas: Tuple[int, ...]
    H: int
    K: int
    mode: str = "derived"
    p_star_rank: int = 0
    grid_threshold: int = 0

    @property
    def clause_product(self) -> int:
        """prod_{i=1..m'} p_i"""
        return math.prod(self.clause_primes[1:self.m_prime + 1])

    @property
    def first_modulus(self) -> int:
        """2^4 * p* * prod_{i=1..m'} p_i"""
        return 16 * self.p_star * self.clause_product

    @property
    def flat_grid(self) -> List[int]:
        return [p for row in self.grid_primes for p in row]

    def row_product(self, j: int) -> int:
        return math.prod(self.grid_primes[j])

    def complement_product(self, j: int) -> int:
        """Product of all grid primes outside row j"""
        return self.K // self.row_product(j)


@dataclass(frozen=True)
class QCInstance:
    """Find 0 < z <= gamma with z^2 == alpha (mod beta)"""

    alpha: int
    beta: int
    gamma: int
    beta_factorization: Factorization

    def __post_init__(self):
        if not 0 <= self.alpha < self.beta:
            raise ValueError("alpha must lie in [0, beta)")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.beta_factorization.value() != self.beta:
            raise ValueError("factorization does not multiply to beta")


def _prefix_products(primes: Sequence[int], count: int) -> List[int]:
    """[p_0, p_0 p_1, ..., p_0 ... p_count]"""
    return list(itertools.accumulate(primes[:count + 1], lambda a, b: a * b))


def paper_coefficients(formula: Formula) -> PaperCoefficients:
    """Evaluate c_j, tau_phi', f_i^+/- and tau exactly as printed"""
    m = formula.num_clauses
    if m == 0:
        raise EmptyFormula("formula has no clauses")
    ell = formula.num_vars
    primes = nth_primes(2 * m + 1)
    # prod_{i=1..j} p_i for j = 0..2m
    tail = [1] + list(itertools.accumulate(primes[1:], lambda a, b: a * b))

    tau_phi = -sum(tail[i] for i in range(1, m + 1))
    f_plus = [0] * (ell + 1)
    f_minus = [0] * (ell + 1)
    for k, clause in enumerate(formula.clauses, start=1):
        for lit in clause:
            if lit > 0:
                f_plus[lit] += tail[k]
            else:
                f_minus[-lit] += tail[k]

    coeffs: List[Fraction] = [Fraction(0)]
    for j in range(1, 2 * m + 1):
        coeffs.append(Fraction(-tail[j], 2) if j % 2 else Fraction(-tail[j]))
    for i in range(1, ell + 1):
        coeffs.append(Fraction(f_plus[i] - f_minus[i], 2))
    tau = tau_phi + sum(coeffs) + sum(f_minus[1:])
    return PaperCoefficients(
        coeffs=tuple(coeffs),
        tau=Fraction(tau),
        tau_phi=tau_phi,
        f_plus=tuple(f_plus[1:]),
        f_minus=tuple(f_minus[1:]),
    )


def _derived_coefficients(formula: Formula, clause_primes: Sequence[int]) -> Tuple[List[int], int]:
    """Collect coefficients of sum_k R_k * prod_{i=0..k} p_i after substitution

    With h_k = prod_{i=1..k} p_i, clause k contributes
        h_k (5 - s_k) - h_k alpha_{2k-1} - 2 h_k alpha_{2k}
        + sum_{x_i in clause} h_k a_i - sum_{~x_i in clause} h_k a_i
    where a_i = alpha_{2m'+i}; R_0 = alpha_0 + 1 contributes 2 alpha_0 + 2.
    """
    m = formula.num_clauses
    n = 2 * m + formula.num_vars
    h = _prefix_products(clause_primes, m)
    coeffs = [0] * (n + 1)
    coeffs[0] = 2
    constant = 2
    for k, clause in enumerate(formula.clauses, start=1):
        h_k = h[k] // 2
        constant += h_k * (5 - len(clause))
        coeffs[2 * k - 1] = -h_k
        coeffs[2 * k] = -2 * h_k
        for lit in clause:
            coeffs[2 * m + abs(lit)] += h_k if lit > 0 else -h_k
    return coeffs, -constant


def derive_linear_form(formula: Formula, mode: str = "derived") -> LinearForm:
    """Linear form over sign variables equivalent to the formula

    Raises:
        EmptyFormula: the formula has no clauses.
        PaperModeNonIntegral: paper mode produced a fractional coefficient.
    """
    if mode not in COEFF_MODES:
        raise ValueError(f"unknown coefficient mode {mode!r}")
    m = formula.num_clauses
    if m == 0:
        raise EmptyFormula("formula has no clauses")
    n = 2 * m + formula.num_vars
    layout = layout_primes(m, n)
    clause_primes = layout.clause_primes
    M1 = 8 * layout.p_star * math.prod(clause_primes[1:m + 1])

    if mode == "paper":
        paper = paper_coefficients(formula)
        offending = paper.non_integral
        if offending or paper.tau.denominator != 1:
            raise PaperModeNonIntegral(list(paper.coeffs), paper.tau, offending)
        coeffs = [int(c) for c in paper.coeffs]
        tau = int(paper.tau)
    else:
        coeffs, tau = _derived_coefficients(formula, clause_primes)

    return LinearForm(tuple(coeffs), tau, M1, clause_primes)


def build_theta(
    coeffs: Sequence[int], M1: int, grid_primes: Sequence[Sequence[int]], j: int
) -> int:
    """Least positive theta_j for the three defining congruences

    theta == C_j (mod M1), theta == 0 (mod product of grid rows != j) and
    theta != 0 (mod p_{j,1}). If the CRT value fails the last condition (or
    is zero) one period is added, which always repairs it.
    """
    complement = math.prod(
        p for i, row in enumerate(grid_primes) if i != j for p in row
    )
    theta, period = crt([(coeffs[j] % M1, M1), (0, complement)])
    guard = grid_primes[j][1]
    if theta == 0 or theta % guard == 0:
        theta += period
    return theta


def reduce_sat_to_qc(formula: Formula, mode: str = "derived") -> Tuple[QCInstance, SatLinearSystem]:
    """Build the QC instance and the full linear system for a simplified formula

    Raises:
        TooFewClauses: fewer than two clauses.
    """
    m = formula.num_clauses
    if m < 2:
        raise TooFewClauses(m)
    ell = formula.num_vars
    n = 2 * m + ell
    form = derive_linear_form(formula, mode)
    layout = layout_primes(m, n)

    thetas = tuple(
        build_theta(form.coeffs, form.M1, layout.grid_primes, j) for j in range(n + 1)
    )
    H = sum(thetas)
    K = math.prod(layout.flat_grid)

    system = SatLinearSystem(
        formula=formula,
        m_prime=m,
        ell_prime=ell,
        n=n,
        clause_primes=layout.clause_primes,
        grid_primes=layout.grid_primes,
        p_star=layout.p_star,
        M1=form.M1,
        coeffs=form.coeffs,
        tau=form.tau,
        thetas=thetas,
        H=H,
        K=K,
        mode=mode,
        p_star_rank=layout.p_star_rank,
        grid_threshold=layout.grid_threshold,
    )

    first = system.first_modulus
    beta = first * K
    alpha = mod_inverse(first + K, beta) * (K * form.tau ** 2 + first * H ** 2) % beta

    factors = {2: 4, layout.p_star: 1}
    factors.update({p: 1 for p in layout.clause_primes[1:m + 1]})
    factors.update({p: 1 for p in layout.flat_grid})
    instance = QCInstance(alpha, beta, H, Factorization.from_mapping(factors))

    logger.info(
        f"SAT->QC: m'={m}, l'={ell}, n={n}, {len(factors)} primes, "
        f"beta has {beta.bit_length()} bits"
    )
    return instance, system


def decode_clause_signs(y: int) -> Tuple[int, int]:
    """Signs (alpha_{2k-1}, alpha_{2k}) with y = ((1 - a) + 2 (1 - b)) / 2"""
    if not 0 <= y <= 3:
        raise ValueError(f"slack value {y} outside [0, 3]")
    return (1 if y % 2 == 0 else -1, 1 if y < 2 else -1)


def qc_witness(system: SatLinearSystem, assignment: Assignment) -> Tuple[int, Tuple[int, ...]]:
    """QC solution z = |sum_j theta_j alpha_j| for a satisfying assignment"""
    satisfied, counts = eval_formula(system.formula, assignment)
    if not satisfied:
        raise AssignmentDoesNotSatisfy("assignment leaves a clause unsatisfied")

    signs = [-1]
    for count in counts:
        signs.extend(decode_clause_signs(count - 1))
    signs.extend(1 - 2 * int(value) for value in assignment.values)

    x = sum(theta * sign for theta, sign in zip(system.thetas, signs))
    return abs(x), tuple(signs)


def sign_vector_feasible(system: SatLinearSystem, max_bits: int = MAX_SIGN_BITS) -> Optional[Tuple[int, ...]]:
    """First sign vector (-1 before +1) with sum theta_j alpha_j == tau (mod M1)"""
    width = system.n + 1
    if width > max_bits:
        raise TooManySigns(f"{width} sign variables exceed the scan limit {max_bits}")
    M1 = system.M1
    residues = [theta % M1 for theta in system.thetas]
    target = system.tau % M1
    for signs in itertools.product((-1, 1), repeat=width):
        if sum(r * s for r, s in zip(residues, signs)) % M1 == target:
            return signs
    return None


def verify_qc(instance: QCInstance, z: int) -> bool:
    return 0 < z <= instance.gamma and (z * z - instance.alpha) % instance.beta == 0


def solve_qc_brute(
    instance: QCInstance, cap: int, limit: int = BRUTE_LIMIT, chunk: int = 10 ** 6
) -> Optional[int]:
    """Least z in [1, min(gamma, cap)] with z^2 == alpha (mod beta)"""
    top = min(instance.gamma, cap)
    if top > limit:
        raise CapExceeded(f"scan range {top} exceeds the limit {limit}")
    alpha, beta = instance.alpha, instance.beta

    if beta < (1 << 62) and top < (1 << 31):
        for lo in range(1, top + 1, chunk):
            z = np.arange(lo, min(lo + chunk, top + 1), dtype=np.int64)
            hits = np.flatnonzero((z * z) % beta == alpha)
            if hits.size:
                return int(z[hits[0]])
        return None

    for z in range(1, top + 1):
        if z * z % beta == alpha:
            return z
    return None


@dataclass(frozen=True)
class UniquenessReport:
    """Outcome of the uniqueness check for (H + x)(H - x) == 0 (mod K), |x| <= H"""

    values: int
    distinct: bool
    all_congruent: bool
    all_bounded: bool
    probes: int
    probe_violations: int

    @property
    def holds(self) -> bool:
        return self.distinct and self.all_congruent and self.all_bounded and self.probe_violations == 0


def check_uniqueness(
    system: SatLinearSystem, samples: int = 1000, seed: int = 0, max_bits: int = MAX_SIGN_BITS
) -> UniquenessReport:
    """Check that the signed theta sums are exactly the solutions of the system

    Every signed sum must be distinct, bounded by H and satisfy the
    congruence; `samples` random x in [-H, H] outside that set must not.
    """
    width = system.n + 1
    if width > max_bits:
        raise TooManySigns(f"{width} sign variables exceed the scan limit {max_bits}")
    H, K = system.H, system.K
    values = [
        sum(theta * sign for theta, sign in zip(system.thetas, signs))
        for signs in itertools.product((-1, 1), repeat=width)
    ]
    value_set = set(values)

    rng = random.Random(seed)
    violations = 0
    probes = 0
    while probes < samples:
        x = rng.randint(-H, H)
        if x in value_set:
            continue
        probes += 1
        if (H + x) * (H - x) % K == 0:
            violations += 1

    report = UniquenessReport(
        values=len(values),
        distinct=len(value_set) == len(values),
        all_congruent=all((H + x) * (H - x) % K == 0 for x in values),
        all_bounded=all(abs(x) <= H for x in values),
        probes=probes,
        probe_violations=violations,
    )
    logger.debug(f"uniqueness check: {report}")
    return report


@dataclass
class AuditReport:
    """Structural checks (name -> pass) and computed size values"""

    checks: Dict[str, bool] = field(default_factory=dict)
    values: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]


def _theta_conditions_hold(system: SatLinearSystem) -> bool:
    for j, theta in enumerate(system.thetas):
        if theta <= 0:
            return False
        if (theta - system.coeffs[j]) % system.M1 != 0:
            return False
        if theta % system.complement_product(j) != 0:
            return False
        if theta % system.grid_primes[j][1] == 0:
            return False
    return True


def clause_sum_bound(system: SatLinearSystem) -> int:
    """Largest |sum_k R_k prod_{i=0..k} p_i| over all variable values"""
    products = _prefix_products(system.clause_primes, system.m_prime)
    # R_0 in {0, 2}; R_k in [1 - s_k, 4] and s_k <= 3
    return 2 * products[0] + 4 * sum(products[1:])


def audit(instance: QCInstance, system: SatLinearSystem, strict: bool = True) -> AuditReport:
    """Check the structural and size claims of the construction

    Raises:
        AuditViolation: some check failed and `strict` is set.
    """
    n, m, ell = system.n, system.m_prime, system.ell_prime
    factorization = instance.beta_factorization
    grid = system.flat_grid
    first = system.first_modulus
    exponent = (n + 1) ** 2
    odd = [e for p, e in factorization.factors if p != 2]

    report = AuditReport()
    checks = report.checks
    checks["prime_count"] = len(factorization.factors) == exponent + m + 2
    checks["exponent_pattern"] = factorization.exponent_of(2) == 4 and all(e == 1 for e in odd)
    checks["factorization_value"] = factorization.value() == instance.beta
    checks["two_h_below_k"] = 2 * system.H < system.K
    checks["inverse_coprime"] = math.gcd(first + system.K, instance.beta) == 1
    checks["moduli_coprime"] = math.gcd(first, system.K) == 1
    checks["p_star_above_grid"] = system.p_star > max(grid)
    checks["grid_above_clause_primes"] = min(grid) > system.clause_primes[-1]
    checks["grid_threshold"] = min(grid) ** exponent > 4 * (n + 1) * 8 * primorial(exponent)
    checks["grid_distinct"] = len(set(grid)) == len(grid)
    checks["range_bound"] = clause_sum_bound(system) < system.M1
    checks["linear_form_range"] = sum(abs(c) for c in system.coeffs) + abs(system.tau) < system.M1
    checks["theta_conditions"] = _theta_conditions_hold(system)
    checks["gamma_is_h"] = instance.gamma == system.H

    size = ell + m
    max_prime = max(factorization.primes)
    values = report.values
    values.update({
        "n": n,
        "m_prime": m,
        "ell_prime": ell,
        "size_parameter": size,
        "num_primes": len(factorization.factors),
        "expected_num_primes": exponent + m + 2,
        "alpha_bits": instance.alpha.bit_length(),
        "beta_bits": instance.beta.bit_length(),
        "gamma_bits": instance.gamma.bit_length(),
        "H_bits": system.H.bit_length(),
        "K_bits": system.K.bit_length(),
        "theta_max_bits": max(system.thetas).bit_length(),
        "max_prime": max_prime,
        "p_star": system.p_star,
        "p_star_rank": system.p_star_rank,
        "p_star_rank_prime": nth_primes(system.p_star_rank)[-1] if system.p_star_rank else None,
        "grid_threshold": system.grid_threshold,
        "claimed_grid_threshold": CLAIMED_GRID_THRESHOLD,
        "grid_threshold_within_claim": system.grid_threshold <= CLAIMED_GRID_THRESHOLD,
        "primes_per_size_squared": round(len(factorization.factors) / size ** 2, 6),
        "beta_bits_per_size_squared": round(instance.beta.bit_length() / size ** 2, 6),
        "max_prime_per_size_bound": round(max_prime / (size ** 2 * math.log(size)), 6),
    })
    values["p_star_shifted"] = values["p_star_rank_prime"] != system.p_star

    if report.failed:
        logger.warning(f"audit failed checks: {report.failed}")
        if strict:
            raise AuditViolation(report.failed, values)
    return report
