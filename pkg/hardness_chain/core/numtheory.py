"""
Number-theoretic primitives

Prime generation, extended Euclid, modular inverse, CRT and modular square
roots. Everything works on Python integers of arbitrary size; the reduction
paths never touch fixed-width arithmetic.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from sympy import integer_nthroot, isprime, sieve

from .errors import InvalidArgument, ModuliNotCoprime, NotCoprime

logger = logging.getLogger(__name__)

_DETERMINISTIC_LIMIT = 1 << 64


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as an ordered tuple of (prime, exponent) pairs"""

    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if not self.factors:
            raise InvalidArgument("factorization must contain at least one prime")
        previous = 1
        for prime, exponent in self.factors:
            if prime <= previous:
                raise InvalidArgument("factorization primes must be strictly increasing")
            if exponent < 1:
                raise InvalidArgument(f"exponent of {prime} must be >= 1")
            if not is_prime(prime):
                raise InvalidArgument(f"{prime} is not prime")
            previous = prime

    @classmethod
    def from_mapping(cls, mapping: Dict[int, int]) -> "Factorization":
        return cls(tuple(sorted((int(p), int(e)) for p, e in mapping.items())))

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    def exponent_of(self, prime: int) -> int:
        for p, e in self.factors:
            if p == prime:
                return e
        return 0

    def prime_powers(self) -> List[int]:
        return [p ** e for p, e in self.factors]

    def value(self) -> int:
        return math.prod(self.prime_powers())


def is_prime(n: int) -> bool:
    """Deterministic primality check

    sympy's test is deterministic below 2^64; anything larger falls back to
    trial division, which only ever sees small generated primes here.
    """
    if n < 2:
        return False
    if n < _DETERMINISTIC_LIMIT:
        return bool(isprime(n))
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def next_prime(n: int) -> int:
    """Least prime strictly greater than n"""
    candidate = max(n + 1, 2)
    while not is_prime(candidate):
        candidate += 1
    return candidate


def nth_primes(count: int) -> List[int]:
    """The first `count` primes in increasing order"""
    if count < 1:
        raise InvalidArgument("count must be >= 1")
    sieve.extend_to_no(count)
    return [int(p) for p in sieve[1:count + 1]]


def primorial(k: int) -> int:
    """Product of the first k primes (1 for k = 0)"""
    if k == 0:
        return 1
    return math.prod(nth_primes(k))


def integer_root_ceil(bound: int, exponent: int) -> int:
    """Least integer p >= 0 with p**exponent > bound"""
    if exponent < 1:
        raise InvalidArgument("exponent must be >= 1")
    if bound < 0:
        return 0
    root, _ = integer_nthroot(bound, exponent)
    root = int(root)
    # root**exponent <= bound < (root + 1)**exponent
    return root + 1


def primes_above(count: int, exponent: int, bound: int, floor: int) -> List[int]:
    """First `count` primes p with p > floor and p**exponent > bound

    The root threshold is evaluated by exact integer exponentiation.
    """
    if count < 1 or exponent < 1:
        raise InvalidArgument("count and exponent must be >= 1")
    start = max(floor, integer_root_ceil(bound, exponent) - 1)
    primes: List[int] = []
    candidate = start
    while len(primes) < count:
        candidate = next_prime(candidate)
        if candidate > floor and candidate ** exponent > bound:
            primes.append(candidate)
    return primes


def ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Extended Euclid: returns (g, u, v) with u*a + v*b = g = gcd(|a|, |b|)"""
    if a == 0 and b == 0:
        raise InvalidArgument("ext_gcd(0, 0) is undefined")
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m, in [1, m-1]"""
    if m < 2:
        raise InvalidArgument(f"modulus must be >= 2, got {m}")
    g, u, _ = ext_gcd(a % m, m)
    if g != 1:
        raise NotCoprime(a, m, g)
    return u % m


def crt(congruences: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    """Chinese Remainder Theorem for pairwise coprime moduli

    Args:
        congruences: (residue, modulus) pairs with 0 <= residue < modulus.

    Returns:
        (z, M) with M the product of the moduli and 0 <= z < M the unique
        common solution.

    Raises:
        ModuliNotCoprime: two moduli share a factor.
    """
    if not congruences:
        raise InvalidArgument("crt needs at least one congruence")
    for residue, modulus in congruences:
        if modulus < 2:
            raise InvalidArgument(f"modulus must be >= 2, got {modulus}")
        if not 0 <= residue < modulus:
            raise InvalidArgument(f"residue {residue} outside [0, {modulus})")
    for (_, m1), (_, m2) in itertools.combinations(congruences, 2):
        if math.gcd(m1, m2) != 1:
            raise ModuliNotCoprime(m1, m2)

    product = math.prod(modulus for _, modulus in congruences)
    result = 0
    for residue, modulus in congruences:
        cofactor = product // modulus
        _, _, s = ext_gcd(modulus, cofactor)
        result += residue * s * cofactor
    return result % product, product


def legendre_symbol(a: int, p: int) -> int:
    """Euler's criterion: 1, -1 or 0"""
    ls = pow(a, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


def _tonelli_shanks(a: int, p: int) -> int:
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)

    # p - 1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1

    z = 2
    while legendre_symbol(z, p) != -1:
        z += 1

    m = s
    c = pow(z, q, p)
    t = pow(a, q, p)
    r = pow(a, (q + 1) // 2, p)
    while t != 1:
        # least i with t^(2^i) = 1
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


def sqrt_mod_odd_prime(a: int, p: int) -> FrozenSet[int]:
    """All square roots of a modulo an odd prime p

    Returns the empty set for non-residues, {0} for a = 0 and {r, p - r}
    otherwise.
    """
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise InvalidArgument(f"{p} is not an odd prime")
    if not 0 <= a < p:
        raise InvalidArgument(f"residue {a} outside [0, {p})")
    if a == 0:
        return frozenset({0})
    if legendre_symbol(a, p) != 1:
        return frozenset()
    root = _tonelli_shanks(a, p)
    if root * root % p != a:
        raise ArithmeticError(f"Tonelli-Shanks produced a wrong root for {a} mod {p}")
    return frozenset({root, p - root})


def sqrt_mod_two_pow(a: int, k: int) -> FrozenSet[int]:
    """All square roots of a modulo 2^k by exhaustive scan"""
    if not 1 <= k <= 16:
        raise InvalidArgument(f"exponent {k} outside [1, 16]")
    modulus = 1 << k
    if not 0 <= a < modulus:
        raise InvalidArgument(f"residue {a} outside [0, {modulus})")
    return frozenset(r for r in range(modulus) if r * r % modulus == a)


def pairwise_coprime(moduli: Iterable[int]) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in itertools.combinations(moduli, 2))
