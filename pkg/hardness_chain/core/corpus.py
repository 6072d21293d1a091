"""
Seeded random 3-CNF corpora
"""

import logging
import random
from typing import List

from .errors import InvalidArgument
from .sat import Formula

logger = logging.getLogger(__name__)

MIN_VARS = 3
MAX_VARS = 5
MAX_CLAUSES = 6


def _random_clause(rng: random.Random, num_vars: int) -> List[int]:
    # partial Fisher-Yates over 1..num_vars, first three slots
    pool = list(range(1, num_vars + 1))
    for k in range(3):
        j = k + rng.randrange(num_vars - k)
        pool[k], pool[j] = pool[j], pool[k]
    return [v if rng.randrange(2) else -v for v in pool[:3]]


def generate_corpus(count: int, num_vars: int = 3, num_clauses: int = 3, seed: int = 0) -> List[Formula]:
    """Reproducible formulas with exactly three distinct variables per clause

    Only `randrange` is drawn from the generator, whose output for a given
    seed does not change between platforms or Python releases.
    """
    if count < 0:
        raise InvalidArgument("count must be non-negative")
    if not MIN_VARS <= num_vars <= MAX_VARS:
        raise InvalidArgument(f"num_vars must lie in [{MIN_VARS}, {MAX_VARS}]")
    if not 1 <= num_clauses <= MAX_CLAUSES:
        raise InvalidArgument(f"num_clauses must lie in [1, {MAX_CLAUSES}]")

    rng = random.Random(seed)
    corpus = [
        Formula.from_lists(num_vars, [_random_clause(rng, num_vars) for _ in range(num_clauses)])
        for _ in range(count)
    ]
    logger.debug(f"generated {count} formulas (vars={num_vars}, clauses={num_clauses}, seed={seed})")
    return corpus
