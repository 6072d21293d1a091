"""
Shared fixtures for the hardness-chain test suite
"""

import math
import random
from typing import Callable

import pytest

from hardness_chain.config.settings import Settings
from hardness_chain.core.mrd import MRDInstance
from hardness_chain.core.sat import Formula

# (x1 v x2 v x3) & (~x1 v x2 v x3)
MINI_CNF = "c mini\np cnf 3 2\n1 2 3 0\n-1 2 3 0\n"

# x1 & ~x1
UNSAT_CNF = "p cnf 1 2\n1 0\n-1 0\n"

# Moduli below 50 used by the random MRD instances; pairwise coprime subsets are drawn from it
MRD_MODULI = (3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 37, 41, 43, 47, 49)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep user environment variables out of Settings()"""
    for name in (
        "HCHAIN_COEFF_MODE",
        "HCHAIN_RESIDUE_MODE",
        "HCHAIN_BRUTE_CAP",
        "HCHAIN_SEED",
        "LOG_LEVEL",
        "LOG_FILE_PATH",
    ):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture
def mini_formula() -> Formula:
    return Formula.from_lists(3, [[1, 2, 3], [-1, 2, 3]])


@pytest.fixture
def unsat_formula() -> Formula:
    return Formula.from_lists(1, [[1], [-1]])


@pytest.fixture
def mini_cnf(tmp_path):
    path = tmp_path / "mini.cnf"
    path.write_text(MINI_CNF)
    return path


@pytest.fixture
def unsat_cnf(tmp_path):
    path = tmp_path / "unsat.cnf"
    path.write_text(UNSAT_CNF)
    return path


@pytest.fixture
def toy_mrd() -> MRDInstance:
    """q = (3, 5), roots ({1, 2}, {2, 3}), zeta = 10"""
    return MRDInstance.from_pairs([(3, [1, 2]), (5, [2, 3])], 10, "pair")


def _coprime_moduli(rng: random.Random, count: int):
    moduli = []
    for q in rng.sample(MRD_MODULI, len(MRD_MODULI)):
        if all(math.gcd(q, other) == 1 for other in moduli):
            moduli.append(q)
        if len(moduli) == count:
            break
    return moduli


@pytest.fixture
def mrd_factory() -> Callable[[random.Random], MRDInstance]:
    """Random instances with at most 5 equations, q_i < 50 and zeta <= 10^4"""

    def build(rng: random.Random) -> MRDInstance:
        mode = rng.choice(("pair", "full"))
        moduli = _coprime_moduli(rng, rng.randint(1, 5))
        equations = []
        for q in moduli:
            size = rng.randint(1, 2 if mode == "pair" else min(4, q))
            equations.append((q, rng.sample(range(q), size)))
        return MRDInstance.from_pairs(equations, rng.randint(1, 10 ** 4), mode)

    return build
