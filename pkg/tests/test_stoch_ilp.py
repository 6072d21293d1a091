import dataclasses
import random

import pytest

from hardness_chain.core.errors import (
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
from hardness_chain.core.mrd import NO_INSTANCE, MRDInstance, solve_mrd
from hardness_chain.core.stoch_ilp import (
    ReductionTag,
    Solution,
    TwoStageILP,
    decode_solution,
    encode_binary,
    encode_solution,
    ilp_from_witness,
    ilp_parameters,
    read_2ssilp,
    reduce_mrd_to_ilp,
    solve_exhaustive,
    solve_reduced,
    verify_solution,
    write_2ssilp,
)

TOY_2SSILP = """\
2SSILP 1
2 2 1 3
-1 3 1 2
0 0 1 1
-1 5 2 3
0 0 1 1
b: 0 1 0 1
L: 0 0 0 0 0 0 0
U: 10 10 1 1 10 1 1
w: 0 0 0 0 0 0 0
"""


def single_column_ilp(coefficient: int, rhs: int, upper: int = 8) -> TwoStageILP:
    """x0 + c * v = rhs with one block and one second-stage column"""
    return TwoStageILP(
        n=1, r=1, s=1, t=1,
        A_blocks=(((1,),),),
        B_blocks=(((coefficient,),),),
        b=(rhs,),
        L=(0, 0),
        U=(0, upper),
        w=(0, 0),
    )


def random_tiny_ilp(rng: random.Random) -> TwoStageILP:
    """n <= 3, r <= 2, s = 1, t <= 3, entries of B in [-1, 64], bounds <= 8"""
    n, r, t = rng.randint(1, 3), rng.randint(1, 2), rng.randint(1, 3)
    A_blocks = tuple(
        tuple((rng.choice((-1, 0, 1)),) for _ in range(r)) for _ in range(n)
    )
    B_blocks = tuple(
        tuple(tuple(rng.choice((-1, 0, 1, rng.randint(2, 64))) for _ in range(t)) for _ in range(r))
        for _ in range(n)
    )
    columns = 1 + n * t
    U = tuple(rng.randint(0, 8) for _ in range(columns))
    L = (0,) * columns
    if rng.random() < 0.5:
        # right-hand side of a random point in the box, so the instance is feasible
        x = [rng.randint(0, u) for u in U]
        b = []
        for i in range(n):
            block = x[1 + i * t:1 + (i + 1) * t]
            for a_row, b_row in zip(A_blocks[i], B_blocks[i]):
                b.append(a_row[0] * x[0] + sum(c * v for c, v in zip(b_row, block)))
    else:
        b = [rng.randint(-5, 80) for _ in range(n * r)]
    return TwoStageILP(n, r, 1, t, A_blocks, B_blocks, tuple(b), L, U, (0,) * columns)


class TestReduction:
    def test_toy_instance(self, toy_mrd):
        ilp = reduce_mrd_to_ilp(toy_mrd)
        assert (ilp.n, ilp.r, ilp.s, ilp.t) == (2, 2, 1, 3)
        assert ilp.B_blocks == (((3, 1, 2), (0, 1, 1)), ((5, 2, 3), (0, 1, 1)))
        assert ilp.A_blocks == (((-1,), (0,)), ((-1,), (0,)))
        assert ilp.b == (0, 1, 0, 1)
        assert ilp.delta == 5
        assert ilp.L == (0,) * 7
        assert ilp.U == (10, 10, 1, 1, 10, 1, 1)
        assert ilp.w == (0,) * 7
        assert write_2ssilp(ilp) == TOY_2SSILP

    def test_single_equation(self):
        ilp = reduce_mrd_to_ilp(MRDInstance.from_pairs([(5, [0])], 10))
        assert ilp.t == 2
        assert ilp.B_blocks == (((5, 0), (0, 1)),)

    def test_pad_columns_are_closed(self):
        instance = MRDInstance.from_pairs([(16, [1, 7, 9, 15]), (3, [1])], 50)
        ilp = reduce_mrd_to_ilp(instance)
        assert ilp.t == 5
        assert ilp.B_blocks[1] == ((3, 1, 0, 0, 0), (0, 1, 0, 0, 0))
        assert ilp.U[ilp.block_columns(1)[2]:] == (0, 0, 0)

    def test_no_instance(self):
        with pytest.raises(NoInstanceInput):
            reduce_mrd_to_ilp(NO_INSTANCE)

    def test_parameters(self, toy_mrd):
        params = ilp_parameters(reduce_mrd_to_ilp(toy_mrd))
        assert params["columns"] == 7
        assert params["rows"] == 4
        assert params["U_inf"] == 10
        assert params["delta"] == 5


class TestWitness:
    def test_toy_witness(self, toy_mrd):
        ilp = reduce_mrd_to_ilp(toy_mrd)
        solution = ilp_from_witness(toy_mrd, 2, (2, 2))
        assert solution.x == (2, 0, 0, 1, 0, 1, 0)
        assert verify_solution(ilp, solution)

        shifted = Solution((3,) + solution.x[1:])
        assert not verify_solution(ilp, shifted)
        assert not verify_solution(ilp, (0,) * 7)

    def test_z_equal_to_every_root_has_zero_multipliers(self):
        instance = MRDInstance.from_pairs([(7, [2, 5]), (11, [2, 9])], 100)
        solution = ilp_from_witness(instance, 2, (2, 2))
        assert solution.x[1] == 0 and solution.x[4] == 0

    def test_mismatch(self, toy_mrd):
        with pytest.raises(WitnessMismatch):
            ilp_from_witness(toy_mrd, 4, (1, 4))
        with pytest.raises(WitnessMismatch):
            ilp_from_witness(toy_mrd, 8, (2, 2))

    def test_length_mismatch(self, toy_mrd):
        with pytest.raises(DimensionMismatch):
            verify_solution(reduce_mrd_to_ilp(toy_mrd), (1, 2))

    def test_bounds_are_checked(self, toy_mrd):
        ilp = reduce_mrd_to_ilp(toy_mrd)
        # z = 17 satisfies both rows of both blocks but exceeds U[0]
        over = (17, 5, 0, 1, 3, 1, 0)
        relaxed = dataclasses.replace(ilp, U=(20,) + ilp.U[1:])
        assert verify_solution(relaxed, over)
        assert not verify_solution(ilp, over)


class TestSolvers:
    def test_reduced_on_toy(self, toy_mrd):
        ilp = reduce_mrd_to_ilp(toy_mrd)
        solution = solve_reduced(ilp)
        assert solution.x[0] == 2
        assert verify_solution(ilp, solution)
        assert solve_reduced(ilp, ReductionTag.from_mrd(toy_mrd)) == solution

    def test_reduced_absent_when_zeta_too_small(self):
        instance = MRDInstance.from_pairs([(3, [1, 2]), (5, [2, 3])], 1, "pair")
        assert solve_reduced(reduce_mrd_to_ilp(instance)) is None

    def test_reduced_cap(self, toy_mrd):
        with pytest.raises(CapExceeded):
            solve_reduced(reduce_mrd_to_ilp(toy_mrd), limit=5)

    def test_tag_recovered_from_ilp(self, toy_mrd):
        tag = ReductionTag.from_ilp(reduce_mrd_to_ilp(toy_mrd))
        assert tag == ReductionTag.from_mrd(toy_mrd)
        assert tag.rho == 2
        with pytest.raises(DimensionMismatch):
            ReductionTag.from_ilp(single_column_ilp(3, 6))

    @pytest.mark.parametrize("changes", [
        {"A_blocks": (((1,), (0,)), ((-1,), (0,)))},
        {"b": (0, 1, 0, 2)},
        {"L": (0, 0, 0, 0, 0, 0, 1)},
        {"w": (1, 0, 0, 0, 0, 0, 0)},
        {"B_blocks": (((3, 1, 2), (0, 1, 2)), ((5, 2, 3), (0, 1, 1)))},
        {"B_blocks": (((3, 2, 1), (0, 1, 1)), ((5, 2, 3), (0, 1, 1)))},
        {"B_blocks": (((3, 1, 2), (0, 1, 0)), ((5, 2, 3), (0, 1, 1)))},
        {"U": (10, 10, 1, 2, 10, 1, 1)},
        {"U": (10, 9, 1, 1, 10, 1, 1)},
    ])
    def test_tag_rejects_other_layouts(self, toy_mrd, changes):
        ilp = dataclasses.replace(reduce_mrd_to_ilp(toy_mrd), **changes)
        with pytest.raises(DimensionMismatch):
            ReductionTag.from_ilp(ilp)

    def test_general_instance_with_reduction_dimensions(self):
        ilp = TwoStageILP(
            n=1, r=2, s=1, t=2,
            A_blocks=(((1,), (0,)),), B_blocks=(((1, 0), (0, 1)),), b=(2, 1),
            L=(0, 0, 0), U=(5, 5, 5), w=(0, 0, 0),
        )
        with pytest.raises(DimensionMismatch):
            ReductionTag.from_ilp(ilp)
        assert solve_exhaustive(ilp) == Solution((0, 2, 1))

    def test_reduced_with_moduli_beyond_int64(self):
        wide = 2 ** 64 + 13
        instance = MRDInstance.from_pairs([(wide, [5]), (3, [2])], 10)
        ilp = reduce_mrd_to_ilp(instance)
        solution = solve_reduced(ilp)
        assert solution == Solution((5, 0, 1, 1, 1))
        assert verify_solution(ilp, solution)
        assert solve_reduced(reduce_mrd_to_ilp(MRDInstance.from_pairs([(wide, [11])], 10))) is None

    def test_exhaustive_on_clamped_toy(self, toy_mrd):
        ilp = reduce_mrd_to_ilp(toy_mrd)
        clamped = dataclasses.replace(ilp, U=(3,) + ilp.U[1:])
        solution = solve_exhaustive(clamped)
        assert solution.x[0] == 2
        assert verify_solution(clamped, solution)

    def test_exhaustive_infeasible(self):
        assert solve_exhaustive(single_column_ilp(3, 7, upper=1)) is None
        assert solve_exhaustive(single_column_ilp(3, 6, upper=2)).x == (0, 2)

    def test_exhaustive_limit(self, toy_mrd):
        with pytest.raises(SearchSpaceTooLarge):
            solve_exhaustive(reduce_mrd_to_ilp(toy_mrd), limit=100)

    def test_reduction_preserves_feasibility(self, mrd_factory):
        rng = random.Random(14)
        for _ in range(200):
            instance = mrd_factory(rng)
            found = solve_mrd(instance)
            ilp = reduce_mrd_to_ilp(instance)
            solution = solve_reduced(ilp)
            assert (found is None) == (solution is None)
            if found is not None:
                z, choice = found
                assert solution.x[0] == z
                assert verify_solution(ilp, solution)
                assert verify_solution(ilp, ilp_from_witness(instance, z, choice))

    def test_exhaustive_agrees_with_reduced(self):
        rng = random.Random(15)
        for _ in range(30):
            moduli = rng.sample((3, 4, 5, 7), rng.randint(1, 2))
            instance = MRDInstance.from_pairs(
                [(q, rng.sample(range(q), rng.randint(1, 2))) for q in moduli], rng.randint(1, 12)
            )
            ilp = reduce_mrd_to_ilp(instance)
            # solve_reduced looks for z >= 1
            positive = dataclasses.replace(ilp, L=(1,) + ilp.L[1:])
            reduced = solve_reduced(ilp)
            exhaustive = solve_exhaustive(positive)
            assert (reduced is None) == (exhaustive is None)
            if reduced is not None:
                assert exhaustive.x[0] == reduced.x[0]
                assert verify_solution(ilp, exhaustive)


class TestEncoding:
    def test_digit_row_for_five(self):
        enc = encode_binary(single_column_ilp(5, 10))
        assert enc.digit_count == 3
        assert enc.ilp.B_blocks[0][0] == (1, 0, 1)
        # digits of v = 2 are (2, 4, 8): 2 + 8 = 10
        assert verify_solution(enc.ilp, (0, 2, 4, 8))

    def test_chain_matrix(self):
        enc = encode_binary(single_column_ilp(5, 10))
        assert enc.ilp.B_blocks[0][1:] == ((2, -1, 0), (0, 2, -1))
        assert enc.ilp.b == (10, 0, 0)

    def test_toy_dimensions(self, toy_mrd):
        ilp = reduce_mrd_to_ilp(toy_mrd)
        enc = encode_binary(ilp)
        assert enc.digit_count == 3
        assert enc.ilp.r == 2 + 3 * 2 == 8
        assert enc.ilp.t == 9
        assert enc.ilp.delta == 2
        assert enc.group_map[0] == (1, 4)
        assert len(enc.group_map) == 6

    def test_bounds_scale_per_digit(self, toy_mrd):
        enc = encode_binary(reduce_mrd_to_ilp(toy_mrd))
        assert enc.ilp.U[:4] == (10, 10, 20, 40)
        assert enc.ilp.U[4:7] == (1, 2, 4)

    def test_witness_round_trip(self, toy_mrd):
        ilp = reduce_mrd_to_ilp(toy_mrd)
        enc = encode_binary(ilp)
        solution = ilp_from_witness(toy_mrd, 2, (2, 2))
        encoded = encode_solution(enc, solution)
        assert encoded.x[0] == 2
        assert verify_solution(enc.ilp, encoded)
        assert decode_solution(enc, encoded) == solution

    def test_minus_one_digits(self):
        enc = encode_binary(single_column_ilp(-1, 0))
        assert enc.digit_count == 1
        assert enc.ilp.B_blocks[0] == ((-1,),)

    def test_chain_violation(self):
        enc = encode_binary(single_column_ilp(5, 10))
        with pytest.raises(ChainViolation):
            decode_solution(enc, Solution((0, 2, 4, 9)))
        with pytest.raises(DimensionMismatch):
            decode_solution(enc, Solution((0, 2)))

    def test_rejects_unencodable_entries(self):
        with pytest.raises(NegativeCoefficient):
            encode_binary(single_column_ilp(-2, 0))
        ilp = single_column_ilp(3, 0)
        with pytest.raises(NegativeCoefficient):
            encode_binary(dataclasses.replace(ilp, A_blocks=(((2,),),)))

    def test_feasibility_preserved_on_random_instances(self):
        rng = random.Random(16)
        feasible = 0
        for _ in range(100):
            ilp = random_tiny_ilp(rng)
            enc = encode_binary(ilp)
            assert enc.ilp.delta <= 2
            # the limit bounds a product over blocks; the search itself runs block by block
            original = solve_exhaustive(ilp, limit=10 ** 12)
            encoded = solve_exhaustive(enc.ilp, limit=10 ** 12)
            assert (original is None) == (encoded is None)
            if encoded is not None:
                feasible += 1
                assert verify_solution(ilp, decode_solution(enc, encoded))
                assert verify_solution(enc.ilp, encode_solution(enc, original))
        assert feasible > 0


class TestFormat:
    def test_read_toy(self, toy_mrd):
        assert read_2ssilp(TOY_2SSILP) == reduce_mrd_to_ilp(toy_mrd)

    def test_round_trip_of_encoded_instance(self, toy_mrd):
        enc = encode_binary(reduce_mrd_to_ilp(toy_mrd)).ilp
        text = write_2ssilp(enc)
        assert read_2ssilp(text) == enc
        assert write_2ssilp(read_2ssilp(text)) == text

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "2SSILP 2\n1 1 1 1\n",
            "2SSILP 1\n1 1 1\n",
            "2SSILP 1\n0 1 1 1\n",
            "2SSILP 1\n1 1 1 1\n1 x\nb: 0\nL: 0 0\nU: 1 1\nw: 0 0\n",
            "2SSILP 1\n1 1 1 1\n1 1 1\nb: 0\nL: 0 0\nU: 1 1\nw: 0 0\n",
            "2SSILP 1\n1 1 1 1\n1 1\nc: 0\nL: 0 0\nU: 1 1\nw: 0 0\n",
            "2SSILP 1\n1 1 1 1\n1 1\nb: 0\nL: 0 0\nU: 1 1\n",
            "2SSILP 1\n1 1 1 1\n1 1\nb: 0\nL: 0 2\nU: 1 1\nw: 0 0\n",
            "2SSILP 1\n1 1 1 1\n1 1\nb: 0 0\nL: 0 0\nU: 1 1\nw: 0 0\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(MalformedILPFile):
            read_2ssilp(text)


class TestValidation:
    def test_dimension_mismatch(self):
        ilp = single_column_ilp(3, 6)
        with pytest.raises(DimensionMismatch):
            dataclasses.replace(ilp, b=(1, 2))
        with pytest.raises(DimensionMismatch):
            dataclasses.replace(ilp, B_blocks=(((1, 2),),))
        with pytest.raises(DimensionMismatch):
            dataclasses.replace(ilp, n=0)

    def test_invalid_bounds(self):
        with pytest.raises(InvalidBounds):
            dataclasses.replace(single_column_ilp(3, 6), L=(1, 0), U=(0, 8))
