"""GF(2) kernel: examples pinned by hand plus randomized invariants.

Derived expectations are frozen from independent brute force: row-space
membership by enumerating all 2**nrows combinations, solution counts by
trying all 2**ncols vectors.
"""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netgains.gf2 import (
    BitMatrix,
    BitVector,
    in_row_space,
    matvec,
    nullspace_basis,
    rank,
    row_dependency,
    row_reduce,
    solution_count_log2,
)

ANTI_DIAG = BitMatrix.from_strings(["0001", "0010", "0100", "1000"])


def brute_row_space(mat: BitMatrix) -> set[int]:
    out = set()
    for picks in itertools.product([0, 1], repeat=mat.nrows):
        acc = 0
        for take, row in zip(picks, mat.rows):
            if take:
                acc ^= row
        out.add(acc)
    return out


def random_matrix(rng: random.Random, nrows: int, ncols: int) -> BitMatrix:
    return BitMatrix(ncols, tuple(rng.randrange(1 << ncols) for _ in range(nrows)))


# --- rank --------------------------------------------------------------------

def test_rank_anti_diagonal_full():
    assert rank(ANTI_DIAG) == 4


def test_rank_zero_matrix():
    assert rank(BitMatrix(5, (0,) * 5)) == 0


def test_rank_xor_dependent_rows():
    mat = BitMatrix.from_strings(["1100", "0110", "1010"])
    assert rank(mat) == 2


def test_rank_empty_matrix():
    assert rank(BitMatrix.empty(4)) == 0


def test_rank_equals_transpose_rank():
    rng = random.Random(1)
    for _ in range(10_000):
        nrows = rng.randint(1, 8)
        ncols = rng.randint(1, 8)
        mat = random_matrix(rng, nrows, ncols)
        assert rank(mat) == rank(mat.transpose())


# --- row_reduce -----------------------------------------------------------

def test_row_reduce_identity():
    red = row_reduce(BitMatrix.identity(4))
    assert red.reduced == BitMatrix.identity(4)
    assert red.rank == 4
    assert red.pivot_cols == (1, 2, 3, 4)


def test_row_reduce_duplicate_row():
    red = row_reduce(BitMatrix.from_strings(["11", "11"]))
    assert red.reduced.rows == (0b11, 0)
    assert red.rank == 1
    assert red.pivot_cols == (1,)


def test_row_reduce_dependent_triple():
    red = row_reduce(BitMatrix.from_strings(["0110", "1100", "1010"]))
    assert red.rank == 2
    assert len(red.pivot_cols) == 2


def test_row_reduce_preserves_row_space():
    rng = random.Random(7)
    for _ in range(300):
        mat = random_matrix(rng, rng.randint(0, 6), rng.randint(1, 6))
        red = row_reduce(mat)
        assert brute_row_space(mat) == brute_row_space(red.reduced)
        assert red.rank == rank(mat)
        assert red.reduced.nrows == mat.nrows


# --- in_row_space -----------------------------------------------------------

def test_zero_vector_always_in_span():
    mat = BitMatrix.from_strings(["1011", "0001"])
    assert in_row_space(mat, BitVector.zero(4))
    assert in_row_space(BitMatrix.empty(4), BitVector.zero(4))


def test_missing_basis_vector_not_in_span():
    mat = BitMatrix(4, BitMatrix.identity(4).rows[:3])
    assert not in_row_space(mat, BitVector.from_string("0001"))


def test_xor_of_rows_in_span():
    mat = BitMatrix.from_strings(["1100", "0110"])
    assert in_row_space(mat, BitVector.from_string("1010"))
    # frozen from enumerating all 4 combinations: {0000, 1100, 0110, 1010}
    assert brute_row_space(mat) == {0b0000, 0b1100, 0b0110, 0b1010}


def test_in_row_space_length_mismatch():
    with pytest.raises(ValueError):
        in_row_space(BitMatrix.identity(3), BitVector.zero(4))


@given(st.data())
@settings(max_examples=200, deadline=None)
def test_in_row_space_matches_rank_append(data):
    ncols = data.draw(st.integers(1, 6))
    nrows = data.draw(st.integers(0, 6))
    rows = tuple(data.draw(st.integers(0, (1 << ncols) - 1)) for _ in range(nrows))
    vec = data.draw(st.integers(0, (1 << ncols) - 1))
    mat = BitMatrix(ncols, rows)
    v = BitVector(vec, ncols)
    member = in_row_space(mat, v)
    assert member == (rank(mat.with_row(v)) == rank(mat))
    assert member == (vec in brute_row_space(mat))


# --- solution_count_log2 -----------------------------------------------------

def brute_solution_count(mat: BitMatrix, rhs: BitVector) -> int:
    hits = 0
    for x in range(1 << mat.ncols):
        out = 0
        for row in mat.rows:
            out = (out << 1) | ((row & x).bit_count() & 1)
        hits += out == rhs.bits
    return hits


def test_solution_count_identity_unique():
    for y in range(16):
        assert solution_count_log2(BitMatrix.identity(4), BitVector(y, 4)) == 0


def test_solution_count_inconsistent():
    assert solution_count_log2(BitMatrix(3, (0,)), BitVector(1, 1)) is None


def test_solution_count_two_free_bits():
    mat = BitMatrix.from_strings(["1100", "0110"])
    # frozen from enumerating all 16 vectors: 4 solutions
    assert brute_solution_count(mat, BitVector(0b11, 2)) == 4
    assert solution_count_log2(mat, BitVector(0b11, 2)) == 2


def test_solution_count_dimension_mismatch():
    with pytest.raises(ValueError):
        solution_count_log2(BitMatrix.identity(3), BitVector(0, 2))


def test_homogeneous_system_never_inconsistent():
    rng = random.Random(3)
    for _ in range(500):
        mat = random_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
        got = solution_count_log2(mat, BitVector.zero(mat.nrows))
        assert got == mat.ncols - rank(mat)


@given(st.data())
@settings(max_examples=150, deadline=None)
def test_solution_count_matches_enumeration(data):
    ncols = data.draw(st.integers(1, 5))
    nrows = data.draw(st.integers(1, 5))
    mat = BitMatrix(
        ncols, tuple(data.draw(st.integers(0, (1 << ncols) - 1)) for _ in range(nrows))
    )
    rhs = BitVector(data.draw(st.integers(0, (1 << nrows) - 1)), nrows)
    got = solution_count_log2(mat, rhs)
    want = brute_solution_count(mat, rhs)
    assert (want == 0 and got is None) or want == 1 << got


# --- nullspace and dependencies ----------------------------------------------

def test_nullspace_basis_kills_matrix():
    rng = random.Random(11)
    for _ in range(300):
        mat = random_matrix(rng, rng.randint(0, 6), rng.randint(1, 6))
        basis = nullspace_basis(mat)
        assert len(basis) == mat.ncols - rank(mat)
        for vec in basis:
            assert matvec(mat, vec).bits == 0 or mat.nrows == 0
        # basis vectors are independent
        assert rank(BitMatrix(mat.ncols, tuple(v.bits for v in basis))) == len(basis)


def test_row_dependency_vanishes():
    rng = random.Random(13)
    seen_dependent = 0
    for _ in range(400):
        mat = random_matrix(rng, rng.randint(1, 7), rng.randint(1, 5))
        dep = row_dependency(mat)
        if dep is None:
            assert rank(mat) == mat.nrows
            continue
        seen_dependent += 1
        assert dep.bits != 0
        acc = 0
        for i, row in enumerate(mat.rows):
            if dep.bit(i + 1):
                acc ^= row
        assert acc == 0
    assert seen_dependent > 100


# --- construction guards -------------------------------------------------------

def test_width_limit_enforced():
    with pytest.raises(ValueError):
        BitVector(0, 65)
    with pytest.raises(ValueError):
        BitMatrix(65, ())


def test_row_overflow_rejected():
    with pytest.raises(ValueError):
        BitMatrix(3, (0b1000,))


def test_string_roundtrip():
    mat = BitMatrix.from_strings(["101", "010"])
    assert str(mat).splitlines() == ["101", "010"]
    assert mat.entry(0, 1) == 1 and mat.entry(0, 2) == 0
