"""Construction: parsing, point generation, stacked matrices, export."""

import io
import random

import numpy as np
import pytest

from netgains.gf2 import BitMatrix, rank
from netgains.netgen import (
    DIRECTION_NUMBERS,
    RAW,
    DirectionEntry,
    ParseError,
    SubsetIndex,
    assemble_cuk,
    assemble_nabla,
    direction_columns,
    generate_points,
    generate_points_gray,
    load_generators,
    parse_direction_numbers,
    write_points_binary,
    write_points_csv,
)
from netgains.quality import compositions
from netgains.samples import JOE_KUO_HEAD, SHIFT_NET_RAW

# Pascal matrix mod 2: entry (r, c) = C(c-1, r-1) mod 2; derived by running
# the direction-number recurrence by hand for a=0, m_1=1: m = 1,3,5,15.
PASCAL_4 = BitMatrix.from_strings(["1111", "0101", "0011", "0001"])


# --- raw format ---------------------------------------------------------------

def test_parse_shift_net(shift):
    assert shift.s == 4 and shift.m == 4
    assert shift.matrices[0].rows == (0b0001, 0b0110, 0b0010, 0b0000)
    assert shift.matrices[3].rows == (0b1000, 0b0011, 0b0001, 0b0000)


def test_parse_accepts_stream():
    gens = load_generators(io.StringIO(SHIFT_NET_RAW), RAW)
    assert gens.s == 4


@pytest.mark.parametrize(
    "text,line",
    [
        ("4\n", 1),
        ("x 4\n", 1),
        ("1 2\n01\n0x\n", 3),
        ("1 2\n01\n011\n", 3),
        ("1 2\n01\n", 2),  # truncated: error reported at last line
        ("1 2\n01\n10\njunk\n", 4),
    ],
)
def test_parse_raw_errors_carry_line(text, line):
    with pytest.raises(ParseError) as err:
        load_generators(text, RAW)
    assert err.value.line == line


def test_parse_raw_rejects_overrides():
    with pytest.raises(ValueError):
        load_generators(SHIFT_NET_RAW, RAW, dims=2, m=4)


# --- direction numbers --------------------------------------------------------

def test_dimension_one_is_identity():
    gens = load_generators(JOE_KUO_HEAD, DIRECTION_NUMBERS, dims=1, m=5)
    assert gens.matrices[0] == BitMatrix.identity(5)
    assert gens.s == 1


def test_dimension_two_is_pascal():
    gens = load_generators(JOE_KUO_HEAD, DIRECTION_NUMBERS, dims=2, m=4)
    assert gens.matrices[1] == PASCAL_4


def test_direction_columns_recurrence():
    entry = DirectionEntry(dim=2, degree=1, a=0, m_init=(1,))
    # hand recurrence: m_c = 2 m_{c-1} ^ m_{c-1} -> 1, 3, 5, 15
    assert direction_columns(entry, 4) == (0b1000, 0b1100, 0b1010, 0b1111)


def test_sobol_matrices_unit_upper_triangular():
    gens = load_generators(JOE_KUO_HEAD, DIRECTION_NUMBERS, dims=7, m=8)
    for mat in gens.matrices:
        for r in range(8):
            assert mat.entry(r, r + 1) == 1
            for c in range(1, r + 1):
                assert mat.entry(r, c) == 0


@pytest.mark.parametrize(
    "line",
    [
        "2 2 0 1",         # degree 2 but one initial value
        "2 1 0 2",         # even m_1
        "2 1 0 1 9",       # too many initial values
        "2 1 1 1",         # a out of range for degree 1
        "1 1 0 1",         # dimension below 2
        "2 x 0 1",         # non-integer
    ],
)
def test_direction_number_entry_errors(line):
    with pytest.raises(ParseError):
        parse_direction_numbers(["d s a m_i", line])


def test_duplicate_dimension_rejected():
    with pytest.raises(ParseError):
        parse_direction_numbers(["hdr", "2 1 0 1", "2 1 0 1"])


def test_missing_dimension_reported():
    with pytest.raises(ParseError, match="dimension 3"):
        load_generators("hdr\n2 1 0 1\n4 1 0 1\n", DIRECTION_NUMBERS, dims=4, m=4)


def test_direction_numbers_need_dims_and_m():
    with pytest.raises(ValueError):
        load_generators(JOE_KUO_HEAD, DIRECTION_NUMBERS)


# --- point generation -----------------------------------------------------------

def test_identity_gives_bit_reversed_counting(identity_net):
    pts = generate_points(identity_net(3))
    assert [int(v) for v in pts.coords[:, 0]] == [0, 4, 2, 6, 1, 5, 3, 7]


def test_point_zero_is_origin(shift):
    pts = generate_points(shift)
    assert not pts.coords[0].any()


def test_digital_map_is_linear(shift):
    pts = generate_points(shift)
    rng = random.Random(5)
    for _ in range(200):
        i, i2 = rng.randrange(16), rng.randrange(16)
        assert np.array_equal(pts.coords[i ^ i2], pts.coords[i] ^ pts.coords[i2])


def test_columns_recoverable_from_points(shift, sobol2d):
    for gens in (shift, sobol2d):
        pts = generate_points(gens)
        for j in range(1, gens.s + 1):
            for ell in range(1, gens.m + 1):
                column = int(pts.coords[1 << (ell - 1), j - 1])
                # column ell of the generator, read back from the matrix
                want = 0
                for r in range(1, gens.m + 1):
                    want |= gens.matrices[j - 1].entry(r - 1, ell) << (gens.m - r)
                assert column == want


def test_gray_code_matches_direct(shift, sobol2d, identity_net):
    for gens in (shift, sobol2d, identity_net(5, 2)):
        direct = generate_points(gens)
        gray = generate_points_gray(gens)
        assert np.array_equal(direct.coords, gray.coords)


def test_shift_net_balanced_to_depth_three(shift_points):
    # every dyadic box with total depth <= 3 holds exactly 2^(4-depth) points
    for depth in range(0, 4):
        want = 1 << (4 - depth)
        for k in compositions(depth, 4, lo=0, hi=depth):
            shifts = np.array([4 - kj for kj in k], dtype=np.uint64)
            cells = shift_points.coords >> shifts
            _, counts = np.unique(cells, axis=0, return_counts=True)
            assert counts.min() == counts.max() == want


# --- stacked matrices -----------------------------------------------------------

def test_cuk_first_rows_anti_diagonal(shift):
    idx = SubsetIndex((1, 2, 3, 4), (1, 1, 1, 1))
    got = assemble_cuk(shift, idx)
    assert got == BitMatrix.from_strings(["0001", "0010", "0100", "1000"])
    assert rank(got) == 4


def test_cuk_zero_depths_empty(shift):
    got = assemble_cuk(shift, SubsetIndex((2, 3), (0, 0)))
    assert got.nrows == 0


def test_cuk_pads_zero_rows(identity_net):
    m = 4
    got = assemble_cuk(identity_net(m), SubsetIndex((1,), (m + 2,)))
    assert got.nrows == m + 2
    assert got.rows[m:] == (0, 0)
    assert rank(got) == m


def test_nabla_depth_zero_gives_first_rows(shift):
    idx = SubsetIndex((1, 2, 3, 4), (0, 0, 0, 0))
    got = assemble_nabla(shift, idx)
    assert got == BitMatrix.from_strings(["0001", "0010", "0100", "1000"])


def test_nabla_pads_zero_row(identity_net):
    got = assemble_nabla(identity_net(4), SubsetIndex((1,), (4,)), (1,))
    assert got.rows == (0,)


def test_nabla_second_rows(sobol2d):
    got = assemble_nabla(sobol2d, SubsetIndex((1, 2), (1, 1)))
    assert got.rows == (sobol2d.row(1, 2), sobol2d.row(2, 2))


def test_nabla_validates_w(shift):
    idx = SubsetIndex((1, 2), (1, 1))
    with pytest.raises(ValueError):
        assemble_nabla(shift, idx, ())
    with pytest.raises(ValueError):
        assemble_nabla(shift, idx, (3,))


def test_stacking_cuk_nabla_gives_next_depth(shift, sobol2d):
    rng = random.Random(2)
    for gens in (shift, sobol2d):
        for _ in range(50):
            size = rng.randint(1, gens.s)
            u = tuple(sorted(rng.sample(range(1, gens.s + 1), size)))
            k = tuple(rng.randint(0, gens.m + 1) for _ in u)
            stacked = list(assemble_cuk(gens, SubsetIndex(u, k)).rows)
            stacked += list(assemble_nabla(gens, SubsetIndex(u, k)).rows)
            bumped = assemble_cuk(gens, SubsetIndex(u, tuple(kj + 1 for kj in k)))
            assert sorted(stacked) == sorted(bumped.rows)


# --- SubsetIndex validation -------------------------------------------------------

@pytest.mark.parametrize(
    "u,k",
    [((), ()), ((2, 1), (0, 0)), ((0,), (1,)), ((1,), (1, 2)), ((1,), (-1,))],
)
def test_subset_index_rejects_bad_shapes(u, k):
    with pytest.raises(ValueError):
        SubsetIndex(u, k)


def test_subset_index_out_of_dimension(shift):
    with pytest.raises(ValueError):
        assemble_cuk(shift, SubsetIndex((1, 5), (1, 1)))


# --- export ----------------------------------------------------------------------

def test_csv_export_fractions(identity_net):
    pts = generate_points(identity_net(3))
    buf = io.StringIO()
    write_points_csv(pts.coords, pts.m, buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 8
    assert lines[0] == "0.0"
    assert lines[1] == "0.5"


def test_binary_export_u32_roundtrip(shift_points):
    buf = io.BytesIO()
    write_points_binary(shift_points.coords, shift_points.m, buf)
    back = np.frombuffer(buf.getvalue(), dtype="<u4").reshape(16, 4)
    assert np.array_equal(back, shift_points.coords.astype("<u4"))
