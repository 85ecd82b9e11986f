"""Digital net construction in base 2.

A net is defined by ``s`` generator matrices of shape ``m x m`` over GF(2).
Point ``i`` of the net has, in coordinate ``j``, the fraction whose bit
``l`` (bit 1 being worth 1/2) is row ``l`` of matrix ``j`` dotted with the
bits of ``i`` (bit 1 of ``i`` being its least significant bit).  Points are
carried around as integer numerators over ``2**m``.

Rows of a generator matrix beyond row ``m`` are defined to be zero.  The
points only carry ``m`` bits, so any question about deeper digits has the
answer "that digit is zero"; adopting the convention here keeps every
stacked matrix and every gain coefficient well defined at arbitrary depth.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cached_property
from typing import TextIO

import numpy as np

from .gf2 import BitMatrix

MAX_M = 32

RAW = "raw"
DIRECTION_NUMBERS = "direction_numbers"


class ParseError(ValueError):
    """Malformed generator input; carries the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SubsetIndex:
    """A nonempty sorted coordinate subset ``u`` with one depth per member."""

    u: tuple[int, ...]
    k: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "k", tuple(self.k))
        if not self.u:
            raise ValueError("u must be nonempty")
        if any(b <= a for a, b in zip(self.u, self.u[1:])):
            raise ValueError(f"u must be strictly increasing, got {self.u}")
        if self.u[0] < 1:
            raise ValueError("coordinates are 1-based")
        if len(self.k) != len(self.u):
            raise ValueError(f"k has {len(self.k)} entries for {len(self.u)} coordinates")
        if any(kj < 0 for kj in self.k):
            raise ValueError(f"negative depth in {self.k}")

    @property
    def depth(self) -> int:
        return sum(self.k)

    @property
    def order(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class GeneratorSet:
    """The ``s`` generator matrices (each ``m x m``) of one digital net."""

    matrices: tuple[BitMatrix, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrices", tuple(self.matrices))
        if not self.matrices:
            raise ValueError("need at least one generator matrix")
        m = self.matrices[0].ncols
        if not 1 <= m <= MAX_M:
            raise ValueError(f"m must be in [1, {MAX_M}] for point generation, got {m}")
        for j, mat in enumerate(self.matrices, start=1):
            if mat.ncols != m or mat.nrows != m:
                raise ValueError(
                    f"matrix {j} is {mat.nrows}x{mat.ncols}, expected {m}x{m}"
                )

    @property
    def s(self) -> int:
        return len(self.matrices)

    @property
    def m(self) -> int:
        return self.matrices[0].ncols

    @property
    def n(self) -> int:
        return 1 << self.m

    def row(self, j: int, ell: int) -> int:
        """Packed row ``ell`` (1-based) of matrix ``j``; zero for ``ell > m``."""
        if not 1 <= j <= self.s:
            raise IndexError(f"coordinate {j} out of range 1..{self.s}")
        if ell < 1:
            raise IndexError(f"row index {ell} out of range")
        if ell > self.m:
            return 0
        return self.matrices[j - 1].rows[ell - 1]

    @cached_property
    def _columns(self) -> tuple[tuple[int, ...], ...]:
        """Per matrix: column ``ell`` packed as a point numerator."""
        m = self.m
        out = []
        for mat in self.matrices:
            cols = []
            for c in range(1, m + 1):
                packed = 0
                for r in range(1, m + 1):
                    packed |= ((mat.rows[r - 1] >> (m - c)) & 1) << (m - r)
                cols.append(packed)
            out.append(tuple(cols))
        return tuple(out)

    def validate_index(self, idx: SubsetIndex) -> None:
        if idx.u[-1] > self.s:
            raise ValueError(f"subset {idx.u} exceeds dimension s={self.s}")


class NetPoints:
    """All ``2**m`` points of a net as an (n, s) array of numerators."""

    def __init__(self, coords: np.ndarray, m: int):
        coords = np.array(coords, dtype=np.uint64, order="C")  # own copy, frozen below
        if coords.ndim != 2:
            raise ValueError("coords must be 2-dimensional")
        if not 1 <= m <= MAX_M:
            raise ValueError(f"m must be in [1, {MAX_M}]")
        if coords.shape[0] != 1 << m:
            raise ValueError(f"expected {1 << m} points for m={m}, got {coords.shape[0]}")
        if coords.size and int(coords.max()) >> m:
            raise ValueError("numerator out of range for m bits")
        coords.flags.writeable = False
        self._coords = coords
        self._m = m
        self._depth_cache: dict[int, np.ndarray] = {}

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def m(self) -> int:
        return self._m

    @property
    def n(self) -> int:
        return self._coords.shape[0]

    @property
    def s(self) -> int:
        return self._coords.shape[1]

    def fractions(self) -> np.ndarray:
        """Points as floats in [0, 1)."""
        return self._coords.astype(np.float64) / float(1 << self._m)

    def match_depth_matrix(self, j: int) -> np.ndarray:
        """n x n table of common-prefix bit counts in coordinate ``j``.

        Entry (i, i2) is the number of leading fraction bits shared by
        points i and i2; equal numerators give :data:`DEPTH_INF`, which
        compares greater than any queryable depth.  Cached per coordinate;
        only sensible for small n.
        """
        cached = self._depth_cache.get(j)
        if cached is not None:
            return cached
        col = self._coords[:, j - 1]
        x = col[:, None] ^ col[None, :]
        depth = _match_depth(x, self._m)
        if self.n <= 2048:
            self._depth_cache[j] = depth
        return depth


DEPTH_INF = np.int16(2**14)  # "all digits match"; above every real depth


def _match_depth(xor: np.ndarray, m: int) -> np.ndarray:
    """Common-prefix length of m-bit values from their XOR (DEPTH_INF if equal)."""
    bl = np.zeros(xor.shape, dtype=np.int16)
    tmp = xor.copy()
    while tmp.any():
        bl += (tmp != 0).astype(np.int16)
        tmp >>= np.uint64(1)
    out = (m - bl).astype(np.int16)
    out[xor == 0] = DEPTH_INF
    return out


# --- parsing ----------------------------------------------------------------

def _as_lines(source: str | TextIO) -> list[str]:
    if isinstance(source, str):
        return source.splitlines()
    return source.read().splitlines()


def load_generators(
    source: str | TextIO,
    fmt: str = RAW,
    *,
    dims: int | None = None,
    m: int | None = None,
) -> GeneratorSet:
    """Read a :class:`GeneratorSet` from text.

    ``fmt="raw"``: header line "s m", then s blocks separated by blank
    lines, each block being m lines of m characters from {0, 1} (row ``l``
    of matrix ``j``).

    ``fmt="direction_numbers"``: the Joe-Kuo direction-number layout
    (header line, then "d s a m_1 ... m_s" per dimension >= 2); ``dims``
    and ``m`` select how much of the table to instantiate.  Matrix 1 is
    always the identity.
    """
    lines = _as_lines(source)
    if fmt == RAW:
        if dims is not None or m is not None:
            raise ValueError("dims/m overrides only apply to direction_numbers input")
        return _parse_raw(lines)
    if fmt == DIRECTION_NUMBERS:
        if dims is None or m is None:
            raise ValueError("direction_numbers input needs dims and m")
        entries = parse_direction_numbers(lines)
        return sobol_generator_set(entries, dims, m)
    raise ValueError(f"unknown format {fmt!r}")


def _parse_raw(lines: list[str]) -> GeneratorSet:
    pos = 0

    def next_content() -> tuple[str, int]:
        nonlocal pos
        while pos < len(lines):
            text = lines[pos].strip()
            pos += 1
            if text:
                return text, pos
        raise ParseError("unexpected end of input", len(lines))

    header, lineno = next_content()
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(f"header must be 's m', got {header!r}", lineno)
    try:
        s, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"header must be two integers, got {header!r}", lineno) from None
    if s < 1:
        raise ParseError(f"dimension s must be >= 1, got {s}", lineno)
    if not 1 <= m <= MAX_M:
        raise ParseError(f"m must be in [1, {MAX_M}], got {m}", lineno)

    matrices = []
    for _ in range(s):
        rows = []
        for _ in range(m):
            text, lineno = next_content()
            if len(text) != m:
                raise ParseError(f"expected {m} binary digits, got {len(text)}", lineno)
            if set(text) - {"0", "1"}:
                raise ParseError(f"non-binary digit in row {text!r}", lineno)
            rows.append(int(text, 2))
        matrices.append(BitMatrix(m, tuple(rows)))
    while pos < len(lines):
        if lines[pos].strip():
            raise ParseError(f"unexpected content {lines[pos].strip()!r}", pos + 1)
        pos += 1
    return GeneratorSet(tuple(matrices))


@dataclass(frozen=True)
class DirectionEntry:
    """One Joe-Kuo table line: dimension, polynomial degree, a, initial m_i."""

    dim: int
    degree: int
    a: int
    m_init: tuple[int, ...]


def parse_direction_numbers(lines: list[str]) -> dict[int, DirectionEntry]:
    """Parse the Joe-Kuo layout into entries keyed by dimension (>= 2)."""
    entries: dict[int, DirectionEntry] = {}
    seen_header = False
    for lineno, raw_line in enumerate(lines, start=1):
        text = raw_line.strip()
        if not text:
            continue
        if not seen_header:
            seen_header = True  # first content line is the column header
            continue
        parts = text.split()
        if len(parts) < 4:
            raise ParseError(f"expected 'd s a m_1 ... m_s', got {text!r}", lineno)
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise ParseError(f"non-integer token in {text!r}", lineno) from None
        d, degree, a = values[0], values[1], values[2]
        m_init = tuple(values[3:])
        if d < 2:
            raise ParseError(f"direction-number entries start at dimension 2, got {d}", lineno)
        if d in entries:
            raise ParseError(f"duplicate entry for dimension {d}", lineno)
        if degree < 1:
            raise ParseError(f"polynomial degree must be >= 1, got {degree}", lineno)
        if len(m_init) != degree:
            raise ParseError(
                f"degree {degree} needs {degree} initial values, got {len(m_init)}", lineno
            )
        if not 0 <= a < 1 << max(degree - 1, 0):
            raise ParseError(f"a={a} out of range for degree {degree}", lineno)
        for i, mi in enumerate(m_init, start=1):
            if mi <= 0 or mi % 2 == 0 or mi >= 1 << i:
                raise ParseError(f"m_{i}={mi} must be odd and < 2^{i}", lineno)
        entries[d] = DirectionEntry(d, degree, a, m_init)
    if not seen_header:
        raise ParseError("empty direction-number input", 1)
    return entries


def direction_columns(entry: DirectionEntry, m: int) -> tuple[int, ...]:
    """First ``m`` direction numbers of one dimension, as m-bit numerators.

    Column ``c`` holds the top ``m`` bits of the c-th direction number; the
    recurrence past the polynomial degree q is

        m_c = 2 a_1 m_{c-1} ^ 4 a_2 m_{c-2} ^ ... ^ 2^q m_{c-q} ^ m_{c-q}

    with a_1 the most significant bit of the table's ``a`` field.
    """
    q = entry.degree
    mvals = list(entry.m_init[:m])
    for c in range(len(mvals) + 1, m + 1):
        acc = mvals[c - q - 1] ^ (mvals[c - q - 1] << q)
        for t in range(1, q):
            if (entry.a >> (q - 1 - t)) & 1:
                acc ^= mvals[c - t - 1] << t
        mvals.append(acc)
    return tuple(mv << (m - c) for c, mv in enumerate(mvals, start=1))


def _matrix_from_columns(cols: tuple[int, ...], m: int) -> BitMatrix:
    rows = []
    for r in range(1, m + 1):
        row = 0
        for c, col in enumerate(cols, start=1):
            row |= ((col >> (m - r)) & 1) << (m - c)
        rows.append(row)
    return BitMatrix(m, tuple(rows))


def sobol_generator_set(entries: dict[int, DirectionEntry], dims: int, m: int) -> GeneratorSet:
    """Generator matrices for the first ``dims`` Sobol' dimensions."""
    if dims < 1:
        raise ValueError(f"dims must be >= 1, got {dims}")
    if not 1 <= m <= MAX_M:
        raise ValueError(f"m must be in [1, {MAX_M}], got {m}")
    matrices = [BitMatrix.identity(m)]
    for d in range(2, dims + 1):
        entry = entries.get(d)
        if entry is None:
            raise ParseError(f"no direction-number entry for dimension {d}")
        matrices.append(_matrix_from_columns(direction_columns(entry, m), m))
    return GeneratorSet(tuple(matrices))


# --- point generation -------------------------------------------------------

def generate_points(gens: GeneratorSet) -> NetPoints:
    """All ``2**m`` points in index order, by the defining bit relation."""
    m, n, s = gens.m, gens.n, gens.s
    idx = np.arange(n, dtype=np.uint64)
    coords = np.zeros((n, s), dtype=np.uint64)
    for j in range(s):
        cols = gens._columns[j]
        acc = np.zeros(n, dtype=np.uint64)
        for ell in range(1, m + 1):
            mask = (idx >> np.uint64(ell - 1)) & np.uint64(1)
            acc ^= mask * np.uint64(cols[ell - 1])
        coords[:, j] = acc
    return NetPoints(coords, m)


def generate_points_gray(gens: GeneratorSet) -> NetPoints:
    """Gray-code incremental generation; bit-identical to the direct form.

    Successive Gray codes differ in one bit, so each step XORs a single
    generator column into the running point.
    """
    m, n, s = gens.m, gens.n, gens.s
    coords = np.zeros((n, s), dtype=np.uint64)
    current = [0] * s
    gray = 0
    for i in range(1, n):
        flip = (i & -i).bit_length()  # 1-based index of the changing bit
        gray ^= 1 << (flip - 1)
        for j in range(s):
            current[j] ^= gens._columns[j][flip - 1]
        coords[gray, :] = current
    return NetPoints(coords, m)


# --- stacked matrices -------------------------------------------------------

def assemble_cuk(gens: GeneratorSet, idx: SubsetIndex) -> BitMatrix:
    """Stack the first k_j rows of each selected generator matrix."""
    gens.validate_index(idx)
    rows = []
    for j, kj in zip(idx.u, idx.k):
        rows.extend(gens.row(j, ell) for ell in range(1, kj + 1))
    return BitMatrix(gens.m, tuple(rows))


def assemble_nabla(
    gens: GeneratorSet, idx: SubsetIndex, w: tuple[int, ...] | None = None
) -> BitMatrix:
    """Rows k_j + 1 of the selected matrices, for j in ``w`` (default all of u)."""
    gens.validate_index(idx)
    members = idx.u if w is None else tuple(w)
    if not members:
        raise ValueError("w must be nonempty")
    depth = dict(zip(idx.u, idx.k))
    rows = []
    for j in members:
        if j not in depth:
            raise ValueError(f"w contains {j} which is not in u={idx.u}")
        rows.append(gens.row(j, depth[j] + 1))
    return BitMatrix(gens.m, tuple(rows))


# --- export -----------------------------------------------------------------

def write_points_csv(numerators: np.ndarray, bits: int, stream: TextIO) -> None:
    """Write points as decimal fractions, one point per line."""
    scale = float(2**bits)
    for row in numerators:
        stream.write(",".join(repr(int(v) / scale) for v in row))
        stream.write("\n")


def write_points_binary(numerators: np.ndarray, bits: int, stream: io.RawIOBase) -> None:
    """Write numerators row-major as little-endian u32 (u64 past 32 bits)."""
    dtype = "<u4" if bits <= 32 else "<u8"
    stream.write(np.ascontiguousarray(numerators, dtype=np.uint64).astype(dtype).tobytes())


__all__ = [
    "MAX_M",
    "RAW",
    "DIRECTION_NUMBERS",
    "ParseError",
    "SubsetIndex",
    "GeneratorSet",
    "NetPoints",
    "DirectionEntry",
    "load_generators",
    "parse_direction_numbers",
    "direction_columns",
    "sobol_generator_set",
    "generate_points",
    "generate_points_gray",
    "assemble_cuk",
    "assemble_nabla",
    "write_points_csv",
    "write_points_binary",
]
