"""Exact gain coefficients of scrambled digital nets in base 2.

A gain coefficient is indexed by a nonempty coordinate subset ``u`` and a
depth vector ``k``: it is the factor by which scrambling rescales the
plain-MC variance contribution of functions that oscillate at resolution
``k`` on exactly the coordinates in ``u``.  For a net built from generator
matrices every such coefficient is 0 or a power of two, and which of the
two cases holds is a row-space membership question, so the value can be
read off one GF(2) elimination (:func:`gain_fast`).

Three routes of increasing speed compute the same number:

* :func:`gain_bruteforce` - the O(n^2) pairwise sum over the points, the
  definition itself; knows nothing about matrices.
* :func:`gain_representation` - a signed count over the nullspace of the
  stacked matrix; middle ground.
* :func:`gain_fast` - rank plus one membership test.

They are kept deliberately separate so each can serve as an oracle for the
others; all three use exact integer arithmetic.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Sequence, TextIO

import numpy as np

from . import gf2
from .gf2 import BitMatrix
from .netgen import GeneratorSet, NetPoints, SubsetIndex, assemble_cuk
from .quality import bounded_vectors, first_rank_deficient_k, t_u, t_value, t_star_u

NULLSPACE_LOG2_LIMIT = 24
_BRUTE_CHUNK = 512


class ResourceLimitError(RuntimeError):
    """A gain computation would enumerate more states than allowed."""


@total_ordering
@dataclass(frozen=True)
class GainValue:
    """A gain coefficient as log2; ``None`` encodes the exact value 0."""

    log2: int | None

    @classmethod
    def zero(cls) -> "GainValue":
        return cls(None)

    @property
    def is_zero(self) -> bool:
        return self.log2 is None

    @property
    def as_int(self) -> int:
        return 0 if self.log2 is None else 1 << self.log2

    def _key(self) -> int:
        return -1 if self.log2 is None else self.log2

    def __lt__(self, other: "GainValue") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return "0" if self.log2 is None else f"2^{self.log2}"


def gain_fast(gens: GeneratorSet, idx: SubsetIndex) -> GainValue:
    """Gain coefficient via rank and a row-space membership test.

    The coefficient is ``2**(m - rank)`` of the stacked matrix when the XOR
    of the next row of each selected generator lies in its row space, and 0
    otherwise.
    """
    gens.validate_index(idx)
    basis: dict[int, int] = {}
    r = 0
    target = 0
    for j, kj in zip(idx.u, idx.k):
        for ell in range(1, kj + 1):
            if gf2._insert(basis, gens.row(j, ell)):
                r += 1
        target ^= gens.row(j, kj + 1)
    if gf2._residual(basis, target):
        return GainValue.zero()
    return GainValue(gens.m - r)


def gain_bruteforce(points: NetPoints, idx: SubsetIndex) -> Fraction:
    """Gain coefficient straight from the definition: the pairwise sum.

    Each pair of points contributes the product over ``j in u`` of
    +1 / -1 / 0 according to whether coordinates i and i' agree to more
    than, exactly, or fewer than ``k_j`` leading bits; the total is divided
    by n.  Exact integer arithmetic; O(n^2) time, so meant for modest nets.
    """
    if idx.u[-1] > points.s:
        raise ValueError(f"subset {idx.u} exceeds dimension s={points.s}")
    n = points.n
    if n <= 2048:
        prod = None
        for j, kj in zip(idx.u, idx.k):
            depth = points.match_depth_matrix(j)
            factor = (depth > kj).astype(np.int8) - (depth == kj).astype(np.int8)
            prod = factor if prod is None else prod * factor
        total = int(prod.astype(np.int64).sum())
    else:
        total = _bruteforce_chunked(points, idx)
    return Fraction(total, n)


def _bruteforce_chunked(points: NetPoints, idx: SubsetIndex) -> int:
    from .netgen import _match_depth

    n, m = points.n, points.m
    cols = [points.coords[:, j - 1] for j in idx.u]
    total = 0
    for start in range(0, n, _BRUTE_CHUNK):
        stop = min(start + _BRUTE_CHUNK, n)
        prod = None
        for col, kj in zip(cols, idx.k):
            xor = col[start:stop, None] ^ col[None, :]
            depth = _match_depth(xor, m)
            factor = (depth > kj).astype(np.int8) - (depth == kj).astype(np.int8)
            prod = factor if prod is None else prod * factor
        total += int(prod.astype(np.int64).sum())
    return total


def gain_representation(
    gens: GeneratorSet, idx: SubsetIndex, *, nullspace_log2_limit: int = NULLSPACE_LOG2_LIMIT
) -> int:
    """Gain coefficient as a signed count over the stacked matrix nullspace.

    Walks all indices whose stacked image is zero and adds the sign given
    by the parity of "next row fires" events.  Sign patterns are linear in
    the index, so a Gray-code walk updates them in O(1) per state.

    Raises :class:`ResourceLimitError` when the nullspace has more than
    ``2**nullspace_log2_limit`` elements; use :func:`gain_fast` there.
    """
    gens.validate_index(idx)
    cuk = assemble_cuk(gens, idx)
    null = gf2.nullspace_basis(cuk)
    dim = len(null)
    if dim > nullspace_log2_limit:
        raise ResourceLimitError(
            f"nullspace has 2^{dim} elements (limit 2^{nullspace_log2_limit})"
        )
    nabla = [gens.row(j, kj + 1) for j, kj in zip(idx.u, idx.k)]
    # pattern of one basis vector: which selected next-rows it trips
    patkeys = []
    for vec in null:
        pat = 0
        for g in nabla:
            pat = (pat << 1) | ((g & vec.bits).bit_count() & 1)
        patkeys.append(pat)
    total = 1  # the zero index: all-match, sign +1
    pat = 0
    for step in range(1, 1 << dim):
        pat ^= patkeys[(step & -step).bit_length() - 1]
        total += 1 - 2 * (pat.bit_count() & 1)
    return total


def max_gain(gens: GeneratorSet) -> tuple[GainValue, SubsetIndex]:
    """Largest gain coefficient over all (u, k), with a witness attaining it.

    If the first rows of the generators are linearly dependent the maximum
    is ``2**m``, witnessed at depth zero by a minimal dependent subset.
    Otherwise it is ``2**(t*_{1:s} + s - 1)``; the witness is rebuilt from
    the vanishing row combination of the shallowest deficient full-subset
    stack: drop the coordinates whose deepest row does not participate, and
    step every surviving depth down by one.
    """
    s, m = gens.s, gens.m
    first_rows = [gens.row(j, 1) for j in range(1, s + 1)]
    if gf2.rank_of_rows(first_rows) < s:
        u = _minimal_dependent_first_rows(gens)
        return GainValue(m), SubsetIndex(u, (0,) * len(u))

    full = tuple(range(1, s + 1))
    kstar = first_rank_deficient_k(gens, full)
    rows = []
    for j, kj in zip(full, kstar):
        rows.extend(gens.row(j, ell) for ell in range(1, kj + 1))
    dep = gf2.row_dependency(BitMatrix(m, tuple(rows)))
    assert dep is not None, "kstar stack must be rank deficient"
    nrows = sum(kstar)
    v = []
    offset = 0
    for j, kj in zip(full, kstar):
        last = offset + kj - 1
        if (dep.bits >> (nrows - 1 - last)) & 1:
            v.append(j)
        offset += kj
    assert v, "a minimal deficient stack always uses some deepest row"
    witness = SubsetIndex(tuple(v), tuple(kstar[j - 1] - 1 for j in v))
    return GainValue(m + s - sum(kstar)), witness


def _minimal_dependent_first_rows(gens: GeneratorSet) -> tuple[int, ...]:
    """Smallest (by size, then lex) subset whose first rows are dependent."""
    s = gens.s
    first_rows = {j: gens.row(j, 1) for j in range(1, s + 1)}
    if s <= 20:
        for r in range(1, s + 1):
            for u in itertools.combinations(range(1, s + 1), r):
                if gf2.rank_of_rows([first_rows[j] for j in u]) < r:
                    return u
        raise AssertionError("unreachable: caller checked dependence")
    # too many subsets: take the circuit found by elimination instead
    dep = gf2.row_dependency(BitMatrix(gens.m, tuple(first_rows[j] for j in range(1, s + 1))))
    assert dep is not None
    return tuple(j for j in range(1, s + 1) if (dep.bits >> (s - j)) & 1)


def gain_bounds(gens: GeneratorSet, idx: SubsetIndex) -> dict[str, int]:
    """Every applicable upper bound for the gain at ``idx``, by name.

    "rank" is ``2**(m - rank)`` of the stacked matrix; "t", "t_u" and
    "t_star_u" are ``2**(param + |u| - 1)``.  The t* bound only applies
    when the one-row-per-coordinate stack over ``u`` has full rank, so it
    is omitted otherwise.
    """
    gens.validate_index(idx)
    m = gens.m
    order = idx.order
    r = gf2.rank(assemble_cuk(gens, idx))
    out = {
        "rank": 1 << (m - r),
        "t": 1 << (t_value(gens) + order - 1),
        "t_u": 1 << (t_u(gens, idx.u) + order - 1),
    }
    ones = [gens.row(j, 1) for j in idx.u]
    if gf2.rank_of_rows(ones) == order:
        out["t_star_u"] = 1 << (t_star_u(gens, idx.u) + order - 1)
    return out


@dataclass
class GainReport:
    """Result of an enumeration sweep over (u, k) pairs."""

    entries: list[tuple[SubsetIndex, GainValue]]
    gamma_max: GainValue
    attaining: SubsetIndex | None
    theoretical: GainValue
    attained_theoretical: bool
    bounds: dict[str, int]
    visited: int
    truncated: bool
    max_depth: int
    bound_violations: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "visited": self.visited,
            "truncated": self.truncated,
            "gamma_max_log2": self.gamma_max.log2,
            "attaining": None
            if self.attaining is None
            else {"u": list(self.attaining.u), "k": list(self.attaining.k)},
            "theoretical_log2": self.theoretical.log2,
            "attained_theoretical": self.attained_theoretical,
            "bounds": self.bounds,
            "bound_violations": self.bound_violations,
            "entries": [
                {"u": list(ix.u), "k": list(ix.k), "log2_gain": gv.log2}
                for ix, gv in self.entries
            ],
        }

    def write_csv(self, stream: TextIO) -> None:
        stream.write("u,k,log2_gain\n")
        for ix, gv in self.entries:
            stream.write(f"{' '.join(map(str, ix.u))},{' '.join(map(str, ix.k))},{gv.log2}\n")


def _entry_key(idx: SubsetIndex) -> tuple:
    return (idx.order, idx.u, idx.depth, idx.k)


def _enumerate_subset(
    gens: GeneratorSet,
    u: tuple[int, ...],
    max_depth: int,
    cap: int,
    t: int,
    budget: int | None,
) -> tuple[list, int, list, bool]:
    entries = []
    violations = []
    visited = 0
    truncated = False
    clamp = min(t + len(u) - 1, gens.m)
    for k in bounded_vectors(len(u), cap, max_depth):
        if budget is not None and visited >= budget:
            truncated = True
            break
        visited += 1
        idx = SubsetIndex(u, k)
        gv = gain_fast(gens, idx)
        if not gv.is_zero:
            entries.append((idx, gv))
            if gv.log2 > clamp:
                violations.append({"u": list(u), "k": list(k), "log2_gain": gv.log2})
    return entries, visited, violations, truncated


def enumerate_gains(
    gens: GeneratorSet,
    max_depth: int,
    u_filter: Sequence[Sequence[int]] | None = None,
    *,
    max_visits: int | None = None,
    threads: int = 0,
) -> GainReport:
    """Visit every (u, k) with ``|k| <= max_depth`` and record nonzero gains.

    Depths are capped at ``m + 1`` per coordinate since the zero-row
    padding makes gains stationary from depth ``m`` on.  Each nonzero gain
    is checked against the clamped t bound on the fly.  ``max_visits``
    truncates the sweep (the report then carries ``truncated=True``);
    ``threads > 1`` splits the subsets over a thread pool with a
    deterministic merge, and is ignored when a budget is set.
    """
    if max_depth < 0:
        raise ValueError(f"max_depth must be >= 0, got {max_depth}")
    s, m = gens.s, gens.m
    cap = m + 1
    if u_filter is None:
        subsets = [
            u
            for r in range(1, s + 1)
            for u in itertools.combinations(range(1, s + 1), r)
        ]
    else:
        subsets = []
        for u in u_filter:
            idx = SubsetIndex(tuple(u), (0,) * len(u))
            gens.validate_index(idx)
            subsets.append(idx.u)
        subsets.sort(key=lambda u: (len(u), u))
    t = t_value(gens)

    results = []
    if threads > 1 and max_visits is None:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(
                    lambda u: _enumerate_subset(gens, u, max_depth, cap, t, None), subsets
                )
            )
    else:
        budget = max_visits
        for u in subsets:
            out = _enumerate_subset(gens, u, max_depth, cap, t, budget)
            results.append(out)
            if budget is not None:
                budget -= out[1]
                if out[3]:
                    break

    entries: list[tuple[SubsetIndex, GainValue]] = []
    violations: list[dict] = []
    visited = 0
    truncated = False
    for ent, vis, vio, trunc in results:
        entries.extend(ent)
        violations.extend(vio)
        visited += vis
        truncated = truncated or trunc

    gamma = GainValue.zero()
    attaining = None
    for idx, gv in entries:
        if gv > gamma or (gv == gamma and attaining is not None and _entry_key(idx) < _entry_key(attaining)):
            gamma, attaining = gv, idx

    theoretical, _ = max_gain(gens)
    bounds = gain_bounds(gens, attaining) if attaining is not None else {}
    return GainReport(
        entries=entries,
        gamma_max=gamma,
        attaining=attaining,
        theoretical=theoretical,
        attained_theoretical=(gamma == theoretical),
        bounds=bounds,
        visited=visited,
        truncated=truncated,
        max_depth=max_depth,
        bound_violations=violations,
    )


__all__ = [
    "NULLSPACE_LOG2_LIMIT",
    "ResourceLimitError",
    "GainValue",
    "GainReport",
    "gain_fast",
    "gain_bruteforce",
    "gain_representation",
    "max_gain",
    "gain_bounds",
    "enumerate_gains",
]
