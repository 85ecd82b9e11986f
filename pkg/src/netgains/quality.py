"""Quality parameters of digital nets in base 2.

Two independent routes to the same quantities live here.  The algebraic
route works on generator matrices: the t parameter is ``m + 1`` minus the
smallest total depth at which some stacked row matrix goes rank deficient,
and the subset-restricted variants ``t_u`` / ``t_star_u`` restrict which
depth vectors compete.  The combinatorial route counts points in dyadic
boxes (:func:`verify_net_by_counting`, :func:`microstructure_A`) and never
touches a matrix, which makes it the oracle for the algebraic route.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .gf2 import rank_of_rows
from .netgen import GeneratorSet, NetPoints, generate_points

_PACK_LIMIT = 64  # total key bits that still fit one uint64 per point


def compositions(total: int, parts: int, lo: int = 0, hi: int | None = None) -> Iterator[tuple[int, ...]]:
    """All ``parts``-tuples with entries in [lo, hi] summing to ``total``, lex order."""
    if hi is None:
        hi = total
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if lo <= total <= hi:
            yield (total,)
        return
    for head in range(lo, min(hi, total - lo * (parts - 1)) + 1):
        for tail in compositions(total - head, parts - 1, lo, hi):
            yield (head,) + tail


def bounded_vectors(parts: int, cap: int, max_total: int) -> Iterator[tuple[int, ...]]:
    """All ``parts``-tuples with entries in [0, cap] and sum <= ``max_total``."""
    if parts == 0:
        yield ()
        return
    for head in range(0, min(cap, max_total) + 1):
        for tail in bounded_vectors(parts - 1, cap, max_total - head):
            yield (head,) + tail


def _ceil_log2(count: int) -> int:
    return (count - 1).bit_length()


def _stack_rank_deficient(gens: GeneratorSet, u: Sequence[int], k: Sequence[int]) -> bool:
    rows = []
    for j, kj in zip(u, k):
        rows.extend(gens.row(j, ell) for ell in range(1, kj + 1))
    return rank_of_rows(rows) < len(rows)


def first_rank_deficient_k(gens: GeneratorSet, u: Sequence[int]) -> tuple[int, ...]:
    """Minimal-total ``k >= 1`` (lex-first among minima) whose stack is deficient.

    The search terminates: any stack with more than ``m`` rows is deficient,
    and so is any stack containing the all-zero row ``m + 1``.
    """
    m = gens.m
    order = len(u)
    for total in range(order, max(order, m + 1) + 1):
        for k in compositions(total, order, lo=1, hi=m + 1):
            if _stack_rank_deficient(gens, u, k):
                return k
    raise AssertionError("unreachable: depth m+1 stacks are always deficient")


def t_star_u(gens: GeneratorSet, u: Sequence[int]) -> int:
    """Subset quality parameter restricted to depth vectors >= 1 componentwise.

    Equals ``m + 1 - |u|`` when already the one-row-per-coordinate stack is
    deficient (which makes it negative once ``|u| > m + 1``).
    """
    u = _checked_subset(gens, u)
    return gens.m + 1 - sum(first_rank_deficient_k(gens, u))


def t_u(gens: GeneratorSet, u: Sequence[int]) -> int:
    """Quality parameter of the projection onto ``u``; max of t* over subsets."""
    u = _checked_subset(gens, u)
    return max(
        t_star_u(gens, v)
        for r in range(1, len(u) + 1)
        for v in itertools.combinations(u, r)
    )


def t_d(gens: GeneratorSet, d: int) -> int:
    """Worst t_u over all subsets of at most ``d`` coordinates."""
    if not 1 <= d <= gens.s:
        raise ValueError(f"d must be in [1, {gens.s}], got {d}")
    return max(
        t_star_u(gens, v)
        for r in range(1, d + 1)
        for v in itertools.combinations(range(1, gens.s + 1), r)
    )


def _checked_subset(gens: GeneratorSet, u: Sequence[int]) -> tuple[int, ...]:
    u = tuple(u)
    if not u:
        raise ValueError("u must be nonempty")
    if any(b <= a for a, b in zip(u, u[1:])) or u[0] < 1 or u[-1] > gens.s:
        raise ValueError(f"u must be a sorted subset of 1..{gens.s}, got {u}")
    return u


def t_value(gens: GeneratorSet) -> int:
    """The net's t parameter, from ranks of stacked generator rows.

    Scans total depth from ``m`` downward; deficient depths form an upward
    closed set, so the first clean level pins the minimum deficient total.
    Larger totals fail earliest for typical matrices, which is what makes
    the downward order cheap.
    """
    s, m = gens.s, gens.m
    coords = range(1, s + 1)
    for level in range(m, 0, -1):
        deficient = False
        for r in range(1, min(s, level) + 1):
            for u in itertools.combinations(coords, r):
                for k in compositions(level, r, lo=1, hi=m):
                    if _stack_rank_deficient(gens, u, k):
                        deficient = True
                        break
                if deficient:
                    break
            if deficient:
                break
        if not deficient:
            return min(m - level, m)
    return m


# --- counting route ----------------------------------------------------------

def _cell_counts(points: NetPoints, k: Sequence[int]) -> np.ndarray:
    """Occupancy counts of the nonempty depth-``k`` dyadic cells."""
    m = points.m
    depths = [min(int(kj), m) for kj in k]
    if sum(depths) <= _PACK_LIMIT:
        key = np.zeros(points.n, dtype=np.uint64)
        for j, kj in enumerate(depths):
            key <<= np.uint64(kj)
            key |= points.coords[:, j] >> np.uint64(m - kj)
        _, counts = np.unique(key, return_counts=True)
    else:
        shifted = points.coords >> np.array([m - kj for kj in depths], dtype=np.uint64)
        _, counts = np.unique(shifted, axis=0, return_counts=True)
    return counts


def verify_net_by_counting(points: NetPoints, t: int) -> bool:
    """Check the defining balance property directly on the points.

    True iff every dyadic box of total depth at most ``m - t`` holds exactly
    ``2**(m - depth)`` points.  Deep levels are checked first since an
    unbalanced net usually fails there.
    """
    m = points.m
    if not 0 <= t <= m:
        raise ValueError(f"t must be in [0, {m}], got {t}")
    for level in range(m - t, -1, -1):
        want = 1 << (m - level)
        for k in compositions(level, points.s, lo=0, hi=min(level, m)):
            counts = _cell_counts(points, k)
            if counts.min() != want or counts.max() != want:
                return False
    return True


def minimal_counting_t(points: NetPoints) -> int:
    """Smallest t accepted by :func:`verify_net_by_counting` (m always is)."""
    for t in range(points.m + 1):
        if verify_net_by_counting(points, t):
            return t
    raise AssertionError("unreachable: t = m leaves a single box")


def microstructure_A(points: NetPoints, k: Sequence[int]) -> int:
    """Ceiling log2 of the fullest depth-``k`` dyadic cell."""
    if points.n == 0:
        raise ValueError("empty point set")
    k = tuple(int(kj) for kj in k)
    if len(k) != points.s:
        raise ValueError(f"k must have {points.s} entries, got {len(k)}")
    if any(kj < 0 for kj in k):
        raise ValueError(f"negative depth in {k}")
    return _ceil_log2(int(_cell_counts(points, k).max()))


def microstructure_AK(points: NetPoints, total: int) -> int:
    """Worst :func:`microstructure_A` over all depth vectors summing to ``total``.

    Depths beyond ``m`` in one coordinate see no further digits, so vectors
    with an oversized entry collapse onto clamped ones; past ``m`` the
    single-coordinate vectors ``(0,..,m,..,0)`` dominate every collapsed
    shape and stand in for all of them.
    """
    if total < 0:
        raise ValueError(f"total depth must be >= 0, got {total}")
    m, s = points.m, points.s
    best = 0
    seen = False
    for k in compositions(total, s, lo=0, hi=min(total, m)):
        best = max(best, microstructure_A(points, k))
        seen = True
    if total > m:
        for j in range(s):
            k = tuple(m if jj == j else 0 for jj in range(s))
            best = max(best, microstructure_A(points, k))
            seen = True
    if not seen:
        raise AssertionError("unreachable: some depth vector always exists")
    return best


# --- report -------------------------------------------------------------------

SUBSET_ENUMERATION_LIMIT = 16


@dataclass
class QualityReport:
    """t and friends for one net; subset maps may be partial for large s."""

    s: int
    m: int
    t: int
    t_d: dict[int, int]
    t_u: dict[tuple[int, ...], int]
    t_star_u: dict[tuple[int, ...], int]
    a_k: dict[int, int] = field(default_factory=dict)
    subsets_complete: bool = True

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "m": self.m,
            "t": self.t,
            "t_d": {str(d): v for d, v in sorted(self.t_d.items())},
            "t_u": [{"u": list(u), "value": v} for u, v in sorted(self.t_u.items())],
            "t_star_u": [
                {"u": list(u), "value": v} for u, v in sorted(self.t_star_u.items())
            ],
            "A_K": {str(kk): v for kk, v in sorted(self.a_k.items())},
            "subsets_complete": self.subsets_complete,
        }


def quality_report(
    gens: GeneratorSet,
    *,
    points: NetPoints | None = None,
    a_k_max: int | None = None,
    all_subsets: bool | None = None,
) -> QualityReport:
    """Full quality summary of a net.

    Subset tables need 2**s searches, so for ``s > 16`` they are skipped
    unless ``all_subsets=True`` is passed explicitly; the full-set and
    singleton entries are always present.  ``a_k_max`` bounds the A_K table
    (default ``m``).
    """
    s, m = gens.s, gens.m
    full = tuple(range(1, s + 1))
    if all_subsets is None:
        all_subsets = s <= SUBSET_ENUMERATION_LIMIT

    star: dict[tuple[int, ...], int] = {}
    if all_subsets:
        for r in range(1, s + 1):
            for u in itertools.combinations(full, r):
                star[u] = t_star_u(gens, u)
    else:
        for j in full:
            star[(j,)] = t_star_u(gens, (j,))
        star[full] = t_star_u(gens, full)

    tu: dict[tuple[int, ...], int] = {}
    td: dict[int, int] = {}
    if all_subsets:
        # subset DP: t_u is the running max of t* over sub-subsets
        for u in sorted(star, key=lambda u: (len(u), u)):
            best = star[u]
            if len(u) > 1:
                for drop in range(len(u)):
                    best = max(best, tu[u[:drop] + u[drop + 1 :]])
            tu[u] = best
        by_size = 0
        for d in range(1, s + 1):
            by_size = max(by_size, max(v for u, v in star.items() if len(u) == d))
            td[d] = by_size
        t = td[s]
    else:
        t = t_value(gens)
        tu[full] = t
        for j in full:
            tu[(j,)] = star[(j,)]
        td[s] = t

    pts = points if points is not None else generate_points(gens)
    bound = m if a_k_max is None else a_k_max
    a_k = {kk: microstructure_AK(pts, kk) for kk in range(0, bound + 1)}

    return QualityReport(
        s=s, m=m, t=t, t_d=td, t_u=tu, t_star_u=star, a_k=a_k,
        subsets_complete=all_subsets,
    )


__all__ = [
    "compositions",
    "bounded_vectors",
    "first_rank_deficient_k",
    "t_value",
    "t_star_u",
    "t_u",
    "t_d",
    "verify_net_by_counting",
    "minimal_counting_t",
    "microstructure_A",
    "microstructure_AK",
    "QualityReport",
    "quality_report",
    "SUBSET_ENUMERATION_LIMIT",
]
