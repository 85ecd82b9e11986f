"""Cross-validation sweeps: every computational route against every other.

A sweep draws random generator sets, walks the whole (u, k) box with
per-coordinate depths up to ``m + 1``, and evaluates each gain coefficient
three ways (pairwise sum, nullspace count, rank test).  The per-net record
carries everything the individual property suites assert about: exact
agreement of the three routes, power-of-two values, bound domination, the
forced-zero region, rank-derived t versus counting t, and attainment of
the closed-form maximum by the enumerated maximum.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .gains import gain_bruteforce, gain_fast, gain_representation, max_gain
from .gf2 import BitMatrix, rank_of_rows
from .netgen import GeneratorSet, SubsetIndex, generate_points
from .quality import bounded_vectors, minimal_counting_t, t_value
from .samples import shift_net, sobol_net
from .scramble import ScrambleKind, ScrambleSpec, scramble, verify_gain_identity

_MAX_FAILURES = 20


def random_generator_set(rng: random.Random, s: int, m: int) -> GeneratorSet:
    """Uniformly random s matrices of m x m fair bits."""
    limit = 1 << m
    mats = tuple(
        BitMatrix(m, tuple(rng.randrange(limit) for _ in range(m))) for _ in range(s)
    )
    return GeneratorSet(mats)


@dataclass
class NetRecord:
    """Aggregated check results of one net over the full (u, k) box."""

    s: int
    m: int
    t: int
    counting_t: int
    closed_form_log2: int
    witness_ok: bool
    enum_max_log2: int | None
    triples: int
    oracle_mismatches: int
    non_power_values: int
    chain_violations: int
    zero_region_violations: int
    failures: list[dict] = field(default_factory=list)

    @property
    def oracles_agree(self) -> bool:
        return self.oracle_mismatches == 0 and self.non_power_values == 0

    @property
    def attained(self) -> bool:
        return self.enum_max_log2 == self.closed_form_log2


def evaluate_net(gens: GeneratorSet, *, with_counting: bool = True) -> NetRecord:
    """Run all three gain routes over the full depth box and tally failures."""
    s, m = gens.s, gens.m
    points = generate_points(gens)
    t = t_value(gens)
    counting = minimal_counting_t(points) if with_counting else t
    cap = m + 1

    mismatches = non_power = chain_bad = zero_bad = 0
    enum_max: int | None = None
    triples = 0
    failures: list[dict] = []

    def note(kind: str, u, k, **extra) -> None:
        if len(failures) < _MAX_FAILURES:
            failures.append({"kind": kind, "u": list(u), "k": list(k), **extra})

    for r in range(1, s + 1):
        for u in itertools.combinations(range(1, s + 1), r):
            for k in bounded_vectors(r, cap, r * cap):
                idx = SubsetIndex(u, k)
                triples += 1
                fast = gain_fast(gens, idx)
                brute = gain_bruteforce(points, idx)
                middle = gain_representation(gens, idx)
                if not (brute == fast.as_int == middle):
                    mismatches += 1
                    note("oracle", u, k, fast=fast.as_int, brute=str(brute), middle=middle)
                    continue
                value = fast.as_int
                if value and (value & (value - 1) or value > (1 << m)):
                    non_power += 1
                    note("non_power", u, k, value=value)
                if not fast.is_zero:
                    if enum_max is None or fast.log2 > enum_max:
                        enum_max = fast.log2
                    # nonzero gains obey 2^(m-rank) <= 2^(t+|u|-1) clamped at 2^m
                    rows = []
                    for j, kj in zip(u, k):
                        rows.extend(gens.row(j, ell) for ell in range(1, kj + 1))
                    rank = rank_of_rows(rows)
                    clamp = min(t + r - 1, m)
                    if not (fast.log2 == m - rank <= clamp):
                        chain_bad += 1
                        note("chain", u, k, log2=fast.log2, rank=rank, clamp=clamp)
                    if r + sum(k) <= m - t:
                        zero_bad += 1
                        note("zero_region", u, k, log2=fast.log2)

    closed, witness = max_gain(gens)
    witness_ok = gain_fast(gens, witness) == closed
    return NetRecord(
        s=s,
        m=m,
        t=t,
        counting_t=counting,
        closed_form_log2=closed.log2,
        witness_ok=witness_ok,
        enum_max_log2=enum_max,
        triples=triples,
        oracle_mismatches=mismatches,
        non_power_values=non_power,
        chain_violations=chain_bad,
        zero_region_violations=zero_bad,
        failures=failures,
    )


def sweep_records(
    trials: int,
    *,
    max_s: int = 4,
    max_m: int = 6,
    min_m: int = 2,
    seed: int = 0,
    with_counting: bool = True,
) -> list[NetRecord]:
    """Evaluate ``trials`` random nets drawn from the given size ranges."""
    rng = random.Random(seed)
    records = []
    for _ in range(trials):
        s = rng.randint(1, max_s)
        m = rng.randint(min_m, max_m)
        records.append(evaluate_net(random_generator_set(rng, s, m), with_counting=with_counting))
    return records


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    failures: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.name,
            "pass": self.passed,
            "checked": self.checked,
            "failures": self.failures[:_MAX_FAILURES],
        }


def _collect(records: list[NetRecord], name: str, bad_count, kinds: tuple[str, ...]) -> SuiteResult:
    failures = []
    checked = 0
    for i, rec in enumerate(records):
        checked += rec.triples
        if bad_count(rec):
            failures.append(
                {
                    "net": i,
                    "s": rec.s,
                    "m": rec.m,
                    "details": [f for f in rec.failures if f["kind"] in kinds],
                }
            )
    return SuiteResult(name, not failures, checked, failures)


def suites_from_records(records: list[NetRecord], names: list[str]) -> list[SuiteResult]:
    out = []
    for name in names:
        if name == "power-of-two":
            out.append(
                _collect(
                    records,
                    name,
                    lambda r: r.oracle_mismatches or r.non_power_values,
                    ("oracle", "non_power"),
                )
            )
        elif name == "bound-chain":
            out.append(_collect(records, name, lambda r: r.chain_violations, ("chain",)))
        elif name == "zero-region":
            out.append(
                _collect(records, name, lambda r: r.zero_region_violations, ("zero_region",))
            )
        elif name == "t-crossval":
            result = SuiteResult(name, True, len(records))
            for i, rec in enumerate(records):
                if rec.t != rec.counting_t:
                    result.failures.append(
                        {"net": i, "s": rec.s, "m": rec.m, "t": rec.t, "counting_t": rec.counting_t}
                    )
            result.passed = not result.failures
            out.append(result)
        elif name == "attainment":
            result = SuiteResult(name, True, len(records))
            for i, rec in enumerate(records):
                if not (rec.attained and rec.witness_ok):
                    result.failures.append(
                        {
                            "net": i,
                            "s": rec.s,
                            "m": rec.m,
                            "enum_max_log2": rec.enum_max_log2,
                            "closed_form_log2": rec.closed_form_log2,
                            "witness_ok": rec.witness_ok,
                        }
                    )
            result.passed = not result.failures
            out.append(result)
        else:
            raise ValueError(f"unknown sweep suite {name!r}")
    return out


SWEEP_SUITES = ("power-of-two", "bound-chain", "zero-region", "t-crossval", "attainment")


def net_preservation_suite(seeds: int = 100, *, seed0: int = 0) -> SuiteResult:
    """Scrambling of either fixture must keep every ball count intact."""
    from .quality import verify_net_by_counting

    result = SuiteResult("net-preservation", True, 0)
    for label, gens in (("shift_net", shift_net()), ("sobol_2d", sobol_net(2, 4))):
        points = generate_points(gens)
        t = t_value(gens)
        for kind in ScrambleKind:
            for i in range(seeds):
                spec = ScrambleSpec(kind=kind, output_bits=gens.m, seed=seed0 + i)
                scrambled = scramble(points, spec).to_net_points()
                result.checked += 1
                if not verify_net_by_counting(scrambled, t):
                    result.failures.append(
                        {"fixture": label, "kind": kind.value, "seed": seed0 + i}
                    )
    result.passed = not result.failures
    return result


def gain_identity_suite(
    replicates: int = 10_000, *, seed: int = 0, entries: int = 3
) -> SuiteResult:
    """Empirical variance of the shift net against its nonzero gains."""
    gens = shift_net()
    picks = _identity_entries(gens, entries)
    result = SuiteResult("gain-identity", True, 0)
    for idx in picks:
        report = verify_gain_identity(
            gens,
            idx,
            replicates,
            ScrambleSpec(kind=ScrambleKind.RANDOM_LINEAR, seed=seed),
        )
        result.checked += 1
        if not report.passed:
            result.failures.append(report.to_json_dict())
    result.passed = not result.failures
    return result


def _identity_entries(gens: GeneratorSet, count: int) -> list[SubsetIndex]:
    """Deterministic nonzero-gain picks: the maximum plus the first others."""
    from .gains import enumerate_gains

    report = enumerate_gains(gens, max_depth=gens.s * (gens.m + 1))
    assert report.attaining is not None
    picks = [report.attaining]
    for idx, _ in sorted(report.entries, key=lambda e: (e[0].order, e[0].u, e[0].depth, e[0].k)):
        if idx not in picks:
            picks.append(idx)
        if len(picks) == count:
            break
    return picks


__all__ = [
    "SWEEP_SUITES",
    "random_generator_set",
    "NetRecord",
    "evaluate_net",
    "sweep_records",
    "SuiteResult",
    "suites_from_records",
    "net_preservation_suite",
    "gain_identity_suite",
]
