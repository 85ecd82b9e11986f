"""Sweep machinery: determinism and failure surfacing."""

import random

import pytest

from netgains.gains import gain_fast
from netgains.gf2 import BitMatrix
from netgains.netgen import GeneratorSet, SubsetIndex
from netgains.suites import (
    evaluate_net,
    random_generator_set,
    suites_from_records,
    sweep_records,
)


def test_sweep_is_deterministic():
    a = sweep_records(5, max_s=3, max_m=4, seed=5)
    b = sweep_records(5, max_s=3, max_m=4, seed=5)
    assert [(r.s, r.m, r.t, r.triples) for r in a] == [(r.s, r.m, r.t, r.triples) for r in b]


def test_random_generator_shapes():
    rng = random.Random(0)
    gens = random_generator_set(rng, 3, 5)
    assert gens.s == 3 and gens.m == 5


def test_evaluate_net_counts_full_box():
    gens = GeneratorSet((BitMatrix.identity(3),))
    rec = evaluate_net(gens)
    assert rec.triples == 3 + 2  # k in 0..m+1 for the single coordinate
    assert rec.oracles_agree and rec.attained and rec.witness_ok


def test_suites_surface_failures():
    records = sweep_records(3, max_s=2, max_m=3, seed=1)
    records[1].oracle_mismatches = 1  # simulate a broken route
    results = suites_from_records(records, ["power-of-two", "t-crossval"])
    by_name = {r.name: r for r in results}
    assert not by_name["power-of-two"].passed
    assert by_name["power-of-two"].failures[0]["net"] == 1
    assert by_name["t-crossval"].passed


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        suites_from_records([], ["bogus"])


def test_identity_entries_start_with_maximum(shift):
    from netgains.suites import _identity_entries

    picks = _identity_entries(shift, 3)
    assert len(picks) == 3
    assert gain_fast(shift, picks[0]).log2 == 3
    assert all(isinstance(p, SubsetIndex) for p in picks)
    assert all(not gain_fast(shift, p).is_zero for p in picks)
