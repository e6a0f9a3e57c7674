import random

import pytest
from hypothesis import given, settings

from drsynth.core import Interaction, NetType
from drsynth.reductions import build
from drsynth.regions import SeparationAtom, enumerate_atoms, restriction_count, solves
from drsynth.solver import (SeedLimitExceeded, Stats, SynthesisProblem,
                            enumerate_d_restricted_regions, first_solving_region_plain,
                            first_solving_regions, iter_seeds, seed_count, solve_single_atom,
                            synthesize)

from conftest import TAU0, TAU1, TYPES, small_ts
import oracles


def keys(regions):
    return {oracles.key(r.support, {e: i.value for e, i in r.signature.items()}) for r in regions}


def test_seed_count_a1(a1):
    assert seed_count(1, TAU1, 1) == 8
    seeds = list(iter_seeds(a1, TAU1, 1))
    assert len(seeds) == 8
    assert [(b, s["a"].value) for b, s in seeds] == [
        (0, "nop"), (1, "nop"), (0, "set"), (1, "set"), (0, "swap"), (1, "swap"), (0, "used"), (1, "used")]


def test_seed_order_levels_then_subsets(a2):
    seeds = list(iter_seeds(a2, NetType.of("nop", "set"), 2))
    sigs = [tuple(s[e].value for e in a2.events) for _, s in seeds[::2]]
    assert sigs == [("nop", "nop"), ("set", "nop"), ("nop", "set"), ("set", "set")]


def test_d0_gives_constant_regions(a2):
    regions = list(enumerate_d_restricted_regions(a2, TAU1, 0))
    assert [sorted(set(r.support.values())) for r in regions] == [[0], [1]]
    assert all(restriction_count(r) == 0 for r in regions)


def test_a2_d2_contains_r2(a2):
    found = [r for r in enumerate_d_restricted_regions(a2, TAU1, 2)
             if r.signature["b"] is Interaction.SET and r.signature["c"] is Interaction.SWAP]
    assert [r.support for r in found] == [{"r0": 0, "r1": 1}]


def test_synth_a1_tau1(a1):
    result = synthesize(SynthesisProblem(a1, TAU1, 1))
    assert result.solvable
    assert [r.signature["a"] for r in result.admissible] == [Interaction.SWAP]
    assert result.admissible[0].support == {"s0": 0, "s1": 1}


def test_synth_a1_tau0(a1):
    result = synthesize(SynthesisProblem(a1, TAU0, 1))
    assert result.verdict == "unsolvable"
    assert result.unsolved_atoms == [SeparationAtom.ssp("s0", "s1")]
    assert result.admissible == []


def test_synth_a2_tau1(a2):
    for d in (2, len(a2.events), 6):
        result = synthesize(SynthesisProblem(a2, TAU1, d))
        assert [str(a) for a in result.unsolved_atoms] == ["ESSP b r1", "ESSP c r0"]


def test_single_atom(a2):
    ssp = SeparationAtom.ssp("r0", "r1")
    r = solve_single_atom(a2, TAU1, 2, ssp)
    assert r is not None and solves(r, ssp) and restriction_count(r) <= 2
    brute = oracles.restricted(oracles.all_regions(a2, TAU1), 1)
    expect = any(oracles.solves(s, g, ("SSP", "r0", "r1")) for s, g in brute)
    assert (solve_single_atom(a2, TAU1, 1, ssp) is not None) == expect
    assert solve_single_atom(a2, TAU1, 0, ssp) is None


def test_single_atom_rejects_foreign(a2):
    with pytest.raises(ValueError):
        solve_single_atom(a2, TAU1, 1, SeparationAtom.essp("b", "r0"))
    with pytest.raises(ValueError):
        solve_single_atom(a2, TAU1, 1, SeparationAtom.ssp("r0", "zz"))


def test_problem_validation(a2):
    with pytest.raises(ValueError):
        SynthesisProblem(a2, TAU1, -1)
    with pytest.raises(ValueError):
        SynthesisProblem(a2, NetType.of("set", "swap"), 1)
    SynthesisProblem(a2, NetType.of("set", "swap"), 2)


def test_without_nop_every_event_counts(a2):
    type = NetType.of("set", "res", "swap")
    assert seed_count(2, type, 5) == 2 * 3 ** 2
    regions = list(enumerate_d_restricted_regions(a2, type, 2))
    assert keys(regions) == keys_of_brute(a2, type, 2)


def keys_of_brute(ts, type, d):
    return {oracles.key(s, g) for s, g in oracles.restricted(oracles.all_regions(ts, type), d)}


@settings(max_examples=40, deadline=None)
@given(small_ts())
def test_enumerator_equals_brute_force(ts):
    for type in TYPES:
        for d in sorted({0, 1, 2, len(ts.events)}):
            stats = Stats()
            regions = list(enumerate_d_restricted_regions(ts, type, d, stats))
            assert keys(regions) == keys_of_brute(ts, type, d)
            assert len(regions) == len(keys(regions))
            assert stats.seeds_tried == seed_count(len(ts.events), type, d)
            assert stats.valid_regions == len(regions)


@settings(max_examples=40, deadline=None)
@given(small_ts())
def test_synthesis_matches_brute_force(ts):
    for type in TYPES:
        for d in sorted({0, 1, 2, len(ts.events)}):
            result = synthesize(SynthesisProblem(ts, type, d))
            solved, every = oracles.brute_solvable(ts, type, d)
            unsolved = [(a.kind, a.first, a.second) for a in result.unsolved_atoms]
            assert unsolved == [a for a in every if a not in solved]
            assert result.solvable == (len(solved) == len(every))
            atoms = enumerate_atoms(ts)
            for r in result.admissible:
                assert restriction_count(r) <= d
            if result.solvable:
                assert all(any(solves(r, a) for r in result.admissible) for a in atoms)


@settings(max_examples=30, deadline=None)
@given(small_ts())
def test_pruned_search_picks_first_region(ts):
    atoms = enumerate_atoms(ts)
    for type in TYPES:
        for d in (1, 2):
            found, _ = first_solving_regions(ts, type, d, atoms)
            for a in atoms:
                assert found.get(a) == first_solving_region_plain(ts, type, d, a)


@settings(max_examples=30, deadline=None)
@given(small_ts())
def test_d_monotone(ts):
    for type in TYPES:
        previous = False
        for d in range(len(ts.events) + 2):
            now = synthesize(SynthesisProblem(ts, type, d)).solvable
            assert now or not previous
            previous = now


def test_synthesis_deterministic():
    rng = random.Random(3)
    for _ in range(10):
        ts = oracles.random_ts(rng)
        a = synthesize(SynthesisProblem(ts, TAU1, 2))
        b = synthesize(SynthesisProblem(ts, TAU1, 2))
        assert a.admissible == b.admissible and a.unsolved_atoms == b.unsolved_atoms


def test_threads_give_identical_result(four_sets):
    g = build(four_sets, "2.1")
    type = NetType.of("nop", "inp", "set")
    one = synthesize(SynthesisProblem(g.ts, type, g.d))
    two = synthesize(SynthesisProblem(g.ts, type, g.d), threads=2)
    assert one.verdict == two.verdict
    assert one.admissible == two.admissible
    assert [r.key() for r in one.admissible] == [r.key() for r in two.admissible]
    assert one.unsolved_atoms == two.unsolved_atoms
    assert one.witnesses == two.witnesses


def test_seed_limit(four_sets):
    g = build(four_sets, "2.1")
    with pytest.raises(SeedLimitExceeded):
        synthesize(SynthesisProblem(g.ts, NetType.of("nop", "inp", "set"), g.d), seed_limit=10)


def test_stats_reported(a2):
    result = synthesize(SynthesisProblem(a2, TAU1, 2))
    s = result.stats
    assert s.seeds_tried > 0 and s.elapsed >= 0
    assert s.seeds_tried + s.seeds_pruned <= len(enumerate_atoms(a2)) * seed_count(2, TAU1, 2)
