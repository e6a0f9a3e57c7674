"""Deciding dependency d-restricted synthesis.

Seeds ``(sup(initial), signature)`` are visited in a fixed order: ascending
number ``i`` of non-nop events, then the i-subsets of events in
lexicographic order, then interaction assignments to that subset in
lexicographic order (interactions in canonical order), then
``sup(initial) = 0`` before ``1``.  For every separation atom the solver
reports the first region in this order that solves it.

:func:`enumerate_d_restricted_regions` walks the order literally.
:func:`synthesize` walks the same order but skips seed subtrees that
provably contain no region solving a still-open atom, so its answer is the
same while visiting far fewer seeds.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Iterator, Optional

import numpy as np

from . import _search
from ._search import APPLY, NOP, NOP_MASK, Compiled
from .core import INTERACTIONS, Interaction, NetType, TransitionSystem
from .regions import (Region, SeparationAtom, enumerate_atoms, region_from_seed,
                      restriction_count, solves, spanning_tree)

# ESSP_OPEN[sig_dom, sup_dom]: some interaction in sig_dom is undefined on
# some bit in sup_dom
ESSP_OPEN = np.array([[bool(g & _search.UNDEF_ON[0] and d & 1 or g & _search.UNDEF_ON[1] and d & 2)
                       for d in range(4)] for g in range(256)], dtype=bool)

# below this many open atoms the search asks the propagation checker before
# descending into a subtree
CHECK_TARGETS = 24


class SeedLimitExceeded(RuntimeError):
    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"seed limit of {limit} exceeded")


@dataclass(frozen=True)
class SynthesisProblem:
    ts: TransitionSystem
    type: NetType
    d: int

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("d must be non-negative")
        if not self.type.has_nop and self.d < len(self.ts.events):
            raise ValueError(
                f"type {self.type} lacks nop, so every event counts against d; "
                f"need d >= {len(self.ts.events)}")


@dataclass
class Stats:
    seeds_tried: int = 0
    seeds_pruned: int = 0
    valid_regions: int = 0
    elapsed: float = 0.0

    def merge(self, other: "Stats"):
        self.seeds_tried += other.seeds_tried
        self.seeds_pruned += other.seeds_pruned
        self.valid_regions += other.valid_regions


@dataclass
class SynthesisResult:
    verdict: str
    admissible: list = field(default_factory=list)
    unsolved_atoms: list = field(default_factory=list)
    stats: Stats = field(default_factory=Stats)
    # atom -> first solving region, for every solvable atom
    witnesses: dict = field(default_factory=dict, repr=False)

    @property
    def solvable(self) -> bool:
        return self.verdict == "solvable"


def _choices(type: NetType) -> tuple:
    if type.has_nop:
        return tuple(i for i in type.ordered if i is not Interaction.NOP)
    return type.ordered


def _levels(num_events: int, type: NetType, d: int) -> range:
    if type.has_nop:
        return range(0, min(d, num_events) + 1)
    return range(num_events, num_events + 1) if d >= num_events else range(0)


def seed_count(num_events: int, type: NetType, d: int) -> int:
    k = len(_choices(type))
    return 2 * sum(comb(num_events, i) * k ** i for i in _levels(num_events, type, d))


def iter_seeds(ts: TransitionSystem, type: NetType, d: int) -> Iterator:
    """Yield ``(sup_init, signature)`` seeds in the canonical seed order."""
    choices = _choices(type)
    base = {e: Interaction.NOP for e in ts.events}
    for i in _levels(len(ts.events), type, d):
        for subset in combinations(ts.events, i):
            for values in product(choices, repeat=i):
                sig = dict(base)
                sig.update(zip(subset, values))
                for sup_init in (0, 1):
                    yield sup_init, sig


def enumerate_d_restricted_regions(ts: TransitionSystem, type: NetType, d: int,
                                   stats: Optional[Stats] = None) -> Iterator[Region]:
    tree = spanning_tree(ts)
    for sup_init, sig in iter_seeds(ts, type, d):
        if stats is not None:
            stats.seeds_tried += 1
        region = region_from_seed(ts, type, sup_init, sig, tree)
        if region is not None:
            if stats is not None:
                stats.valid_regions += 1
            yield region


def _atom_ints(cm: Compiled, atom: SeparationAtom):
    if atom.kind == "SSP":
        return ("SSP", cm.sidx[atom.first], cm.sidx[atom.second])
    return ("ESSP", cm.eidx[atom.first], cm.sidx[atom.second])


class _OrderedSearch:
    """Seed-ordered search for the first solving region of each target atom."""

    def __init__(self, cm: Compiled, type: NetType, d: int, atoms: list, seed_limit=None):
        self.cm = cm
        self.type = type
        self.d = d
        self.has_nop = type.has_nop
        self.choices = [i.index for i in _choices(type)]
        self.choice_mask = sum(1 << i for i in self.choices)
        self.member_mask = sum(1 << i.index for i in type.members)
        self.atoms = atoms
        self.atom_ints = [_atom_ints(cm, a) for a in atoms]
        kinds = np.array([a.kind == "SSP" for a in atoms], dtype=bool)
        self.is_ssp = kinds
        self.first = np.array([x[1] for x in self.atom_ints], dtype=np.int64)
        self.second = np.array([x[2] for x in self.atom_ints], dtype=np.int64)
        self.open = np.ones(len(atoms), dtype=bool)
        self.found = {}
        self.stats = Stats()
        self.seed_limit = seed_limit
        undef = np.zeros((8, 2), dtype=bool)
        for i in range(8):
            for x in (0, 1):
                undef[i, x] = APPLY[i][x] < 0
        self.undef = undef

    def run(self):
        cm = self.cm
        k = len(self.choices)
        levels = _levels(cm.m, self.type, self.d)
        # least level at which each atom is solvable, once known
        self.min_level = None
        for i in levels:
            if not self.open.any():
                break
            if self.min_level is None and (i >= 2 or i == levels[-1]):
                # knowing each atom's level up front spares exhaustive walks
                # for atoms that have no region in the budget at all
                self._screen(i)
            if self.min_level is None:
                self.active = self.open.copy()
            else:
                self.active = self.open & (self.min_level == i)
            if not self.active.any():
                continue
            self.level = i
            self.level_seeds = k ** i * 2
            self.budget = i if self.has_nop else cm.m
            sup_dom = [3] * cm.n
            sig_dom = [(NOP_MASK | self.choice_mask) if self.has_nop else self.member_mask] * cm.m
            if _search._propagate(cm, sup_dom, sig_dom, self.budget, self.has_nop, None, None):
                self._subsets(0, [], list(range(cm.n)), (sup_dom, sig_dom))
            else:
                self.stats.seeds_pruned += comb(cm.m, i) * self.level_seeds
        return self.found

    def _screen(self, start):
        dom = [self.member_mask] * self.cm.m
        self.min_level = np.full(len(self.atoms), -1, dtype=np.int64)
        budgets = range(start, self.d + 1) if self.has_nop else [self.cm.m]
        for j in np.flatnonzero(self.open):
            for b in budgets:
                if _search.feasible(self.cm, dom, b, self.has_nop, self.atom_ints[j]) is not None:
                    self.min_level[j] = b
                    break
            else:
                self.open[j] = False

    def _restrict(self, state, e, mask):
        """Narrow the domain of event ``e`` and propagate; None on a wipe-out."""
        sup_dom, sig_dom = state
        if sig_dom[e] & mask == sig_dom[e]:
            return state
        sup_dom, sig_dom = list(sup_dom), list(sig_dom)
        sig_dom[e] &= mask
        if not sig_dom[e]:
            return None
        if not _search._propagate(self.cm, sup_dom, sig_dom, self.budget, self.has_nop, None,
                                  self.cm.ev_edge_ids[e]):
            return None
        return sup_dom, sig_dom

    def _viable(self, comp, state):
        """Whether some region within ``state`` may solve an open atom."""
        open_idx = np.flatnonzero(self.active)
        if not open_idx.size:
            return False
        sup = np.asarray(state[0], dtype=np.int64)
        sig = np.asarray(state[1], dtype=np.int64)
        ssp = self.is_ssp[open_idx]
        a = self.first[open_idx]
        b = self.second[open_idx]
        ok = np.empty(open_idx.size, dtype=bool)
        sa, sb = sup[a[ssp]], sup[b[ssp]]
        ok[ssp] = (comp[a[ssp]] != comp[b[ssp]]) & ~((sa == sb) & (sa != 3))
        essp = ~ssp
        ok[essp] = ESSP_OPEN[sig[a[essp]], sup[b[essp]]]
        possible = open_idx[ok]
        if not possible.size:
            return False
        if possible.size > CHECK_TARGETS:
            return True
        return any(_search.feasible(self.cm, state[1], self.budget, self.has_nop, self.atom_ints[j])
                   is not None for j in possible)

    # subset phase -------------------------------------------------------

    def _find(self, parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def _subsets(self, pos, chosen, parent, state):
        cm = self.cm
        if not self.active.any():
            return
        slots = self.level - len(chosen)
        if pos == cm.m or slots == 0:
            # every remaining event is nop
            for e in range(pos, cm.m):
                parent = list(parent) if e == pos else parent
                self._union_event(parent, e)
                state = state and self._restrict(state, e, NOP_MASK)
            if state is None or not self._viable(self._components(parent), state):
                self.stats.seeds_pruned += self.level_seeds
                return
            self._assign(chosen, 0, self._components(parent), state, [NOP] * cm.m)
            return
        if not self._viable(self._components(parent), state):
            self.stats.seeds_pruned += comb(cm.m - pos, slots) * self.level_seeds
            return
        inc = self._restrict(state, pos, self.choice_mask)
        if inc is None:
            self.stats.seeds_pruned += comb(cm.m - pos - 1, slots - 1) * self.level_seeds
        else:
            self._subsets(pos + 1, chosen + [pos], parent, inc)
        if cm.m - pos - 1 >= slots:
            exc = self._restrict(state, pos, NOP_MASK)
            if exc is None:
                self.stats.seeds_pruned += comb(cm.m - pos - 1, slots) * self.level_seeds
            else:
                p2 = list(parent)
                self._union_event(p2, pos)
                self._subsets(pos + 1, chosen, p2, exc)

    def _union_event(self, parent, e):
        for s, t in self.cm.ev_edges[e]:
            a, b = self._find(parent, s), self._find(parent, t)
            if a != b:
                parent[a] = b

    def _components(self, parent):
        return np.array([self._find(parent, x) for x in range(self.cm.n)], dtype=np.int64)

    # assignment phase ---------------------------------------------------

    def _assign(self, chosen, depth, comp, state, sig):
        if not self.active.any():
            return
        if depth == len(chosen):
            self._leaf(sig, state[0][self.cm.root])
            return
        k = len(self.choices)
        below = k ** (len(chosen) - depth - 1) * 2
        e = chosen[depth]
        for x in self.choices:
            nxt = self._restrict(state, e, 1 << x) if state[1][e] >> x & 1 else None
            if nxt is None or (depth + 1 < len(chosen) and not self._viable(comp, nxt)):
                self.stats.seeds_pruned += below
                continue
            sig[e] = x
            self._assign(chosen, depth + 1, comp, nxt, sig)
            if not self.active.any():
                return

    def _leaf(self, sig, root_dom=3):
        for sup_init in (0, 1):
            if not root_dom >> sup_init & 1:
                self.stats.seeds_pruned += 1
                continue
            self.stats.seeds_tried += 1
            if self.seed_limit is not None and self.stats.seeds_tried > self.seed_limit:
                raise SeedLimitExceeded(self.seed_limit)
            sup = self.cm.support(sup_init, sig)
            if sup is None:
                continue
            self.stats.valid_regions += 1
            self._record(sup, sig)

    def _record(self, sup, sig):
        open_idx = np.flatnonzero(self.open)
        sup_arr = np.asarray(sup, dtype=np.int64)
        sig_arr = np.asarray(sig, dtype=np.int64)
        ssp = self.is_ssp[open_idx]
        a = self.first[open_idx]
        b = self.second[open_idx]
        hit = np.empty(len(open_idx), dtype=bool)
        hit[ssp] = sup_arr[a[ssp]] != sup_arr[b[ssp]]
        essp = ~ssp
        hit[essp] = self.undef[sig_arr[a[essp]], sup_arr[b[essp]]]
        solved = open_idx[hit]
        if solved.size:
            self.open[solved] = False
            self.active[solved] = False
            entry = (tuple(sup), tuple(sig))
            for j in solved:
                self.found[int(j)] = entry


def _to_region(cm: Compiled, type: NetType, entry) -> Region:
    sup, sig = entry
    return Region({s: sup[n] for n, s in enumerate(cm.states)},
                  {e: INTERACTIONS[sig[n]] for n, e in enumerate(cm.events)}, type)


def _search_chunk(args):
    ts, type, d, atoms, seed_limit = args
    search = _OrderedSearch(Compiled(ts), type, d, atoms, seed_limit)
    found = search.run()
    return found, search.stats


def first_solving_regions(ts: TransitionSystem, type: NetType, d: int, atoms: list,
                          threads: int = 1, seed_limit: Optional[int] = None):
    """Map each solvable atom to its first solving region in seed order."""
    SynthesisProblem(ts, type, d)
    cm = Compiled(ts)
    stats = Stats()
    found = {}
    if threads <= 1 or len(atoms) < 2:
        search = _OrderedSearch(cm, type, d, atoms, seed_limit)
        raw = search.run()
        stats.merge(search.stats)
        found = {atoms[j]: entry for j, entry in raw.items()}
    else:
        chunks = [atoms[n::threads] for n in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for chunk, (raw, st) in zip(chunks, pool.map(
                    _search_chunk, [(ts, type, d, c, seed_limit) for c in chunks])):
                stats.merge(st)
                found.update({chunk[j]: entry for j, entry in raw.items()})
    regions = {}
    cache = {}
    for atom, entry in found.items():
        if entry not in cache:
            cache[entry] = _to_region(cm, type, entry)
        regions[atom] = cache[entry]
    return regions, stats


def synthesize(problem: SynthesisProblem, threads: int = 1,
               seed_limit: Optional[int] = None) -> SynthesisResult:
    start = time.perf_counter()
    ts, type, d = problem.ts, problem.type, problem.d
    atoms = enumerate_atoms(ts)
    witnesses, stats = first_solving_regions(ts, type, d, atoms, threads, seed_limit)
    admissible, seen, unsolved = [], set(), []
    for atom in atoms:
        region = witnesses.get(atom)
        if region is None:
            unsolved.append(atom)
        elif region not in seen:
            seen.add(region)
            admissible.append(region)
    stats.elapsed = time.perf_counter() - start
    if unsolved:
        return SynthesisResult("unsolvable", [], unsolved, stats, witnesses)
    for region in admissible:
        assert restriction_count(region) <= d
    return SynthesisResult("solvable", admissible, [], stats, witnesses)


def solve_single_atom(ts: TransitionSystem, type: NetType, d: int,
                      atom: SeparationAtom) -> Optional[Region]:
    if atom not in set(enumerate_atoms(ts)):
        raise ValueError(f"{atom} is not a separation atom of this transition system")
    regions, _ = first_solving_regions(ts, type, d, [atom])
    return regions.get(atom)


def first_solving_region_plain(ts: TransitionSystem, type: NetType, d: int,
                               atom: SeparationAtom) -> Optional[Region]:
    """Reference: scan the unpruned region stream for the first solver."""
    for region in enumerate_d_restricted_regions(ts, type, d):
        if solves(region, atom):
            return region
    return None
