"""Hitting Set instances and the gadget transition systems encoding them.

Each ``build_thm2x`` maps an instance ``(U, M, kappa)`` to a transition
system, a dependency budget ``d`` that depends on ``kappa`` only, and a key
ESSP atom ``alpha``.  A ``d``-restricted region solving ``alpha`` exists
exactly when the instance has a hitting set of size at most ``kappa``, and
the universe events such a region touches form one.

Naming: ``bot{i}`` for the gadget entry states, ``t{i}_{j}`` for the
states of the set gadget of ``M_i``, ``h{g}_{j}`` for the helper gadgets,
``sep{i}`` for the spine events, ``w{i}``/``u{i}`` for the gadget entry
events.  Universe elements are used verbatim as event names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

from .core import IDENT, Interaction, TransitionSystem, serialize_ts
from .regions import Region, SeparationAtom

THEOREMS = ("2.1", "2.2", "2.3", "2.4")

RESERVED = re.compile(
    r"^(k|z|z[1-4]|o|o[12]|w\d+|u\d+|sep\d+|a\d+_\d+|v\d+_\d+_\d+|plus\d+_\d+_\d+|c\d+_\d+"
    r"|bot\d+|t\d+_\d+|h\d+_\d+|q\d+|s\d+_\d+_\d+_\d+)$")


class HSFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class HittingSetInstance:
    universe: tuple
    family: tuple  # tuple of tuples of universe indices, each strictly increasing
    kappa: int

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "family", tuple(tuple(m) for m in self.family))
        if len(set(self.universe)) != len(self.universe):
            raise ValueError("duplicate universe element")
        for x in self.universe:
            if not IDENT.match(x):
                raise ValueError(f"malformed element name {x!r}")
            if RESERVED.match(x):
                raise ValueError(f"element name {x!r} clashes with a gadget name")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        for n, m in enumerate(self.family, 1):
            if not m:
                raise ValueError(f"set {n} is empty")
            if any(not 0 <= x < len(self.universe) for x in m):
                raise ValueError(f"set {n} has an index outside the universe")
            if any(a >= b for a, b in zip(m, m[1:])):
                raise ValueError(f"set {n} is not strictly increasing")

    @classmethod
    def from_sets(cls, universe: Iterable, sets: Iterable, kappa: int) -> "HittingSetInstance":
        """Build from sets of element names; each set is put in universe order."""
        universe = tuple(universe)
        pos = {x: n for n, x in enumerate(universe)}
        family = []
        for s in sets:
            s = list(s)
            if len(set(s)) != len(s):
                raise ValueError(f"set {s} repeats an element")
            try:
                family.append(tuple(sorted(pos[x] for x in s)))
            except KeyError as exc:
                raise ValueError(f"unknown element {exc.args[0]!r}") from None
        return cls(universe, tuple(family), kappa)

    @property
    def m(self) -> int:
        return len(self.family)

    def sets(self) -> list:
        return [[self.universe[x] for x in m] for m in self.family]

    def is_hitting_set(self, chosen: Iterable) -> bool:
        chosen = set(chosen)
        return all(any(self.universe[x] in chosen for x in m) for m in self.family)

    def used_elements(self) -> list:
        used = {x for m in self.family for x in m}
        return [self.universe[x] for x in sorted(used)]


def parse_hs(text: str) -> HittingSetInstance:
    universe, sets, kappa = None, [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "universe":
            if universe is not None:
                raise HSFormatError("duplicate 'universe' line", lineno)
            universe = rest
        elif head == "set":
            if not rest:
                raise HSFormatError("empty set", lineno)
            sets.append((lineno, rest))
        elif head == "kappa":
            if len(rest) != 1 or not rest[0].isdigit():
                raise HSFormatError("'kappa' takes one natural number", lineno)
            if kappa is not None:
                raise HSFormatError("duplicate 'kappa' line", lineno)
            kappa = int(rest[0])
        else:
            raise HSFormatError(f"unknown keyword {head!r}", lineno)
    if universe is None:
        raise HSFormatError("missing 'universe' line")
    if kappa is None:
        raise HSFormatError("missing 'kappa' line")
    known = set(universe)
    for lineno, s in sets:
        for x in s:
            if x not in known:
                raise HSFormatError(f"unknown element {x!r}", lineno)
        if len(set(s)) != len(s):
            raise HSFormatError("set repeats an element", lineno)
    try:
        return HittingSetInstance.from_sets(universe, [s for _, s in sets], kappa)
    except ValueError as exc:
        raise HSFormatError(str(exc)) from None


def serialize_hs(inst: HittingSetInstance) -> str:
    lines = ["universe " + " ".join(inst.universe)]
    lines += ["set " + " ".join(s) for s in inst.sets()]
    lines.append(f"kappa {inst.kappa}")
    return "\n".join(lines) + "\n"


def hs_brute_force(inst: HittingSetInstance) -> Optional[tuple]:
    """First hitting set of size <= kappa, by size then lexicographic index order."""
    n = len(inst.universe)
    for size in range(0, min(inst.kappa, n) + 1):
        for combo in combinations(range(n), size):
            chosen = set(combo)
            if all(chosen.intersection(m) for m in inst.family):
                return tuple(inst.universe[x] for x in combo)
    return None


@dataclass(frozen=True)
class GadgetOutput:
    ts: TransitionSystem
    d: int
    alpha: SeparationAtom
    theorem: str

    def serialize(self) -> str:
        return serialize_ts(self.ts, comments=(f"theorem = {self.theorem}", f"d = {self.d}",
                                               f"alpha = {self.alpha}"))


class _Builder:
    def __init__(self):
        self.edges = []

    def path(self, start: str, steps: Iterable) -> str:
        """Append ``start -e1-> s1 -e2-> s2 ...``; ``steps`` is ``[(e, s), ...]``."""
        s = start
        for e, t in steps:
            self.edges.append((s, e, t))
            s = t
        return s

    def both(self, start: str, steps: Iterable) -> str:
        s = start
        for e, t in steps:
            self.edges.append((s, e, t))
            self.edges.append((t, e, s))
            s = t
        return s

    def loop(self, s: str, *events: str):
        for e in events:
            self.edges.append((s, e, s))

    def ts(self) -> TransitionSystem:
        return TransitionSystem.build(self.edges, "bot1")


def _spine(b: _Builder, count: int, both: bool = False):
    for i in range(1, count + 1):
        step = [(f"sep{i}", f"bot{i + 1}")]
        if both:
            b.both(f"bot{i}", step)
        else:
            b.path(f"bot{i}", step)


def _chain(prefix: str, events: Iterable, first: int = 0) -> list:
    return [(e, f"{prefix}_{n}") for n, e in enumerate(events, first)]


def build_thm21(inst: HittingSetInstance) -> GadgetOutput:
    b = _Builder()
    m = inst.m
    for i, members in enumerate(inst.sets(), 1):
        events = [f"w{i}", "k", *members, "z", "k"]
        b.path(f"bot{i}", _chain(f"t{i}", events))
    b.path(f"bot{m + 1}", _chain("h0", [f"w{m + 1}", "k", "z", "o", "k"]))
    _spine(b, m)
    return GadgetOutput(b.ts(), inst.kappa + 2, SeparationAtom.essp("k", "h0_2"), "2.1")


def build_thm22(inst: HittingSetInstance) -> GadgetOutput:
    b = _Builder()
    m = inst.m
    for i, members in enumerate(inst.sets(), 1):
        b.path(f"bot{i}", _chain(f"t{i}", [f"w{i}", "k", "z1", *members, "z2", "k"]))
    b.path(f"bot{m + 1}", _chain("h1", [f"w{m + 1}", "k", "o1", "o2", "k"]))
    b.path(f"bot{m + 2}", _chain("h2", [f"w{m + 2}", "k", "z1"]))
    b.loop("h2_2", "o1")
    b.path(f"bot{m + 3}", _chain("h3", [f"w{m + 3}"]))
    b.loop("h3_0", "o1", "z2")
    _spine(b, m + 2)
    # every edge s -e-> s' comes with the loop s' -e-> s'
    b.edges += [(t, e, t) for _, e, t in b.edges]
    return GadgetOutput(b.ts(), inst.kappa + 4, SeparationAtom.essp("k", "h1_2"), "2.2")


def build_thm23(inst: HittingSetInstance) -> GadgetOutput:
    b = _Builder()
    m = inst.m
    for i, members in enumerate(inst.sets(), 1):
        s = b.both(f"bot{i}", _chain(f"t{i}", [f"w{i}", "k", "z1"]))
        n = 2
        for ell, x in enumerate(members, 1):
            a = f"a{i}_{ell}"
            s = b.both(s, [(a, f"t{i}_{n + 1}")])
            s = b.path(s, [(x, f"t{i}_{n + 2}")])
            s = b.both(s, [(x, f"t{i}_{n + 3}"), (a, f"t{i}_{n + 4}")])
            n += 4
        b.both(s, _chain(f"t{i}", ["z2", "k"], n + 1))
    b.both(f"bot{m + 1}", _chain("h0", [f"w{m + 1}", "k", "o1", "o2", "k"], 1))
    b.both(f"bot{m + 2}", _chain("h1", [f"w{m + 2}", "k", "z1", "o1", "z2", "k"], 1))
    _spine(b, m + 1, both=True)
    return GadgetOutput(b.ts(), inst.kappa + 4, SeparationAtom.essp("k", "h0_3"), "2.3")


def relevant_paths(inst: HittingSetInstance) -> dict:
    """Relevant paths of each set gadget, keyed by gadget index (1-based).

    The value lists ``(i, j, n, path)`` in ``(i, j)`` order, where ``path``
    is the list of ``(state, event, next_state)`` edges of the path that the
    ``j``-th event of gadget ``i`` induces as the ``n``-th relevant path.
    """
    seqs = {i: list(members) + ["z4"] for i, members in enumerate(inst.sets(), 1)}
    alphabets = {i: {"k", "z3", "z4", *members} for i, members in enumerate(inst.sets(), 1)}
    out = {i: [] for i in seqs}
    for i, seq in seqs.items():
        for j in range(2, len(seq) + 1):
            e, prev = seq[j - 1], seq[j - 2]
            targets = [g for g in sorted(seqs) if g != i and e in alphabets[g] and prev not in alphabets[g]]
            for n, g in enumerate(targets, 1):
                states = [f"s{i}_{j}_{g}_{l}" for l in range(n + 2)]
                events = [f"v{i}_{j}_{n}"] + [f"plus{i}_{j}_{x}" for x in range(n, 0, -1)]
                out[g].append((i, j, n, list(zip(states, events, states[1:]))))
    for g in out:
        out[g].sort(key=lambda item: (item[0], item[1]))
    return out


def build_thm24(inst: HittingSetInstance) -> GadgetOutput:
    b = _Builder()
    m = inst.m
    paths = relevant_paths(inst)
    for i, members in enumerate(inst.sets(), 1):
        if not paths[i]:
            last = b.path(f"bot{i}", [(f"w{i}", f"q{i}")])
        else:
            last = f"bot{i}"
            entry = f"w{i}"
            for c, (_, _, _, path) in enumerate(paths[i]):
                if c:
                    entry = f"c{i}_{c}"
                b.edges.append((last, entry, path[0][0]))
                b.edges.extend(path)
                last = path[-1][2]
        b.edges.append((last, f"u{i}", f"t{i}_0"))
        b.path(f"t{i}_0", _chain(f"t{i}", ["k", "z3", *members, "z4", "k"], 1))
    rows = (["k", "o1", "o2", "k"], ["k", "z1", "o2", "k"], ["k", "z2", "o2", "k"],
            ["k", "z1", "z3", "z2", "k"], ["k", "z1", "z4", "z2", "k"])
    for g, row in enumerate(rows):
        n = m + g + 1
        b.path(f"bot{n}", _chain(f"h{g}", [f"w{n}", *row]))
    _spine(b, m + 4)
    return GadgetOutput(b.ts(), inst.kappa + 4, SeparationAtom.essp("k", "h0_2"), "2.4")


BUILDERS = {"2.1": build_thm21, "2.2": build_thm22, "2.3": build_thm23, "2.4": build_thm24}

# the type each construction is checked against
DESIGNATED_TYPES = {
    "2.1": ("nop", "inp", "set"),
    "2.2": ("nop", "set", "res", "free"),
    "2.3": ("nop", "set", "swap", "used"),
    "2.4": ("nop", "inp", "res", "swap"),
}


def build(inst: HittingSetInstance, theorem: str) -> GadgetOutput:
    try:
        return BUILDERS[theorem](inst)
    except KeyError:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}") from None


def extract_hitting_set(inst: HittingSetInstance, region: Region) -> tuple:
    """Universe elements whose event the region does not map to nop."""
    sig = region.signature
    return tuple(x for x in inst.universe if sig.get(x, Interaction.NOP) is not Interaction.NOP)
