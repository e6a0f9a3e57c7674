"""Regions of a transition system: seed propagation, validation, separation atoms."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional

from .core import Interaction, NetType, TransitionSystem


@dataclass(frozen=True)
class SeparationAtom:
    """``SSP(s, s')`` or ``ESSP(e, s)``; for ESSP, ``first`` is the event."""

    kind: str
    first: str
    second: str

    def __post_init__(self):
        if self.kind not in ("SSP", "ESSP"):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind == "SSP" and self.first == self.second:
            raise ValueError("an SSP atom needs two distinct states")

    @classmethod
    def ssp(cls, s: str, t: str) -> "SeparationAtom":
        return cls("SSP", s, t)

    @classmethod
    def essp(cls, event: str, state: str) -> "SeparationAtom":
        return cls("ESSP", event, state)

    @classmethod
    def parse(cls, text: str) -> "SeparationAtom":
        parts = text.split()
        if len(parts) != 3:
            raise ValueError(f"cannot parse atom {text!r}")
        return cls(parts[0].upper(), parts[1], parts[2])

    def __str__(self) -> str:
        return f"{self.kind} {self.first} {self.second}"


@dataclass(frozen=True, eq=False)
class Region:
    support: Mapping
    signature: Mapping
    type: NetType

    def key(self) -> tuple:
        return (tuple(sorted(self.support.items())),
                tuple(sorted((e, i.index) for e, i in self.signature.items())))

    def __eq__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def serialize(self) -> str:
        lines = [f"sig {e} {i}" for e, i in sorted(self.signature.items())]
        lines += [f"sup {s} {b}" for s, b in sorted(self.support.items())]
        return "\n".join(lines) + "\n"


def parse_region(text: str, type: NetType) -> Region:
    support, signature = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("sig", "sup"):
            raise ValueError(f"line {lineno}: expected 'sig <event> <interaction>' or 'sup <state> <bit>'")
        if parts[0] == "sig":
            signature[parts[1]] = Interaction.parse(parts[2])
        else:
            if parts[2] not in ("0", "1"):
                raise ValueError(f"line {lineno}: support must be 0 or 1")
            support[parts[1]] = int(parts[2])
    return Region(support, signature, type)


def spanning_tree(ts: TransitionSystem) -> dict:
    """BFS spanning tree rooted at the initial state: ``state -> (parent, event)``.

    Outgoing edges are scanned in (event, target) order, so the tree is
    unique for a given TS.
    """
    out = {}
    for s, e, t in ts.edges:
        out.setdefault(s, []).append((e, t))
    tree = {}
    seen = {ts.initial}
    queue = deque([ts.initial])
    while queue:
        s = queue.popleft()
        for e, t in sorted(out.get(s, ())):
            if t not in seen:
                seen.add(t)
                tree[t] = (s, e)
                queue.append(t)
    return tree


def tree_order(ts: TransitionSystem, tree: Mapping) -> list:
    """Non-initial states ordered so every parent precedes its children."""
    children = {}
    for child, (parent, _) in tree.items():
        children.setdefault(parent, []).append(child)
    order, queue = [], deque([ts.initial])
    while queue:
        s = queue.popleft()
        for c in sorted(children.get(s, ())):
            order.append(c)
            queue.append(c)
    return order


def is_region(ts: TransitionSystem, type: NetType, support: Mapping, signature: Mapping) -> bool:
    if set(support) != set(ts.states) or set(signature) != set(ts.events):
        return False
    if any(i not in type for i in signature.values()):
        return False
    return all(signature[e].apply(support[s]) == support[t] for s, e, t in ts.edges)


def region_from_seed(ts: TransitionSystem, type: NetType, sup_init: int, sig: Mapping,
                     tree: Optional[Mapping] = None) -> Optional[Region]:
    """The unique region with ``sup(initial) = sup_init`` and signature ``sig``, if any."""
    if tree is None:
        tree = spanning_tree(ts)
    if set(sig) != set(ts.events):
        raise ValueError("signature must be total over the events")
    for e, i in sig.items():
        if i not in type:
            raise ValueError(f"signature value {i} of {e} is not in the type")
    support = {ts.initial: sup_init}
    for s in tree_order(ts, tree):
        parent, e = tree[s]
        y = sig[e].apply(support[parent])
        if y is None:
            return None
        support[s] = y
    for s, e, t in ts.edges:
        if sig[e].apply(support[s]) != support[t]:
            return None
    return Region(support, dict(sig), type)


def enumerate_atoms(ts: TransitionSystem) -> list:
    atoms = []
    states = ts.states
    for a in range(len(states)):
        for b in range(a + 1, len(states)):
            atoms.append(SeparationAtom.ssp(states[a], states[b]))
    for e in ts.events:
        for s in states:
            if (s, e) not in ts.delta:
                atoms.append(SeparationAtom.essp(e, s))
    return atoms


def solves(region: Region, atom: SeparationAtom) -> bool:
    if atom.kind == "SSP":
        return region.support[atom.first] != region.support[atom.second]
    return region.signature[atom.first].apply(region.support[atom.second]) is None


def restriction_count(region: Region) -> int:
    return sum(1 for i in region.signature.values() if i is not Interaction.NOP)
