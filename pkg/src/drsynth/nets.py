"""Boolean Petri nets: firing, reachability graphs, and nets built from regions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import IDENT, Interaction, NetType, TransitionSystem
from .regions import Region, is_region


class NetFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NotEnabled(ValueError):
    """Raised when firing a transition that is not enabled."""


@dataclass(frozen=True)
class BooleanNet:
    type: NetType
    places: tuple
    transitions: tuple
    flow: Mapping  # (place, transition) -> Interaction, total
    initial_marking: Mapping  # place -> bit

    def __post_init__(self):
        places, transitions = tuple(self.places), tuple(self.transitions)
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        for what, ids in (("place", places), ("transition", transitions)):
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate {what} id")
        flow = dict(self.flow)
        for (p, t) in flow:
            if p not in places or t not in transitions:
                raise ValueError(f"flow entry ({p}, {t}) names an unknown place or transition")
        for p in places:
            for t in transitions:
                if (p, t) not in flow:
                    if not self.type.has_nop:
                        raise ValueError(f"missing flow for ({p}, {t}) and the type has no nop")
                    flow[(p, t)] = Interaction.NOP
                elif flow[(p, t)] not in self.type:
                    raise ValueError(f"flow ({p}, {t}) = {flow[(p, t)]} is not in type {self.type}")
        object.__setattr__(self, "flow", flow)
        marking = dict(self.initial_marking)
        if set(marking) != set(places) or any(b not in (0, 1) for b in marking.values()):
            raise ValueError("initial marking must assign a bit to every place")
        object.__setattr__(self, "initial_marking", marking)

    def initial(self) -> tuple:
        return tuple(self.initial_marking[p] for p in self.places)

    def marking_name(self, marking: Sequence) -> str:
        return "".join(map(str, marking)) if marking else "empty"


def _marking(net: BooleanNet, marking) -> tuple:
    if isinstance(marking, Mapping):
        marking = tuple(marking[p] for p in net.places)
    marking = tuple(marking)
    if len(marking) != len(net.places):
        raise ValueError("marking must cover every place")
    return marking


def enabled(net: BooleanNet, marking, t: str) -> bool:
    if t not in net.transitions:
        raise ValueError(f"unknown transition {t!r}")
    marking = _marking(net, marking)
    return all(net.flow[(p, t)].apply(x) is not None for p, x in zip(net.places, marking))


def fire(net: BooleanNet, marking, t: str) -> tuple:
    if not enabled(net, marking, t):
        raise NotEnabled(f"{t} is not enabled at {net.marking_name(_marking(net, marking))}")
    return tuple(net.flow[(p, t)].apply(x) for p, x in zip(net.places, _marking(net, marking)))


def reachability_graph(net: BooleanNet) -> TransitionSystem:
    """Breadth-first closure from the initial marking.

    States are named by their bit-string over the place order. Transitions
    that never fire do not appear among the events.
    """
    start = net.initial()
    seen = {start}
    queue = deque([start])
    edges = []
    while queue:
        m = queue.popleft()
        for t in net.transitions:
            if enabled(net, m, t):
                m2 = fire(net, m, t)
                edges.append((net.marking_name(m), t, net.marking_name(m2)))
                if m2 not in seen:
                    seen.add(m2)
                    queue.append(m2)
    return TransitionSystem.build(edges, net.marking_name(start),
                                  states=[net.marking_name(m) for m in seen])


def dependency_number(net: BooleanNet) -> int:
    return max((sum(1 for t in net.transitions if net.flow[(p, t)] is not Interaction.NOP)
                for p in net.places), default=0)


def net_from_regions(ts: TransitionSystem, type: NetType, regions: Iterable[Region]) -> BooleanNet:
    regions = list(regions)
    places = tuple(f"p{n}" for n in range(len(regions)))
    flow, marking = {}, {}
    for p, r in zip(places, regions):
        if not is_region(ts, type, r.support, r.signature):
            raise ValueError(f"region for {p} is not a {type}-region of the transition system")
        for e in ts.events:
            flow[(p, e)] = r.signature[e]
        marking[p] = r.support[ts.initial]
    return BooleanNet(type, places, ts.events, flow, marking)


def parse_net(text: str) -> BooleanNet:
    type_, places, transitions, flow, marking = None, [], [], {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "type":
            if type_ is not None:
                raise NetFormatError("duplicate 'type' line", lineno)
            try:
                type_ = NetType.parse(" ".join(rest))
            except ValueError as exc:
                raise NetFormatError(str(exc), lineno) from None
        elif head == "transition":
            if len(rest) != 1 or not IDENT.match(rest[0]):
                raise NetFormatError("'transition' takes one identifier", lineno)
            if rest[0] in transitions:
                raise NetFormatError(f"duplicate transition {rest[0]!r}", lineno)
            transitions.append(rest[0])
        elif head == "place":
            if len(rest) != 3 or rest[1] != "init" or rest[2] not in ("0", "1") or not IDENT.match(rest[0]):
                raise NetFormatError("expected 'place <id> init <0|1>'", lineno)
            if rest[0] in marking:
                raise NetFormatError(f"duplicate place {rest[0]!r}", lineno)
            places.append(rest[0])
            marking[rest[0]] = int(rest[2])
        elif head == "flow":
            if len(rest) != 3:
                raise NetFormatError("expected 'flow <place> <transition> <interaction>'", lineno)
            p, t, i = rest
            if p not in marking:
                raise NetFormatError(f"unknown place {p!r}", lineno)
            if t not in transitions:
                raise NetFormatError(f"unknown transition {t!r}", lineno)
            if (p, t) in flow:
                raise NetFormatError(f"duplicate flow for ({p}, {t})", lineno)
            try:
                flow[(p, t)] = Interaction.parse(i)
            except ValueError as exc:
                raise NetFormatError(str(exc), lineno) from None
        else:
            raise NetFormatError(f"unknown keyword {head!r}", lineno)
    if type_ is None:
        raise NetFormatError("missing 'type' line")
    try:
        return BooleanNet(type_, tuple(places), tuple(transitions), flow, marking)
    except ValueError as exc:
        raise NetFormatError(str(exc)) from None


def serialize_net(net: BooleanNet) -> str:
    lines = [f"type {net.type}"]
    lines += [f"transition {t}" for t in net.transitions]
    lines += [f"place {p} init {net.initial_marking[p]}" for p in net.places]
    for p in net.places:
        for t in net.transitions:
            i = net.flow[(p, t)]
            if i is not Interaction.NOP:
                lines.append(f"flow {p} {t} {i}")
    return "\n".join(lines) + "\n"
