"""Boolean interactions, net types and the transition-system data model."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional

IDENT = re.compile(r"^[A-Za-z0-9_+⊕-]+$")


class Interaction(Enum):
    """The eight Boolean partial functions {0,1} -> {0,1}.

    Declaration order is the canonical interaction order used everywhere
    a deterministic ordering of interactions is needed.
    """

    NOP = "nop"
    INP = "inp"
    OUT = "out"
    SET = "set"
    RES = "res"
    SWAP = "swap"
    USED = "used"
    FREE = "free"

    def apply(self, x: int) -> Optional[int]:
        return _TABLE[self][x]

    @property
    def index(self) -> int:
        return _ORDER[self]

    @property
    def is_total(self) -> bool:
        return None not in _TABLE[self]

    @classmethod
    def parse(cls, token: str) -> "Interaction":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ValueError(f"unknown interaction {token!r}") from None

    def __str__(self) -> str:
        return self.value


# (value on 0, value on 1); None marks an empty cell of the interaction table
_TABLE = {
    Interaction.NOP: (0, 1),
    Interaction.INP: (None, 0),
    Interaction.OUT: (1, None),
    Interaction.SET: (1, 1),
    Interaction.RES: (0, 0),
    Interaction.SWAP: (1, 0),
    Interaction.USED: (None, 1),
    Interaction.FREE: (0, None),
}
_ORDER = {i: n for n, i in enumerate(Interaction)}
INTERACTIONS = tuple(Interaction)


def interaction_apply(i: Interaction, x: int) -> Optional[int]:
    if x not in (0, 1):
        raise ValueError(f"not a bit: {x!r}")
    return i.apply(x)


class MembershipError(ValueError):
    """An interaction was used with a type that does not contain it."""


@dataclass(frozen=True)
class NetType:
    members: frozenset

    def __post_init__(self):
        members = frozenset(self.members)
        if not members:
            raise ValueError("a net type needs at least one interaction")
        for m in members:
            if not isinstance(m, Interaction):
                raise TypeError(f"not an interaction: {m!r}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, *names) -> "NetType":
        return cls(frozenset(i if isinstance(i, Interaction) else Interaction.parse(i) for i in names))

    @classmethod
    def parse(cls, text: str) -> "NetType":
        names = [t for t in re.split(r"[,\s]+", text.strip()) if t]
        if not names:
            raise ValueError("empty type list")
        return cls.of(*names)

    @property
    def ordered(self) -> tuple:
        return tuple(sorted(self.members, key=lambda i: i.index))

    @property
    def has_nop(self) -> bool:
        return Interaction.NOP in self.members

    def step(self, x: int, i: Interaction) -> Optional[int]:
        if i not in self.members:
            raise MembershipError(f"{i} is not a member of {self}")
        return interaction_apply(i, x)

    def __contains__(self, i) -> bool:
        return i in self.members

    def __str__(self) -> str:
        return ",".join(i.value for i in self.ordered)


def type_step(t: NetType, x: int, i: Interaction) -> Optional[int]:
    return t.step(x, i)


class TSFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InvalidTransitionSystem(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class TransitionSystem:
    """Finite initialized labeled transition system.

    States and events are kept in lexicographic order. ``edges`` is the
    sorted tuple of ``(source, event, target)`` triples; the partial
    transition function is available as ``delta``. Construction only checks
    that referenced ids exist; use :func:`validate_ts` for the remaining
    invariants.
    """

    states: tuple
    events: tuple
    edges: tuple
    initial: str
    delta: Mapping = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        states = tuple(sorted(set(self.states)))
        events = tuple(sorted(set(self.events)))
        edges = tuple(sorted(set(tuple(e) for e in self.edges)))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "edges", edges)
        known_s, known_e = set(states), set(events)
        if self.initial not in known_s:
            raise TSFormatError(f"unknown initial state {self.initial!r}")
        delta = {}
        for s, e, t in edges:
            if s not in known_s or t not in known_s:
                raise TSFormatError(f"edge {s} -{e}-> {t} references an unknown state")
            if e not in known_e:
                raise TSFormatError(f"edge {s} -{e}-> {t} references an unknown event")
            delta.setdefault((s, e), []).append(t)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def build(cls, edges: Iterable, initial: str, states: Iterable = (), events: Iterable = ()):
        edges = list(edges)
        all_states = set(states) | {initial}
        all_events = set(events)
        for s, e, t in edges:
            all_states.update((s, t))
            all_events.add(e)
        return cls(tuple(all_states), tuple(all_events), tuple(edges), initial)

    def successor(self, state: str, event: str) -> Optional[str]:
        targets = self.delta.get((state, event))
        return targets[0] if targets else None

    def enabled_events(self, state: str) -> list:
        return [e for e in self.events if (state, e) in self.delta]

    def __len__(self) -> int:
        return len(self.states)


def validate_ts(ts: TransitionSystem) -> list:
    """Return the list of invariant violations of ``ts`` (empty if valid)."""
    violations = []
    for (s, e), targets in sorted(ts.delta.items()):
        if len(targets) > 1:
            violations.append(f"nondeterministic: {s} -{e}-> {{{', '.join(targets)}}}")
    seen = {ts.initial}
    queue = deque([ts.initial])
    while queue:
        s = queue.popleft()
        for e in ts.events:
            for t in ts.delta.get((s, e), ()):
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    for s in ts.states:
        if s not in seen:
            violations.append(f"unreachable state: {s}")
    used = {e for _, e, _ in ts.edges}
    for e in ts.events:
        if e not in used:
            violations.append(f"orphan event: {e}")
    for name in ts.states + ts.events:
        if not IDENT.match(name):
            violations.append(f"malformed identifier: {name!r}")
    return violations


def _check_ident(token: str, line: int) -> str:
    if not IDENT.match(token):
        raise TSFormatError(f"malformed identifier {token!r}", line)
    return token


def parse_ts(text: str) -> TransitionSystem:
    states, events, arcs = None, None, []
    initial = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "states":
            if states is not None:
                raise TSFormatError("duplicate 'states' line", lineno)
            states = [_check_ident(t, lineno) for t in rest]
            if len(set(states)) != len(states):
                raise TSFormatError("duplicate state id", lineno)
        elif head == "events":
            if events is not None:
                raise TSFormatError("duplicate 'events' line", lineno)
            events = [_check_ident(t, lineno) for t in rest]
            if len(set(events)) != len(events):
                raise TSFormatError("duplicate event id", lineno)
        elif head == "initial":
            if len(rest) != 1:
                raise TSFormatError("'initial' takes exactly one state", lineno)
            if initial is not None:
                raise TSFormatError("duplicate 'initial' line", lineno)
            initial = rest[0]
        elif head == "arc":
            if len(rest) != 3:
                raise TSFormatError("'arc' takes: source event target", lineno)
            arcs.append((lineno, tuple(rest)))
        else:
            raise TSFormatError(f"unknown keyword {head!r}", lineno)
    if states is None:
        raise TSFormatError("missing 'states' line")
    if initial is None:
        raise TSFormatError("missing 'initial' line")
    events = events or []
    known_s, known_e = set(states), set(events)
    if initial not in known_s:
        raise TSFormatError(f"unknown initial state {initial!r}")
    seen = {}
    for lineno, (s, e, t) in arcs:
        for x in (s, t):
            if x not in known_s:
                raise TSFormatError(f"unknown state {x!r}", lineno)
        if e not in known_e:
            raise TSFormatError(f"unknown event {e!r}", lineno)
        if (s, e) in seen and seen[(s, e)] != t:
            raise TSFormatError(f"nondeterministic: {s} -{e}-> {seen[(s, e)]} and {t}", lineno)
        seen[(s, e)] = t
    ts = TransitionSystem(tuple(states), tuple(events), tuple(a for _, a in arcs), initial)
    violations = validate_ts(ts)
    if violations:
        raise InvalidTransitionSystem(violations)
    return ts


def serialize_ts(ts: TransitionSystem, comments: Iterable = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append("states " + " ".join(ts.states))
    lines.append(f"initial {ts.initial}")
    lines.append("events " + " ".join(ts.events) if ts.events else "events")
    lines.extend(f"arc {s} {e} {t}" for s, e, t in ts.edges)
    return "\n".join(lines) + "\n"
