"""Isomorphism of deterministic transition systems and certificate checking."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .core import NetType, TransitionSystem
from .nets import net_from_regions, reachability_graph
from .regions import Region, enumerate_atoms, is_region, restriction_count, solves


@dataclass(frozen=True)
class IsoResult:
    mapping: Optional[dict]
    reason: str  # "ok", "alphabet-mismatch", "size-mismatch", "edge-mismatch", "not-injective"

    def __bool__(self) -> bool:
        return self.mapping is not None


def isomorphism_check(a: TransitionSystem, b: TransitionSystem) -> IsoResult:
    """Pair up states by walking both systems in lockstep from the initial states.

    Both systems are deterministic and reachable, so this walk yields the
    only candidate map; it is an isomorphism iff every edge matches both ways
    and the map is a bijection.
    """
    if set(a.events) != set(b.events):
        return IsoResult(None, "alphabet-mismatch")
    if len(a.states) != len(b.states) or len(a.edges) != len(b.edges):
        return IsoResult(None, "size-mismatch")
    mapping = {a.initial: b.initial}
    used = {b.initial}
    queue = deque([a.initial])
    while queue:
        s = queue.popleft()
        x = mapping[s]
        for e in a.events:
            t, y = a.successor(s, e), b.successor(x, e)
            if (t is None) != (y is None):
                return IsoResult(None, "edge-mismatch")
            if t is None:
                continue
            if t in mapping:
                if mapping[t] != y:
                    return IsoResult(None, "edge-mismatch")
            else:
                if y in used:
                    return IsoResult(None, "not-injective")
                mapping[t] = y
                used.add(y)
                queue.append(t)
    if len(mapping) != len(a.states):
        return IsoResult(None, "size-mismatch")
    return IsoResult(mapping, "ok")


def isomorphic(a: TransitionSystem, b: TransitionSystem) -> Optional[dict]:
    return isomorphism_check(a, b).mapping


@dataclass
class CertificateReport:
    invalid_regions: list = field(default_factory=list)
    over_budget: list = field(default_factory=list)
    unsolved_atoms: list = field(default_factory=list)
    isomorphism: Optional[dict] = None
    isomorphism_reason: str = "not-checked"

    @property
    def accepted(self) -> bool:
        return (not self.invalid_regions and not self.over_budget and not self.unsolved_atoms
                and self.isomorphism is not None)

    def lines(self) -> list:
        out = [f"invalid-region {n}" for n in self.invalid_regions]
        out += [f"over-budget {n} {c}" for n, c in self.over_budget]
        out += [f"unsolved {a}" for a in self.unsolved_atoms]
        out.append(f"isomorphism {self.isomorphism_reason}")
        out.append("accepted" if self.accepted else "rejected")
        return out

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "invalid_regions": list(self.invalid_regions),
            "over_budget": [{"region": n, "restriction": c} for n, c in self.over_budget],
            "unsolved_atoms": [str(a) for a in self.unsolved_atoms],
            "isomorphism": self.isomorphism_reason,
            "mapping": self.isomorphism,
        }


def check_certificate(ts: TransitionSystem, type: NetType, d: int, regions: list) -> CertificateReport:
    report = CertificateReport()
    valid = []
    for n, r in enumerate(regions):
        if not is_region(ts, type, r.support, r.signature):
            report.invalid_regions.append(n)
            continue
        valid.append(r)
        c = restriction_count(r)
        if c > d:
            report.over_budget.append((n, c))
    report.unsolved_atoms = [a for a in enumerate_atoms(ts) if not any(solves(r, a) for r in valid)]
    iso = isomorphism_check(ts, reachability_graph(net_from_regions(ts, type, valid)))
    report.isomorphism = iso.mapping
    report.isomorphism_reason = iso.reason
    return report


def region_list_from_net(ts: TransitionSystem, net) -> list:
    """Read a net's places back as candidate regions of ``ts``.

    The support is obtained by replaying each place along the edges of
    ``ts``; a place that cannot be replayed yields a region marked invalid by
    :func:`check_certificate` (its support is left partial).
    """
    out = []
    for p in net.places:
        sig = {e: net.flow[(p, e)] for e in net.transitions}
        sup = {ts.initial: net.initial_marking[p]}
        queue = deque([ts.initial])
        while queue:
            s = queue.popleft()
            for e in ts.events:
                t = ts.successor(s, e)
                if t is None or t in sup or e not in sig:
                    continue
                y = sig[e].apply(sup[s])
                if y is None:
                    continue
                sup[t] = y
                queue.append(t)
        out.append(Region(sup, sig, net.type))
    return out
