"""Integer-indexed search machinery behind the solver.

Two pieces live here:

* ``Compiled`` - a transition system with states/events mapped to ints.
* ``feasible`` - a small propagation-based search deciding whether some
  region with at most ``budget`` non-nop events satisfies a given atom under
  per-event domain restrictions.  The ordered seed search uses it to skip
  seed subtrees that cannot contain a solving region; it never changes which
  region is found first.

Domains are bitmasks: a support domain is a subset of {0, 1} encoded as
bit0 (value 0 allowed) | bit1 (value 1 allowed); a signature domain is a
subset of the eight interactions, bit ``i`` for ``Interaction.index == i``.
"""

from __future__ import annotations

from collections import deque

from .core import INTERACTIONS, Interaction, TransitionSystem
from .regions import spanning_tree, tree_order

NOP = Interaction.NOP.index
# APPLY[i][x] = i(x), or -1 when undefined
APPLY = tuple(tuple(-1 if i.apply(x) is None else i.apply(x) for x in (0, 1)) for i in INTERACTIONS)
NOP_MASK = 1 << NOP


def _edge_table():
    table = [0] * (4 * 256 * 4)
    for ds in range(4):
        for di in range(256):
            for dt in range(4):
                ns = ni = nt = 0
                for x in (0, 1):
                    if not ds >> x & 1:
                        continue
                    for i in range(8):
                        if not di >> i & 1:
                            continue
                        y = APPLY[i][x]
                        if y >= 0 and dt >> y & 1:
                            ns |= 1 << x
                            ni |= 1 << i
                            nt |= 1 << y
                table[(ds << 10) | (di << 2) | dt] = (ns, ni, nt)
    return tuple(table)


EDGE_TABLE = _edge_table()
# interactions undefined on bit x, as masks
UNDEF_ON = tuple(sum(1 << i for i in range(8) if APPLY[i][x] < 0) for x in (0, 1))


class Compiled:
    def __init__(self, ts: TransitionSystem):
        self.ts = ts
        self.states = ts.states
        self.events = ts.events
        self.sidx = {s: n for n, s in enumerate(ts.states)}
        self.eidx = {e: n for n, e in enumerate(ts.events)}
        self.n = len(ts.states)
        self.m = len(ts.events)
        self.root = self.sidx[ts.initial]
        self.edges = [(self.sidx[s], self.eidx[e], self.sidx[t]) for s, e, t in ts.edges]
        self.ev_edges = [[] for _ in range(self.m)]
        self.state_edge_ids = [[] for _ in range(self.n)]
        self.ev_edge_ids = [[] for _ in range(self.m)]
        for k, (s, e, t) in enumerate(self.edges):
            self.ev_edges[e].append((s, t))
            self.ev_edge_ids[e].append(k)
            self.state_edge_ids[s].append(k)
            if t != s:
                self.state_edge_ids[t].append(k)
        tree = spanning_tree(ts)
        self.tree = [(self.sidx[c], self.sidx[tree[c][0]], self.eidx[tree[c][1]]) for c in tree_order(ts, tree)]
        # edges not on the tree; only these need re-checking after propagation
        tree_keys = {(p, e, c) for c, p, e in self.tree}
        self.non_tree = [k for k in self.edges if k not in tree_keys]

    def support(self, sup_init: int, sig: list):
        """Propagate along the spanning tree and check the remaining edges."""
        sup = [0] * self.n
        sup[self.root] = sup_init
        for c, p, e in self.tree:
            y = APPLY[sig[e]][sup[p]]
            if y < 0:
                return None
            sup[c] = y
        for s, e, t in self.non_tree:
            if APPLY[sig[e]][sup[s]] != sup[t]:
                return None
        return sup


def feasible(cm: Compiled, sig_dom: list, budget: int, has_nop: bool, atom):
    """Search for a region within the signature domains solving ``atom``.

    ``atom`` is ``("SSP", a, b)``, ``("ESSP", e, s)`` (int indices) or None.
    Returns ``(sup, sig)`` as int lists, or None when no such region exists.
    """
    sup_dom = [3] * cm.n
    sig_dom = list(sig_dom)
    if not _propagate(cm, sup_dom, sig_dom, budget, has_nop, atom, None):
        return None
    # fixing the atom's state and the root first lets nop edges carry
    # values across the graph, which the event branching relies on
    anchors = [cm.root]
    if atom is not None:
        anchors.insert(0, atom[1] if atom[0] == "SSP" else atom[2])
    return _anchor(cm, sup_dom, sig_dom, budget, has_nop, atom, anchors)


def _anchor(cm, sup_dom, sig_dom, budget, has_nop, atom, anchors):
    if not anchors:
        return _branch(cm, sup_dom, sig_dom, budget, has_nop, atom)
    s, rest = anchors[0], anchors[1:]
    if sup_dom[s] != 3:
        return _anchor(cm, sup_dom, sig_dom, budget, has_nop, atom, rest)
    for x in (1, 2):
        sd, gd = list(sup_dom), list(sig_dom)
        sd[s] = x
        if _propagate(cm, sd, gd, budget, has_nop, atom, cm.state_edge_ids[s] or None):
            found = _anchor(cm, sd, gd, budget, has_nop, atom, rest)
            if found is not None:
                return found
    return None


def _branch(cm, sup_dom, sig_dom, budget, has_nop, atom):
    best, best_key = -1, None
    for e, d in enumerate(sig_dom):
        if d & (d - 1):
            key = (bin(d).count("1"), -len(cm.ev_edge_ids[e]))
            if best_key is None or key < best_key:
                best, best_key = e, key
    if best < 0:
        r = cm.root
        if sup_dom[r] == 3:
            for x in (1, 2):
                sd, gd = list(sup_dom), list(sig_dom)
                sd[r] = x
                if _propagate(cm, sd, gd, budget, has_nop, atom, cm.state_edge_ids[r]):
                    return _extract(sd, gd)
            return None
        return _extract(sup_dom, sig_dom)
    d = sig_dom[best]
    values = [i for i in range(8) if d >> i & 1]
    for i in values:
        sd, gd = list(sup_dom), list(sig_dom)
        gd[best] = 1 << i
        if _propagate(cm, sd, gd, budget, has_nop, atom, cm.ev_edge_ids[best]):
            found = _branch(cm, sd, gd, budget, has_nop, atom)
            if found is not None:
                return found
    return None


def _extract(sup_dom, sig_dom):
    return [d >> 1 for d in sup_dom], [d.bit_length() - 1 for d in sig_dom]


def _propagate(cm, sup_dom, sig_dom, budget, has_nop, atom, seed_edges):
    edges = cm.edges
    table = EDGE_TABLE
    state_edge_ids = cm.state_edge_ids
    ev_edge_ids = cm.ev_edge_ids
    if seed_edges is None:
        queue = deque(range(len(edges)))
        queued = [True] * len(edges)
    else:
        queue = deque(seed_edges)
        queued = [False] * len(edges)
        for k in seed_edges:
            queued[k] = True
    while True:
        while queue:
            k = queue.popleft()
            queued[k] = False
            s, e, t = edges[k]
            ds, di, dt = sup_dom[s], sig_dom[e], sup_dom[t]
            ns, ni, nt = table[(ds << 10) | (di << 2) | dt]
            if not ni:
                return False
            if ns != ds:
                sup_dom[s] = ns
                for k2 in state_edge_ids[s]:
                    if not queued[k2]:
                        queued[k2] = True
                        queue.append(k2)
            if nt != dt:
                sup_dom[t] = nt
                for k2 in state_edge_ids[t]:
                    if not queued[k2]:
                        queued[k2] = True
                        queue.append(k2)
            if ni != di:
                sig_dom[e] = ni
                for k2 in ev_edge_ids[e]:
                    if not queued[k2]:
                        queued[k2] = True
                        queue.append(k2)
        changed = []
        if has_nop:
            forced = 0
            for d in sig_dom:
                if not d & NOP_MASK:
                    forced += 1
            if forced > budget:
                return False
            if forced == budget:
                for e, d in enumerate(sig_dom):
                    if d & NOP_MASK and d != NOP_MASK:
                        sig_dom[e] = NOP_MASK
                        changed.extend(ev_edge_ids[e])
        if atom is not None:
            kind, a, b = atom
            if kind == "SSP":
                da, db = sup_dom[a], sup_dom[b]
                if da in (1, 2) and db & da:
                    db &= ~da
                    if not db:
                        return False
                    sup_dom[b] = db
                    changed.extend(state_edge_ids[b])
                elif db in (1, 2) and da & db:
                    da &= ~db
                    if not da:
                        return False
                    sup_dom[a] = da
                    changed.extend(state_edge_ids[a])
            else:
                ds, di = sup_dom[b], sig_dom[a]
                ni = (UNDEF_ON[0] if ds & 1 else 0) | (UNDEF_ON[1] if ds & 2 else 0)
                ni &= di
                ns = (1 if ds & 1 and ni & UNDEF_ON[0] else 0) | (2 if ds & 2 and ni & UNDEF_ON[1] else 0)
                if not ni or not ns:
                    return False
                if ni != di:
                    sig_dom[a] = ni
                    changed.extend(ev_edge_ids[a])
                if ns != ds:
                    sup_dom[b] = ns
                    changed.extend(state_edge_ids[b])
        if not changed:
            return True
        for k in changed:
            if not queued[k]:
                queued[k] = True
                queue.append(k)
