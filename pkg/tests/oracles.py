"""Independent brute-force references used by the tests.

Nothing here shares code with the solver beyond the data model: regions are
found by trying every total support and every signature, and edge
consistency is checked from the raw interaction table.
"""

from itertools import product

from drsynth.core import NetType, TransitionSystem

TABLE = {
    "nop": (0, 1), "inp": (None, 0), "out": (1, None), "set": (1, 1),
    "res": (0, 0), "swap": (1, 0), "used": (None, 1), "free": (0, None),
}


def all_regions(ts: TransitionSystem, type: NetType):
    """Every (support, signature) pair satisfying all edges; as hashable keys."""
    names = sorted(i.value for i in type.members)
    found = []
    for bits in product((0, 1), repeat=len(ts.states)):
        sup = dict(zip(ts.states, bits))
        for values in product(names, repeat=len(ts.events)):
            sig = dict(zip(ts.events, values))
            if all(TABLE[sig[e]][sup[s]] == sup[t] for s, e, t in ts.edges):
                found.append((sup, sig))
    return found


def key(sup, sig):
    return (tuple(sorted(sup.items())), tuple(sorted(sig.items())))


def restricted(regions, d):
    return [(sup, sig) for sup, sig in regions if sum(v != "nop" for v in sig.values()) <= d]


def atoms(ts: TransitionSystem):
    out = []
    for a in range(len(ts.states)):
        for b in range(a + 1, len(ts.states)):
            out.append(("SSP", ts.states[a], ts.states[b]))
    enabled = {(s, e) for s, e, _ in ts.edges}
    for e in ts.events:
        for s in ts.states:
            if (s, e) not in enabled:
                out.append(("ESSP", e, s))
    return out


def solves(sup, sig, atom):
    kind, x, y = atom
    if kind == "SSP":
        return sup[x] != sup[y]
    return TABLE[sig[x]][sup[y]] is None


def brute_solvable(ts, type, d):
    """Set of atoms solved by some d-restricted region, and the full atom list."""
    regions = restricted(all_regions(ts, type), d)
    every = atoms(ts)
    solved = {a for a in every if any(solves(sup, sig, a) for sup, sig in regions)}
    return solved, every


def hitting_set_exists(universe, family, kappa):
    from itertools import combinations
    for size in range(kappa + 1):
        for combo in combinations(universe, size):
            if all(set(combo) & set(m) for m in family):
                return True
    return False


def random_ts(rng, max_states=5, max_events=3):
    """A random deterministic reachable TS with no orphan events.

    Every non-initial state gets a parent among the earlier states, so the
    result is reachable by construction; extra edges are added where they
    keep the transition function single-valued.
    """
    n = rng.randint(1, max_states)
    events = [f"e{i}" for i in range(rng.randint(1, max_events))]
    states = [f"s{i}" for i in range(n)]
    delta = {}
    for i in range(1, n):
        while True:
            parent, e = rng.randrange(i), rng.choice(events)
            if (parent, e) not in delta:
                delta[(parent, e)] = i
                break
    for _ in range(rng.randint(0, n * len(events))):
        s, e = rng.randrange(n), rng.choice(events)
        delta.setdefault((s, e), rng.randrange(n))
    if not delta:
        delta[(0, events[0])] = 0
    edges = [(states[s], e, states[t]) for (s, e), t in delta.items()]
    return TransitionSystem.build(edges, "s0", states=states)
