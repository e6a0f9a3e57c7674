import pytest
from hypothesis import given

from drsynth.core import (Interaction, InvalidTransitionSystem, MembershipError, NetType,
                          TransitionSystem, TSFormatError, interaction_apply, parse_ts,
                          serialize_ts, type_step, validate_ts)
from drsynth.reductions import THEOREMS, build

from conftest import TAU0, load_ts, small_ts
import oracles


def test_interaction_table_cell_by_cell():
    defined = 0
    for i in Interaction:
        for x in (0, 1):
            assert interaction_apply(i, x) == oracles.TABLE[i.value][x]
            defined += interaction_apply(i, x) is not None
    assert defined == 12


@pytest.mark.parametrize("i, x, want", [
    (Interaction.INP, 1, 0),
    (Interaction.INP, 0, None),
    (Interaction.NOP, 0, 0),
    (Interaction.SWAP, 0, 1),
])
def test_interaction_apply(i, x, want):
    assert interaction_apply(i, x) == want


def test_canonical_interaction_order():
    assert [i.value for i in Interaction] == ["nop", "inp", "out", "set", "res", "swap", "used", "free"]
    assert [i.index for i in Interaction] == list(range(8))


def test_type_step():
    t = NetType.parse("nop,inp,swap")
    assert type_step(t, 1, Interaction.INP) == 0
    with pytest.raises(MembershipError):
        type_step(t, 0, Interaction.SET)
    assert type_step(TAU0, 1, Interaction.FREE) is None


def test_nettype_parse_rejects_garbage():
    with pytest.raises(ValueError):
        NetType.parse("nop,bogus")
    with pytest.raises(ValueError):
        NetType.parse("")


def test_nettype_ordered_and_nop():
    t = NetType.parse("swap, nop ,inp")
    assert t.ordered == (Interaction.NOP, Interaction.INP, Interaction.SWAP)
    assert t.has_nop
    assert not NetType.of("set", "res").has_nop


def test_parse_marking_path():
    ts = parse_ts("states 10 01 00\ninitial 10\nevents a b\narc 10 a 01\narc 01 b 00\n")
    assert len(ts.states) == 3 and ts.events == ("a", "b")
    assert ts.successor("10", "a") == "01"
    assert ts.successor("10", "b") is None


def test_parse_single_state():
    ts = parse_ts("states s\ninitial s\n")
    assert ts.states == ("s",) and ts.events == () and ts.edges == ()


def test_parse_rejects_nondeterminism():
    text = "states s0 s1 s2\ninitial s0\nevents a\narc s0 a s1\narc s0 a s2\n"
    with pytest.raises(TSFormatError) as exc:
        parse_ts(text)
    assert exc.value.line == 5


@pytest.mark.parametrize("text", [
    "initial s0\n",
    "states s0\n",
    "states s0\ninitial s9\n",
    "states s0\ninitial s0\nevents a\narc s0 b s0\n",
    "states s0\ninitial s0\nevents a\narc s0 a\n",
    "states s0\ninitial s0\nfoo\n",
    "states s0 s0\ninitial s0\n",
    "states s(0)\ninitial s(0)\n",
])
def test_parse_syntax_errors(text):
    with pytest.raises(TSFormatError):
        parse_ts(text)


def test_parse_rejects_unreachable_and_orphans():
    with pytest.raises(InvalidTransitionSystem) as exc:
        parse_ts("states s0 s1\ninitial s0\nevents a b\narc s0 a s0\n")
    assert any("unreachable" in v for v in exc.value.violations)
    assert any("orphan" in v for v in exc.value.violations)


def test_comments_and_blank_lines():
    ts = parse_ts("# header\n\nstates s0 s1  # trailing\ninitial s0\nevents a\narc s0 a s1\n")
    assert ts.edges == (("s0", "a", "s1"),)


def test_validate_a1_clean():
    assert validate_ts(load_ts("a1.ts")) == []


def test_validate_isolated_state():
    ts = TransitionSystem.build([("s0", "a", "s0")], "s0", states=["s0", "s1"])
    violations = validate_ts(ts)
    assert len(violations) == 1 and "unreachable" in violations[0]


def test_validate_nondeterministic_structure():
    ts = TransitionSystem.build([("s0", "a", "s1"), ("s0", "a", "s2"), ("s1", "b", "s2")], "s0")
    assert any("nondeterministic" in v for v in validate_ts(ts))


@pytest.mark.parametrize("theorem", THEOREMS)
def test_validate_gadgets(four_sets, theorem):
    assert validate_ts(build(four_sets, theorem).ts) == []


def test_serialize_comments():
    text = serialize_ts(load_ts("a2.ts"), ["d = 3"])
    assert text.startswith("# d = 3\n")


@given(small_ts())
def test_roundtrip_parse_serialize(ts):
    again = parse_ts(serialize_ts(ts))
    assert again == ts
    assert serialize_ts(again) == serialize_ts(ts)


def _bfs_ok(ts):
    seen, todo = {ts.initial}, [ts.initial]
    while todo:
        s = todo.pop()
        for (a, e, b) in ts.edges:
            if a == s and b not in seen:
                seen.add(b)
                todo.append(b)
    single = len({(a, e) for a, e, _ in ts.edges}) == len(ts.edges)
    return seen == set(ts.states) and single


@given(small_ts())
def test_validate_matches_bfs_on_generated(ts):
    assert (validate_ts(ts) == []) == _bfs_ok(ts)


@given(small_ts())
def test_validate_flags_added_unreachable_state(ts):
    broken = TransitionSystem.build(ts.edges, ts.initial, states=ts.states + ("zz",))
    assert (validate_ts(broken) == []) == _bfs_ok(broken) == False
