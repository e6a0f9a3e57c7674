import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from drsynth.core import NetType, parse_ts
from drsynth.nets import parse_net
from drsynth.reductions import DESIGNATED_TYPES, parse_hs

import oracles

DATA = Path(__file__).parent / "data"

TAU0 = NetType.of("nop", "inp", "free")
TAU1 = NetType.of("nop", "swap", "used", "set")
TYPES = [TAU0, TAU1] + [NetType.of(*DESIGNATED_TYPES[t]) for t in sorted(DESIGNATED_TYPES)]


def load_ts(name):
    return parse_ts((DATA / name).read_text())


def load_net(name):
    return parse_net((DATA / name).read_text())


def load_hs(name):
    return parse_hs((DATA / name).read_text())


@st.composite
def small_ts(draw, max_states=5, max_events=3):
    seed = draw(st.integers(0, 2**32 - 1))
    return oracles.random_ts(random.Random(seed), max_states, max_events)


@pytest.fixture
def a1():
    return load_ts("a1.ts")


@pytest.fixture
def a2():
    return load_ts("a2.ts")


@pytest.fixture
def a3():
    return load_ts("a3.ts")


@pytest.fixture
def four_sets():
    return load_hs("four_sets.hs")


# PASS/FAIL lines recorded by test_acceptance, echoed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
