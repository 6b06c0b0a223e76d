import os
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from bblab.catalog import sweep, summary_from_json
from bblab.machine import Machine

DATA = Path(__file__).parent / "data"
SLOW = os.environ.get("BBLAB_SLOW") == "1"

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def reference_run(name: tuple[int, ...], cap: int):
    """Deliberately naive oracle working straight from the integer name.

    Returns ("HALTED", steps, word, ones) or ("CAP_EXCEEDED", steps, None, None).
    """
    k = name[0]
    delta = {}
    for i in range(k):
        f, t = name[1 + 2 * i], name[2 + 2 * i]
        delta[(f // 2, f % 2)] = (t // 6, (t % 6) // 3, {0: -1, 1: 0, 2: 1}[t % 3])
    tape = {}
    head = state = steps = 0
    while True:
        key = (state, tape.get(head, 0))
        if key not in delta:
            cells = "".join(str(tape.get(i, 0)) for i in range(min(tape, default=0), max(tape, default=0) + 1))
            word = cells.strip("0")
            return "HALTED", steps, word, word.count("1")
        if steps == cap:
            return "CAP_EXCEEDED", steps, None, None
        state, tape[head], move = delta[key]
        head += move
        steps += 1


@st.composite
def machines(draw, max_states: int = 5):
    """Random machines with at most ``max_states`` states (dense count may be lower)."""
    n = draw(st.integers(1, max_states))
    froms = draw(st.sets(st.integers(0, 2 * n - 1), min_size=1))
    return Machine.from_pairs((f, draw(st.integers(0, 6 * n - 1))) for f in sorted(froms))


@pytest.fixture(scope="session")
def small_summaries():
    """Full sweeps of n = 1, 2, 3 at cap 1000."""
    return {n: sweep(n, 1000)[0] for n in (1, 2, 3)}


@pytest.fixture(scope="session")
def fresh_n4():
    """Canonical n = 4 sweep at cap 10000; takes over an hour on one core."""
    if not SLOW:
        pytest.skip("opt in with BBLAB_SLOW=1 (hours)")
    return sweep(4, 10000, canonical=True)


@pytest.fixture(scope="session")
def summary_n4(request):
    """The n = 4 summary: a fresh canonical sweep when BBLAB_SLOW=1, else the recorded one."""
    if SLOW:
        return request.getfixturevalue("fresh_n4")[0]
    return summary_from_json((DATA / "summary_n4.json").read_text(encoding="utf-8"))


RESULTS: list[str] = []  # acceptance lines, filled by test_acceptance


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
