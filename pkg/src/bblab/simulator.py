"""Blank-tape simulation with a step cap."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .machine import Machine

LAMBDA = "λ"

DEFAULT_CAP = 10_000


class Status(str, enum.Enum):
    HALTED = "HALTED"
    CAP_EXCEEDED = "CAP_EXCEEDED"


class Tape:
    """Unbounded binary tape backed by a bytearray that grows in both directions.

    ``lo``/``hi`` are the leftmost and rightmost positions the head has visited.
    """

    def __init__(self, capacity: int = 64) -> None:
        self.cells = bytearray(capacity)
        self.offset = capacity // 2
        self.lo = 0
        self.hi = 0

    def _grow(self, position: int) -> None:
        extra = len(self.cells)
        while not 0 <= position + self.offset < len(self.cells):
            if position + self.offset < 0:
                self.cells[0:0] = bytes(extra)
                self.offset += extra
            else:
                self.cells.extend(bytes(extra))
            extra = len(self.cells)

    def __getitem__(self, position: int) -> int:
        i = position + self.offset
        if 0 <= i < len(self.cells):
            return self.cells[i]
        return 0

    def __setitem__(self, position: int, value: int) -> None:
        if not 0 <= position + self.offset < len(self.cells):
            self._grow(position)
        self.cells[position + self.offset] = value
        self.touch(position)

    def touch(self, position: int) -> None:
        if position < self.lo:
            self.lo = position
        elif position > self.hi:
            self.hi = position

    def window(self, left: int, width: int) -> str:
        return "".join("1" if self[p] else "0" for p in range(left, left + width))

    def symbols(self) -> str:
        return self.window(self.lo, self.hi - self.lo + 1)


def extract_word(tape: Tape | str) -> str:
    """Symbols from the leftmost 1 to the rightmost 1; empty string for a blank tape."""
    text = tape if isinstance(tape, str) else tape.symbols()
    return text.strip("0")


def nr_ones(word: str) -> int:
    return word.count("1")


@dataclass(frozen=True)
class Outcome:
    status: Status
    steps: int
    word: str | None = None
    ones: int | None = None

    @property
    def halted(self) -> bool:
        return self.status is Status.HALTED

    def __str__(self) -> str:
        if not self.halted:
            return f"{self.status.value} steps={self.steps}"
        return f"{self.status.value} steps={self.steps} ones={self.ones} word={self.word or LAMBDA}"


@dataclass
class Config:
    tape: Tape
    head: int = 0
    state: int = 0
    step: int = 0


def _rule_table(m: Machine) -> list:
    table: list = [None] * (2 * m.n_states)
    for r in m.rules:
        table[r.from_index] = (r.to_state, r.write, r.move - 1)
    return table


def step_through(m: Machine, cap: int):
    """Yield the configuration before every step, then the final one.

    The same :class:`Config` object is mutated and re-yielded.
    """
    table = _rule_table(m)
    config = Config(Tape())
    yield config
    tape = config.tape
    while config.step < cap:
        action = table[2 * config.state + tape[config.head]]
        if action is None:
            return
        config.state, write, delta = action
        tape[config.head] = write
        config.head += delta
        tape.touch(config.head)
        config.step += 1
        yield config


def _final(m: Machine, cap: int) -> Config:
    for config in step_through(m, cap):
        pass
    return config


def run(m: Machine, cap: int = DEFAULT_CAP) -> Outcome:
    """Run ``m`` from the blank tape for at most ``cap`` rule applications."""
    if cap < 0:
        raise ValueError("cap must be non-negative")
    # hot loop: locals only, tape as a bytearray that doubles when the head leaves it
    table = _rule_table(m)
    size = 64
    cells = bytearray(size)
    pos = size // 2
    state = 0
    steps = 0
    while True:
        action = table[2 * state + cells[pos]]
        if action is None:
            text = cells.translate(_SYMBOLS).decode("ascii").strip("0")
            return Outcome(Status.HALTED, steps, text, text.count("1"))
        if steps >= cap:
            return Outcome(Status.CAP_EXCEEDED, steps)
        state, cells[pos], delta = action
        pos += delta
        steps += 1
        if pos < 0:
            cells[0:0] = bytes(size)
            pos += size
            size *= 2
        elif pos >= size:
            cells.extend(bytes(size))
            size *= 2


_SYMBOLS = bytes.maketrans(b"\x00\x01", b"01")


def render_trace(m: Machine, cap: int = DEFAULT_CAP, window: int | None = None) -> list[str]:
    """Render every configuration as ``Step N  <tape with [q> marker>  <tape>``.

    The window holds the whole touched extent; any extra width is split with
    the smaller half on the left.
    """
    final = _final(m, cap)
    lo, hi = final.tape.lo, final.tape.hi
    needed = hi - lo + 1
    width = needed if window is None else window
    if width < needed:
        raise ValueError(f"trace window of {width} cells is too small; need at least {needed}")
    left = lo - (width - needed) // 2
    lines = []
    for config in step_through(m, cap):
        plain = config.tape.window(left, width)
        at = config.head - left
        marked = f"{plain[:at]}[{config.state}>{plain[at:]}"
        lines.append(f"{'Step ' + str(config.step):<11}{marked}     {plain}")
    return lines
