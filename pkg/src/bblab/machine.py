"""Binary-tape Turing machines without a halt state, and their integer names.

A machine is a partial transition function ``(state, read) -> (state, write, move)``.
An undefined pair halts the machine.  Rules are addressed by two small integers:

* from-index ``2*state + read``
* to-index ``6*state + 3*write + move``

A machine is named by the tuple ``(k, f1, t1, ..., fk, tk)`` listing its ``k``
rules in ascending from-index order, e.g. ``(6, 0, 9, 1, 14, 2, 18, 3, 3, 4, 5, 6, 15)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, NamedTuple


class Move(IntEnum):
    LEFT = 0
    STAY = 1
    RIGHT = 2

    @property
    def letter(self) -> str:
        return "LSR"[self]

    @property
    def delta(self) -> int:
        return self - 1


class MachineNameError(ValueError):
    """Raised when a machine name cannot be parsed or is inconsistent."""


def from_index(state: int, read: int) -> int:
    return 2 * state + read


def to_index(state: int, write: int, move: int) -> int:
    return 6 * state + 3 * write + int(move)


def split_from(index: int) -> tuple[int, int]:
    """``from[i] = {i/2, i mod 2}``"""
    return index // 2, index % 2


def split_to(index: int) -> tuple[int, int, Move]:
    """``to[j] = {j/6, (j mod 6)/3, j mod 3}``"""
    return index // 6, (index % 6) // 3, Move(index % 3)


class Rule(NamedTuple):
    from_state: int
    read: int
    to_state: int
    write: int
    move: Move

    @property
    def from_index(self) -> int:
        return from_index(self.from_state, self.read)

    @property
    def to_index(self) -> int:
        return to_index(self.to_state, self.write, self.move)

    @classmethod
    def from_indexes(cls, f: int, t: int) -> Rule:
        q, c = split_from(f)
        q2, w, d = split_to(t)
        return cls(q, c, q2, w, d)

    def __str__(self) -> str:
        return f"({self.from_state},{self.read})->({self.to_state},{self.write},{self.move.letter})"


@dataclass(frozen=True)
class Machine:
    """A partial transition function plus its dense state count.

    ``rules`` is kept sorted by from-index so equal machines compare equal.
    Construction does not validate; see :func:`validate`.
    """

    rules: tuple[Rule, ...]
    n_states: int

    def __post_init__(self) -> None:
        rules = (Rule(q, c, q2, w, Move(d)) for q, c, q2, w, d in self.rules)
        ordered = tuple(sorted(rules, key=lambda r: (r.from_index, r.to_index)))
        object.__setattr__(self, "rules", ordered)

    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> Machine:
        rules = tuple(rules)
        return cls(rules, dense_state_count(rules))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> Machine:
        return cls.from_rules(Rule.from_indexes(f, t) for f, t in pairs)

    @classmethod
    def from_table(cls, table: Iterable[int]) -> Machine:
        """Build from a dense table where ``table[f]`` is a to-index or -1."""
        return cls.from_pairs((f, t) for f, t in enumerate(table) if t >= 0)

    @property
    def k(self) -> int:
        return len(self.rules)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((r.from_index, r.to_index) for r in self.rules)

    def name_tuple(self) -> tuple[int, ...]:
        out = [self.k]
        for f, t in self.pairs():
            out += (f, t)
        return tuple(out)

    def table(self, n_states: int | None = None) -> list[int]:
        n = self.n_states if n_states is None else n_states
        tab = [-1] * (2 * n)
        for r in self.rules:
            tab[r.from_index] = r.to_index
        return tab

    def lookup(self) -> dict[tuple[int, int], Rule]:
        return {(r.from_state, r.read): r for r in self.rules}

    def __str__(self) -> str:
        return encode_name(self)


def dense_state_count(rules: Iterable[Rule]) -> int:
    top = 0
    for r in rules:
        top = max(top, r.from_state, r.to_state)
    return top + 1


_NAME_RE = re.compile(r"^\s*\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)\s*$")


def parse_name(text: str) -> tuple[int, ...]:
    """Parse name text into the integer tuple, checking only the syntax and ``k``."""
    match = _NAME_RE.match(text)
    if not match:
        raise MachineNameError(f"not a machine name: {text!r}")
    values = tuple(int(v) for v in match.group(1).split(","))
    k, rest = values[0], values[1:]
    if len(rest) % 2:
        raise MachineNameError(f"odd number of indexes after k in {text!r}")
    if k != len(rest) // 2:
        raise MachineNameError(f"k={k} but {len(rest) // 2} rule pairs in {text!r}")
    if k < 1:
        raise MachineNameError("a machine needs at least one rule")
    if any(v < 0 for v in rest):
        raise MachineNameError(f"negative index in {text!r}")
    return values


def decode_tuple(values: tuple[int, ...] | list[int]) -> Machine:
    pairs = sorted(zip(values[1::2], values[2::2]))
    froms = [f for f, _ in pairs]
    for a, b in zip(froms, froms[1:]):
        if a == b:
            raise MachineNameError(f"duplicate from-index {a}")
    return Machine.from_pairs(pairs)


def decode_name(text: str) -> Machine:
    return decode_tuple(parse_name(text))


def format_name(values: Iterable[int]) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"


def encode_name(m: Machine) -> str:
    return format_name(m.name_tuple())


def validate(m: Machine) -> list[str]:
    """List every violated machine invariant; empty means valid."""
    problems = []
    if not 1 <= m.k <= 2 * max(m.n_states, 0):
        problems.append(f"rule-count: k={m.k} outside 1..{2 * m.n_states}")
    seen: dict[tuple[int, int], Rule] = {}
    for r in m.rules:
        key = (r.from_state, r.read)
        if key in seen:
            problems.append(f"duplicate-source: {seen[key]} and {r} share source {key}")
        seen[key] = r
        if r.read not in (0, 1) or r.write not in (0, 1):
            problems.append(f"binary-alphabet: {r}")
        if r.from_state < 0 or r.to_state < 0:
            problems.append(f"negative-state: {r}")
        for q in (r.from_state, r.to_state):
            if q >= m.n_states:
                problems.append(f"dense-state: {r} mentions state {q} but n_states={m.n_states}")
    if m.rules and m.n_states != dense_state_count(m.rules):
        problems.append(
            f"dense-state: n_states={m.n_states} but highest mentioned state is "
            f"{dense_state_count(m.rules) - 1}"
        )
    return problems


def machine_space_size(n: int) -> int:
    """Number of machines with at most ``n`` states: ``(6n+1)**(2n) - 1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return (6 * n + 1) ** (2 * n) - 1


def render_dot(m: Machine) -> str:
    lines = ["digraph machine {"]
    for q in range(m.n_states):
        lines.append(f'  q{q} [shape=circle, label="{q}"];')
    for r in m.rules:
        lines.append(f'  q{r.from_state} -> q{r.to_state} [label="{r.read},{r.write},{r.move.letter}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_EDGE_RE = re.compile(r'^\s*q(\d+) -> q(\d+) \[label="([01]),([01]),([LSR])"\];$')


def parse_dot_edges(text: str) -> Machine:
    """Recover a machine from :func:`render_dot` output."""
    rules = []
    for line in text.splitlines():
        match = _EDGE_RE.match(line)
        if match:
            q, q2, c, w, d = match.groups()
            rules.append(Rule(int(q), int(c), int(q2), int(w), Move("LSR".index(d))))
    return Machine.from_rules(rules)
