"""Busy Beaver and Placid Platypus catalogs built from sweeps.

Every summary carries the step cap it was computed with: a capped sweep can
only claim results relative to that cap.
"""

from __future__ import annotations

import json
import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernel
from .enumeration import WHOLE, Shard, group_tables, plan_blocks
from .machine import Machine, decode_name, encode_name, parse_name
from .simulator import LAMBDA, Status, run
from .symmetry import canonical_form, orbit


@lru_cache(maxsize=1 << 16)
def _key(name: str) -> tuple[int, ...]:
    return parse_name(name)


@dataclass(frozen=True)
class Witness:
    """Halting machines with a given number of ones and rules.

    Keeps the fastest and slowest machine and every step count seen.
    """

    ones: int
    rules: int
    min_steps: int
    min_name: str
    max_steps: int
    max_name: str
    steps: frozenset[int] = frozenset()

    def merge(self, other: Witness) -> Witness:
        lo = min(self, other, key=lambda w: (w.min_steps, _key(w.min_name)))
        hi = min(self, other, key=lambda w: (-w.max_steps, _key(w.max_name)))
        return Witness(
            self.ones, self.rules, lo.min_steps, lo.min_name, hi.max_steps, hi.max_name, self.steps | other.steps
        )


@dataclass(frozen=True)
class BBSummary:
    """Partial or complete Busy Beaver summary for machines with at most ``n`` states.

    ``winners`` maps machine name to (steps, word) for every machine attaining
    ``bb_value``; ``bb_value == 0`` means no halting machine printed a 1.
    """

    n: int
    cap: int
    bb_value: int = 0
    winners: Mapping[str, tuple[int, str]] = field(default_factory=dict)
    witnesses: Mapping[tuple[int, int], Witness] = field(default_factory=dict)

    @property
    def machines(self) -> frozenset[str]:
        return frozenset(self.winners)

    @property
    def words(self) -> frozenset[str]:
        return frozenset(word for _, word in self.winners.values())

    @property
    def kt_bb(self) -> int | None:
        return min((steps for steps, _ in self.winners.values()), default=None)

    @property
    def base_names(self) -> frozenset[str]:
        return frozenset(encode_name(canonical_form(decode_name(name), self.n)) for name in self.winners)

    def step_multiset(self) -> Counter:
        return Counter(steps for steps, _ in self.winners.values())

    def records(self) -> list[CatalogRecord]:
        return [
            CatalogRecord(name, Status.HALTED, steps, self.bb_value, word)
            for name, (steps, word) in sorted(self.winners.items(), key=lambda item: _key(item[0]))
        ]


def empty_summary(n: int, cap: int) -> BBSummary:
    return BBSummary(n, cap)


def merge(a: BBSummary, b: BBSummary) -> BBSummary:
    """Combine two partial summaries built with the same ``n`` and cap."""
    if (a.n, a.cap) != (b.n, b.cap):
        raise ValueError(f"cannot merge n={a.n}, cap={a.cap} with n={b.n}, cap={b.cap}")
    bb = max(a.bb_value, b.bb_value)
    winners = {}
    for part in (a, b):
        if part.bb_value == bb:
            winners.update(part.winners)
    witnesses = dict(a.witnesses)
    for key, w in b.witnesses.items():
        witnesses[key] = witnesses[key].merge(w) if key in witnesses else w
    return BBSummary(a.n, a.cap, bb, winners, witnesses)


@dataclass(frozen=True)
class SweepStats:
    """Machine counts from a sweep; ``covered`` counts orbit members of canonical picks."""

    visited: int = 0
    covered: int = 0
    halted: int = 0
    capped: int = 0

    def __add__(self, other: SweepStats) -> SweepStats:
        return SweepStats(*(x + y for x, y in zip(self.astuple(), other.astuple())))

    def astuple(self) -> tuple[int, int, int, int]:
        return self.visited, self.covered, self.halted, self.capped


class _Builder:
    """Accumulates a summary one halting machine at a time."""

    def __init__(self, n: int, cap: int) -> None:
        self.n = n
        self.cap = cap
        self.bb = 0
        self.winners: dict[str, tuple[int, str]] = {}
        self.witnesses: dict[tuple[int, int], Witness] = {}

    def witness(self, name: str, k: int, ones: int, steps: int) -> None:
        w = Witness(ones, k, steps, name, steps, name, frozenset((steps,)))
        key = (ones, k)
        self.witnesses[key] = self.witnesses[key].merge(w) if key in self.witnesses else w

    def winner(self, name: str, ones: int, steps: int, word: str) -> None:
        if ones == 0 or ones < self.bb:
            return
        if ones > self.bb:
            self.bb = ones
            self.winners = {}
        self.winners[name] = (steps, word)

    def summary(self) -> BBSummary:
        return BBSummary(self.n, self.cap, self.bb, self.winners, self.witnesses)


def build_bb_summary(
    n: int, cap: int, machines: Iterable[Machine], expand_orbits: bool = False
) -> BBSummary:
    """Summarise a stream by simulating each machine in Python.

    With ``expand_orbits`` the stream holds one representative per symmetry
    orbit and every orbit member is accounted for.
    """
    builder = _Builder(n, cap)
    seen = False
    for m in machines:
        seen = True
        outcome = run(m, cap)
        if not outcome.halted:
            continue
        rep = canonical_form(m, n) if expand_orbits else m
        builder.witness(encode_name(rep), m.k, outcome.ones, outcome.steps)
        if outcome.ones >= builder.bb and outcome.ones > 0:
            members = orbit(m, n) if expand_orbits else (m,)
            for member in members:
                image = run(member, cap)
                builder.winner(encode_name(member), image.ones, image.steps, image.word)
    if not seen:
        raise ValueError("cannot summarise an empty machine stream")
    return builder.summary()


def sweep(
    n: int,
    cap: int,
    shard: Shard = WHOLE,
    canonical: bool = False,
    prune: bool = True,
    max_block: int = 1 << 24,
    progress: Callable[[int, int], None] | None = None,
    ones_cap: int | None = None,
    winner_cap: int = 1 << 14,
    step_set_cap: int = 1 << 16,
) -> tuple[BBSummary, SweepStats]:
    """Exhaustive compiled sweep of the ``n``-state space (or one shard of it).

    ``progress(done, total)`` is called after each block with ordinals done.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    nf = 2 * n
    ones_cap = min(cap, 4096) + 1 if ones_cap is None else ones_cap
    fsrc, tmap = group_tables(n)
    tape = np.zeros(2 * cap + 3, np.int8)
    bsnap = np.zeros_like(tape)
    tsnap = np.zeros_like(tape)
    counts = np.zeros(8, np.int64)
    stats_steps = np.full((ones_cap, nf + 1, 3), -1, np.int64)
    stats_steps[:, :, 2] = 0
    stats_tabs = np.full((ones_cap, nf + 1, 2, nf), -1, np.int64)
    best = np.zeros(2, np.int64)
    win_tabs = np.zeros((winner_cap, nf), np.int64)
    win_steps = np.zeros(winner_cap, np.int64)
    step_keys = np.full(1 << max(4, (step_set_cap - 1).bit_length()), -1, np.int64)
    total = (6 * n + 1) ** nf - 1
    for block in plan_blocks(n, max_block):
        _kernel.sweep_block(
            n, block.k, np.array(block.subset, np.int64), np.array(block.prefix, np.int64),
            block.ordinal, cap, shard.index, shard.total, canonical, prune,
            fsrc, tmap, tape, bsnap, tsnap, counts, stats_steps, stats_tabs, best,
            win_tabs, win_steps, step_keys,
        )
        if progress is not None:
            progress(block.ordinal + block.size, total)
    if counts[4]:
        raise RuntimeError(f"{counts[4]} halting machines printed more than {ones_cap - 1} ones; raise ones_cap")
    if counts[5]:
        raise RuntimeError(f"more than {winner_cap} machines attain the maximum; raise winner_cap")
    if counts[7]:
        raise RuntimeError(f"more than {counts[6]} distinct (ones, rules, steps) triples; raise step_set_cap")

    seen: dict[tuple[int, int], set[int]] = {}
    for key in step_keys[step_keys >= 0].tolist():
        group, steps = divmod(key, cap + 1)
        seen.setdefault(divmod(group, nf + 1), set()).add(steps)

    witnesses = {}
    for ones, k in zip(*np.nonzero(stats_steps[:, :, 0] >= 0)):
        ones, k = int(ones), int(k)
        witnesses[(ones, k)] = Witness(
            ones, k,
            int(stats_steps[ones, k, 0]), encode_name(Machine.from_table(stats_tabs[ones, k, 0])),
            int(stats_steps[ones, k, 1]), encode_name(Machine.from_table(stats_tabs[ones, k, 1])),
            frozenset(seen[(ones, k)]),
        )
    builder = _Builder(n, cap)
    builder.witnesses = witnesses
    for i in range(int(best[1])):
        m = Machine.from_table(win_tabs[i])
        for member in orbit(m, n) if canonical else (m,):
            outcome = run(member, cap)
            if outcome.steps != win_steps[i] or outcome.ones != best[0]:
                raise AssertionError(f"compiled and reference runs disagree on {encode_name(member)}")
            builder.winner(encode_name(member), outcome.ones, outcome.steps, outcome.word)
    visited, covered, halted, capped = (int(x) for x in counts[:4])
    return builder.summary(), SweepStats(visited, covered, halted, capped)


def stderr_progress(every: float = 5.0) -> Callable[[int, int], None]:
    """Progress callback printing to standard error at most every ``every`` seconds."""
    start = last = time.monotonic()

    def report(done: int, total: int) -> None:
        nonlocal last
        now = time.monotonic()
        if now - last >= every or done == total:
            last = now
            print(f"[{now - start:8.1f}s] {done}/{total} ({100 * done / total:.2f}%)", file=sys.stderr)

    return report


# -- Placid Platypus ---------------------------------------------------------


@dataclass(frozen=True)
class PPEntry:
    """Fewest states needed to halt with exactly ``ones`` ones, with witnesses.

    ``shortest`` is the slowest machine among those with the fewest rules and
    ``steps`` holds every step count of a ``pp_value``-state witness.
    Unknown targets have ``pp_value`` None.
    """

    ones: int
    pp_value: int | None
    witness_min_steps: tuple[str, int] | None = None
    witness_max_steps: tuple[str, int] | None = None
    min_rules: int | None = None
    shortest: tuple[str, int] | None = None
    steps: frozenset[int] = frozenset()


def bracket_pp(ones: int, bb_values: Sequence[int]) -> int | None:
    """``k`` with ``BB(k-1) < ones <= BB(k)``, where ``bb_values[k-1] = BB(k)`` and BB(0) = 0."""
    previous = 0
    for k, bb in enumerate(bb_values, start=1):
        if previous < ones <= bb:
            return k
        previous = bb
    return None


def build_pp_table(max_ones: int, summaries: Iterable[BBSummary]) -> list[PPEntry]:
    """PP entries for 1..max_ones from complete summaries for n = 1..K."""
    by_n = {s.n: s for s in summaries}
    if sorted(by_n) != list(range(1, len(by_n) + 1)):
        raise ValueError(f"need summaries for every n from 1 up, got {sorted(by_n)}")
    entries = []
    for ones in range(1, max_ones + 1):
        entry = PPEntry(ones, None)
        for n in sorted(by_n):
            found = [w for (o, _), w in by_n[n].witnesses.items() if o == ones]
            if not found:
                continue
            lo = min(found, key=lambda w: (w.min_steps, _key(w.min_name)))
            hi = min(found, key=lambda w: (-w.max_steps, _key(w.max_name)))
            short = min(found, key=lambda w: w.rules)
            entry = PPEntry(
                ones, n,
                (lo.min_name, lo.min_steps), (hi.max_name, hi.max_steps),
                short.rules, (short.max_name, short.max_steps),
                frozenset().union(*(w.steps for w in found)),
            )
            break
        entries.append(entry)
    return entries


# -- persistence -------------------------------------------------------------


@dataclass(frozen=True)
class CatalogRecord:
    name: str
    status: Status
    steps: int
    ones: int | None = None
    word: str | None = None

    def check(self, cap: int) -> bool:
        """True when re-simulating the named machine reproduces this record."""
        outcome = run(decode_name(self.name), cap)
        return (outcome.status, outcome.steps, outcome.ones, outcome.word) == (
            self.status, self.steps, self.ones, self.word
        )


class CatalogFormatError(ValueError):
    pass


def _cell(value) -> str:
    return "-" if value is None else str(value)


def format_record(r: CatalogRecord) -> str:
    word = None if r.word is None else (r.word or LAMBDA)
    return "\t".join((r.name, r.status.value, str(r.steps), _cell(r.ones), _cell(word)))


def write_catalog(path: str | Path, records: Iterable[CatalogRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(format_record(r) + "\n")


def read_catalog(path: str | Path) -> list[CatalogRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                name, status, steps, ones, word = line.split("\t")
                parse_name(name)
                record = CatalogRecord(
                    name,
                    Status(status),
                    int(steps),
                    None if ones == "-" else int(ones),
                    None if word == "-" else ("" if word == LAMBDA else word),
                )
            except ValueError as exc:
                raise CatalogFormatError(f"{path}:{lineno}: {exc}") from None
            if record.word is not None and set(record.word) - {"0", "1"}:
                raise CatalogFormatError(f"{path}:{lineno}: bad word {word!r}")
            records.append(record)
    return records


def format_summary(s: BBSummary) -> str:
    """Flat ``key = value`` text, stable for golden files."""
    steps = ",".join(f"{k}x{v}" for k, v in sorted(s.step_multiset().items()))
    lines = [
        f"n = {s.n}",
        f"cap = {s.cap}",
        f"bb = {s.bb_value}",
        f"machines = {len(s.winners)}",
        f"kt_bb = {_cell(s.kt_bb)}",
        f"steps = {steps}",
        f"words = {','.join(sorted(s.words, key=lambda w: (len(w), w)))}",
        f"bases = {len(s.base_names)}",
    ]
    for name in sorted(s.base_names, key=_key):
        lines.append(f"base = {name}")
    return "\n".join(lines) + "\n"


def summary_to_json(s: BBSummary) -> str:
    doc = {
        "n": s.n,
        "cap": s.cap,
        "bb_value": s.bb_value,
        "winners": {name: list(v) for name, v in sorted(s.winners.items(), key=lambda i: _key(i[0]))},
        "witnesses": [
            [w.ones, w.rules, w.min_steps, w.min_name, w.max_steps, w.max_name, sorted(w.steps)]
            for _, w in sorted(s.witnesses.items())
        ],
    }
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def summary_from_json(text: str) -> BBSummary:
    doc = json.loads(text)
    winners = {name: (int(steps), word) for name, (steps, word) in doc["winners"].items()}
    witnesses = {}
    for ones, rules, lo, lo_name, hi, hi_name, steps in doc["witnesses"]:
        witnesses[(ones, rules)] = Witness(ones, rules, lo, lo_name, hi, hi_name, frozenset(steps))
    return BBSummary(doc["n"], doc["cap"], doc["bb_value"], winners, witnesses)
