"""Mirror and state-relabelling symmetries, orbits and canonical representatives.

Both transforms preserve the step count of a blank-tape run; mirroring reverses
the output word and relabelling the non-start states leaves it unchanged.
Orbits are taken in the space of machines with at most ``n_states`` states,
which defaults to the machine's own dense state count.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Iterable, Sequence

from .machine import Machine, Move, Rule


def mirror(m: Machine) -> Machine:
    """Swap LEFT and RIGHT in every rule; STAY is fixed."""
    return Machine(tuple(r._replace(move=Move(2 - r.move)) for r in m.rules), m.n_states)


def _check_permutation(p: Sequence[int]) -> None:
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"{list(p)} is not a permutation of 0..{len(p) - 1}")
    if p[0] != 0:
        raise ValueError("state permutations must fix the start state 0")


def permute_states(m: Machine, p: Sequence[int]) -> Machine:
    """Relabel state ``q`` as ``p[q]``; ``p`` covers exactly ``m.n_states`` states."""
    if len(p) != m.n_states:
        raise ValueError(f"permutation has {len(p)} entries but the machine has {m.n_states} states")
    return _relabel(m, p)


def _relabel(m: Machine, p: Sequence[int]) -> Machine:
    # p may be wider than m.n_states; the image is re-densified
    _check_permutation(p)
    return Machine.from_rules(
        Rule(p[r.from_state], r.read, p[r.to_state], r.write, r.move) for r in m.rules
    )


@lru_cache(maxsize=None)
def state_permutations(n: int) -> tuple[tuple[int, ...], ...]:
    """All permutations of ``range(n)`` fixing 0, identity first."""
    return tuple((0,) + rest for rest in permutations(range(1, n)))


def group_order(n: int) -> int:
    return 2 * len(state_permutations(n))


def orbit(m: Machine, n_states: int | None = None) -> frozenset[Machine]:
    n = m.n_states if n_states is None else n_states
    if n < m.n_states:
        raise ValueError(f"space of {n} states cannot hold a {m.n_states}-state machine")
    images = set()
    for p in state_permutations(n):
        image = _relabel(m, p)
        images.add(image)
        images.add(mirror(image))
    return frozenset(images)


def name_key(m: Machine) -> tuple[int, ...]:
    """Total order used for canonical forms and tie-breaks: the integer name tuple."""
    return m.name_tuple()


def canonical_form(m: Machine, n_states: int | None = None) -> Machine:
    return min(orbit(m, n_states), key=name_key)


def is_canonical(m: Machine, n_states: int | None = None) -> bool:
    return canonical_form(m, n_states) == m


def base_set(machines: Iterable[Machine], n_states: int | None = None) -> frozenset[Machine]:
    return frozenset(canonical_form(m, n_states) for m in machines)


def expand(machines: Iterable[Machine], n_states: int | None = None) -> frozenset[Machine]:
    """Union of the orbits of ``machines``."""
    out: set[Machine] = set()
    for m in machines:
        out |= orbit(m, n_states)
    return frozenset(out)
