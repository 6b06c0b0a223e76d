"""Compiled inner loops for exhaustive sweeps.

Machines are handled as dense tables: ``table[f]`` is the to-index of the rule
with from-index ``f`` or -1.  A block is every machine with a fixed rule count
``k``, a fixed from-index subset and a fixed leading run of to-index digits;
the remaining digits are walked as a mixed-radix odometer, most significant
first, which reproduces the stream order of :mod:`bblab.enumeration`.

Three sound shortcuts are available to the sweep (``prune=True``).  Each one
only ever labels a machine CAP_EXCEEDED when it provably never halts, so the
aggregated results equal plain capped simulation:

* no undefined (state, symbol) pair is reachable in the transition graph;
* a full configuration repeats (checked against snapshots at steps 1, 2, 4, ...);
* a translated cycle: two record-breaking visits to fresh cells on the same
  side in the same state, where the tape behind the head is a shifted copy.
"""

import numpy as np
from numba import njit

HALTED = 0
CAPPED = 1
PROVEN = 2  # never halts; reported as CAP_EXCEEDED


@njit(cache=True)
def can_halt(table, n):
    reach = np.zeros(n, np.bool_)
    reach[0] = True
    changed = True
    while changed:
        changed = False
        for f in range(2 * n):
            t = table[f]
            if t >= 0 and reach[f >> 1]:
                q = t // 6
                if not reach[q]:
                    reach[q] = True
                    changed = True
    for f in range(2 * n):
        if table[f] < 0 and reach[f >> 1]:
            return True
    return False


@njit(cache=True)
def simulate(table, cap, tape, bsnap, tsnap, prune, result):
    """Run from the blank tape centred at ``cap + 1``.

    ``result`` receives (status, steps, lo, hi).  The caller owns clearing
    ``tape[lo:hi+1]`` afterwards.
    """
    mid = cap + 1
    h = mid
    lo = mid
    hi = mid
    q = 0
    s = 0
    status = CAPPED
    # repeated-configuration snapshot
    b_valid = False
    b_next = 1
    b_q = 0
    b_h = 0
    b_lo = 0
    b_hi = 0
    # translated-cycle snapshot
    t_valid = False
    t_next = 1
    t_dir = 0
    t_q = 0
    t_h = 0
    t_lo = 0
    t_hi = 0
    t_m = 0
    while True:
        t = table[2 * q + tape[h]]
        if t < 0:
            status = HALTED
            break
        if s == cap:
            status = CAPPED
            break
        tape[h] = (t % 6) // 3
        h += t % 3 - 1
        q = t // 6
        s += 1
        rec = 0
        if h < lo:
            lo = h
            rec = -1
        elif h > hi:
            hi = h
            rec = 1
        if not prune:
            continue
        if t_valid:
            if t_dir == 1:
                if h < t_m:
                    t_m = h
            elif h > t_m:
                t_m = h
        if rec != 0:
            if t_valid and rec == t_dir and q == t_q:
                same = True
                if rec == 1:
                    d = h - t_h
                    for x in range(t_m, t_h + 1):
                        old = tsnap[x] if t_lo <= x <= t_hi else 0
                        if tape[x + d] != old:
                            same = False
                            break
                else:
                    d = t_h - h
                    for x in range(t_h, t_m + 1):
                        old = tsnap[x] if t_lo <= x <= t_hi else 0
                        if tape[x - d] != old:
                            same = False
                            break
                if same:
                    status = PROVEN
                    break
            if s >= t_next:
                t_valid = True
                t_dir = rec
                t_q = q
                t_h = h
                t_m = h
                t_lo = lo
                t_hi = hi
                for x in range(lo, hi + 1):
                    tsnap[x] = tape[x]
                t_next = 2 * s
        if b_valid and q == b_q and h == b_h:
            same = True
            for x in range(lo, hi + 1):
                old = bsnap[x] if b_lo <= x <= b_hi else 0
                if tape[x] != old:
                    same = False
                    break
            if same:
                status = PROVEN
                break
        if s == b_next:
            b_valid = True
            b_q = q
            b_h = h
            b_lo = lo
            b_hi = hi
            for x in range(lo, hi + 1):
                bsnap[x] = tape[x]
            b_next = 2 * s
    result[0] = status
    result[1] = s
    result[2] = lo
    result[3] = hi


@njit(cache=True)
def compare_tables(a, b, nf):
    """Order two machine tables by their name tuples (same rule count assumed)."""
    for f in range(nf):
        x = a[f]
        y = b[f]
        if x == y:
            continue
        if x < 0:
            return 1
        if y < 0:
            return -1
        return -1 if x < y else 1
    return 0


@njit(cache=True)
def canonical_check(table, nf, fsrc, tmap):
    """Return the stabiliser size if ``table`` is its orbit minimum, else 0."""
    stab = 1
    for g in range(1, fsrc.shape[0]):
        cmp = 0
        for f in range(nf):
            x = table[f]
            src = table[fsrc[g, f]]
            y = tmap[g, src] if src >= 0 else -1
            if x == y:
                continue
            if x < 0:
                cmp = 1
            elif y < 0:
                cmp = -1
            else:
                cmp = -1 if x < y else 1
            break
        if cmp == 1:
            return 0
        if cmp == 0:
            stab += 1
    return stab


@njit(cache=True)
def _record(stats_steps, stats_tabs, ones, k, slot, steps, table, nf):
    # slot 0 keeps the minimum step count, slot 1 the maximum; ties go to the smaller name
    cur = stats_steps[ones, k, slot]
    if cur < 0:
        better = True
    elif steps == cur:
        better = compare_tables(table, stats_tabs[ones, k, slot], nf) < 0
    elif slot == 0:
        better = steps < cur
    else:
        better = steps > cur
    if better:
        stats_steps[ones, k, slot] = steps
        for f in range(nf):
            stats_tabs[ones, k, slot, f] = table[f]


@njit(cache=True)
def _add_steps(keys, key, counts):
    # open-addressing set of (ones, rules, steps) keys; counts[6] is its size
    mask = keys.shape[0] - 1
    h = (key * 2654435761) & mask
    while keys[h] >= 0:
        if keys[h] == key:
            return
        h = (h + 1) & mask
    if 4 * (counts[6] + 1) > 3 * keys.shape[0]:
        counts[7] += 1
        return
    keys[h] = key
    counts[6] += 1


@njit(cache=True, nogil=True)
def sweep_block(
    n, k, subset, prefix, ordinal, cap, shard_index, shard_total, canonical, prune,
    fsrc, tmap, tape, bsnap, tsnap, counts, stats_steps, stats_tabs, best,
    win_tabs, win_steps, step_keys,
):
    """Sweep one block and fold it into the accumulators.

    counts: [visited, covered, halted, capped, ones_overflow, winner_overflow,
             step_set_size, step_set_overflow]
    step_keys: hash set of (ones * (2n + 1) + rules) * (cap + 1) + steps, -1 = empty
    best:   [bb_value, n_winners]
    """
    nf = 2 * n
    radix = 6 * n
    order = fsrc.shape[0]
    table = -np.ones(nf, np.int64)
    digits = np.zeros(k, np.int64)
    fixed = prefix.shape[0]
    for i in range(fixed):
        digits[i] = prefix[i]
    for i in range(k):
        table[subset[i]] = digits[i]
    result = np.zeros(4, np.int64)
    ones_cap = stats_steps.shape[0]
    win_cap = win_tabs.shape[0]
    while True:
        if ordinal % shard_total == shard_index:
            weight = 1
            keep = True
            if canonical:
                stab = canonical_check(table, nf, fsrc, tmap)
                if stab == 0:
                    keep = False
                else:
                    weight = order // stab
            if keep:
                counts[0] += 1
                counts[1] += weight
                if table[0] < 0:
                    status = HALTED
                    steps = 0
                    ones = 0
                elif prune and not can_halt(table, n):
                    status = PROVEN
                    steps = 0
                    ones = 0
                else:
                    simulate(table, cap, tape, bsnap, tsnap, prune, result)
                    status = result[0]
                    steps = result[1]
                    ones = 0
                    for x in range(result[2], result[3] + 1):
                        ones += tape[x]
                        tape[x] = 0
                if status == HALTED:
                    counts[2] += weight
                    if ones >= ones_cap:
                        counts[4] += 1
                    else:
                        _record(stats_steps, stats_tabs, ones, k, 0, steps, table, nf)
                        _record(stats_steps, stats_tabs, ones, k, 1, steps, table, nf)
                        stats_steps[ones, k, 2] += weight
                        _add_steps(step_keys, (ones * (nf + 1) + k) * (cap + 1) + steps, counts)
                    if ones > 0 and ones >= best[0]:
                        if ones > best[0]:
                            best[0] = ones
                            best[1] = 0
                            counts[5] = 0
                        if best[1] < win_cap:
                            for f in range(nf):
                                win_tabs[best[1], f] = table[f]
                            win_steps[best[1]] = steps
                            best[1] += 1
                        else:
                            counts[5] += 1
                else:
                    counts[3] += weight
        ordinal += 1
        j = k - 1
        while j >= fixed:
            digits[j] += 1
            if digits[j] < radix:
                break
            digits[j] = 0
            j -= 1
        if j < fixed:
            break
        for i in range(j, k):
            table[subset[i]] = digits[i]
    return ordinal
