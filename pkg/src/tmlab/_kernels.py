"""Compiled inner loops for the Monte Carlo paths.

Every kernel reimplements the pure-Python reference arithmetic exactly: the
same splitmix64 seed derivation, the same xoshiro256** stream, the same
rejection rule for bounded draws, the same eager digit order.  Tests pin
hit-count equality between the two paths, so the kernels are a speedup and
nothing else.  All randomness state lives in uint64 scalars; int64 never
touches the generator arithmetic (mixed int64/uint64 expressions promote to
float64 under numpy rules and would silently destroy the stream).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .density import Event, EventKind

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
FIVE = np.uint64(5)
NINE = np.uint64(9)
ONE = np.uint64(1)
THREE = np.uint64(3)
S7 = np.uint64(7)
S17 = np.uint64(17)
S27 = np.uint64(27)
S30 = np.uint64(30)
S31 = np.uint64(31)
S45 = np.uint64(45)
S19 = np.uint64(64 - 45)
S57 = np.uint64(64 - 7)

_MASK64 = (1 << 64) - 1


@njit(cache=True, nogil=True, inline="always")
def _splitmix_out(state):
    z = state
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


@njit(cache=True, nogil=True, inline="always")
def _trial_stream(master, trial_index):
    """State vector s0..s3 for the trial's xoshiro256** stream."""
    seed = _splitmix_out(master + np.uint64(trial_index + 1) * GOLDEN)
    s0 = _splitmix_out(seed + GOLDEN)
    s1 = _splitmix_out(seed + GOLDEN + GOLDEN)
    s2 = _splitmix_out(seed + GOLDEN + GOLDEN + GOLDEN)
    s3 = _splitmix_out(seed + GOLDEN + GOLDEN + GOLDEN + GOLDEN)
    return s0, s1, s2, s3


@njit(cache=True, nogil=True, inline="always")
def _xoshiro_next(s0, s1, s2, s3):
    out = ((s1 * FIVE) << S7 | (s1 * FIVE) >> S57) * NINE
    t = s1 << S17
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = (s3 << S45) | (s3 >> S19)
    return out, s0, s1, s2, s3


@njit(cache=True, nogil=True)
def _walk1d_chunk(master, lo, hi, k):
    hits = 0
    for i in range(lo, hi):
        s0, s1, s2, s3 = _trial_stream(master, i)
        pos = 0
        for _ in range(k):
            x, s0, s1, s2, s3 = _xoshiro_next(s0, s1, s2, s3)
            if x & ONE == ONE:
                pos += 1
            elif pos == 0:
                hits += 1
                break
            else:
                pos -= 1
    return hits


@njit(cache=True, nogil=True)
def _walk2d_chunk(master, lo, hi, k):
    hits = 0
    for i in range(lo, hi):
        s0, s1, s2, s3 = _trial_stream(master, i)
        x = 0
        y = 0
        for _ in range(k):
            draw, s0, s1, s2, s3 = _xoshiro_next(s0, s1, s2, s3)
            d = draw & THREE
            if d == np.uint64(0):
                if x == 0:
                    hits += 1
                    break
                x -= 1
            elif d == ONE:
                x += 1
            elif d == np.uint64(2):
                if y == 0:
                    hits += 1
                    break
                y -= 1
            else:
                y += 1
    return hits


# Event codes for the density kernel; kept in one place with the mapping
# from the Event vocabulary below.
_HALTS_OR_FALLS = 0
_HALTS_FIRST = 1
_FALLS_FIRST = 2
_REPEATS_FIRST = 3
_NO_HALT_ENTRY = 4
_NO_REPEAT = 5
_NO_REPEAT_NO_HALT = 6
_HALTS_IN_BUDGET = 7

_EVENT_CODES = {
    EventKind.HALTS_OR_FALLS_BEFORE_REPEAT: _HALTS_OR_FALLS,
    EventKind.HALTS_BEFORE_REPEAT: _HALTS_FIRST,
    EventKind.FALLS_OFF_BEFORE_REPEAT: _FALLS_FIRST,
    EventKind.REPEATS_STATE: _REPEATS_FIRST,
    EventKind.NO_HALT_TRANSITION: _NO_HALT_ENTRY,
    EventKind.NO_REPEAT_WITHIN: _NO_REPEAT,
    EventKind.NO_REPEAT_NO_HALT_WITHIN: _NO_REPEAT_NO_HALT,
    EventKind.HALTS_WITHIN_BUDGET: _HALTS_IN_BUDGET,
    EventKind.HALTS_OR_FALLS_BEFORE_REPEAT_UNARY: _HALTS_OR_FALLS,
}


@njit(cache=True, nogil=True)
def _density_chunk(master, lo, hi, n, a, code, bound, fill, one_way, radix, threshold):
    entries = n * a
    twice_a = 2 * a
    digits = np.empty(entries, np.int64)
    origin = 0 if one_way else bound
    tape_size = bound + 1 if one_way else 2 * bound + 1
    tape = np.full(tape_size, np.int8(fill))
    achieved = np.zeros(n + 1, np.uint8)
    track_repeats = code != _HALTS_IN_BUDGET
    hits = 0
    for i in range(lo, hi):
        s0, s1, s2, s3 = _trial_stream(master, i)
        for j in range(entries):
            while True:
                x, s0, s1, s2, s3 = _xoshiro_next(s0, s1, s2, s3)
                if x >= threshold:
                    break
            digits[j] = np.int64(x % radix)

        if code == _NO_HALT_ENTRY:
            halt_floor = twice_a * n
            hit = True
            for j in range(entries):
                if digits[j] >= halt_floor:
                    hit = False
                    break
            hits += 1 if hit else 0
            continue

        if track_repeats:
            for q in range(1, n + 1):
                achieved[q] = 0
            achieved[1] = 1
        state = 1
        head = origin
        head_lo = origin
        head_hi = origin
        steps = 0
        outcome = 0  # 0 ran out, 1 halted, 2 fell off, 3 repeated a state
        while steps < bound:
            entry = digits[(state - 1) * a + tape[head]]
            target = entry // twice_a
            rem = entry - target * twice_a
            steps += 1
            if rem & 1 == 0:  # Left move
                if one_way and head == 0:
                    outcome = 2
                    break
                tape[head] = np.int8(rem >> 1)
                head -= 1
                if head < head_lo:
                    head_lo = head
            else:
                tape[head] = np.int8(rem >> 1)
                head += 1
                if head > head_hi:
                    head_hi = head
            if target == n:
                outcome = 1
                break
            if track_repeats:
                if achieved[target + 1] == 1:
                    outcome = 3
                    break
                achieved[target + 1] = 1
            state = target + 1
        for c in range(head_lo, head_hi + 1):
            tape[c] = np.int8(fill)

        if code == _HALTS_OR_FALLS:
            hit = outcome == 1 or outcome == 2
        elif code == _HALTS_FIRST or code == _HALTS_IN_BUDGET:
            hit = outcome == 1
        elif code == _FALLS_FIRST:
            hit = outcome == 2
        elif code == _REPEATS_FIRST:
            hit = outcome == 3
        elif code == _NO_REPEAT:
            hit = outcome != 3
        else:  # _NO_REPEAT_NO_HALT
            hit = outcome != 3 and outcome != 1
        hits += 1 if hit else 0
    return hits


def walk1d_hits(master_seed: int, lo: int, hi: int, k: int) -> int:
    return int(_walk1d_chunk(np.uint64(master_seed & _MASK64), lo, hi, k))


def walk2d_hits(master_seed: int, lo: int, hi: int, k: int) -> int:
    return int(_walk2d_chunk(np.uint64(master_seed & _MASK64), lo, hi, k))


def density_hits(
    master_seed: int,
    lo: int,
    hi: int,
    n: int,
    a: int,
    event: Event,
    one_way: bool,
) -> int:
    radix = 2 * a * (n + 1)
    threshold = ((1 << 64) - radix) % radix
    return int(
        _density_chunk(
            np.uint64(master_seed & _MASK64),
            lo,
            hi,
            n,
            a,
            _EVENT_CODES[event.kind],
            event.budget(n),
            event.fill,
            one_way,
            np.uint64(radix),
            np.uint64(threshold),
        )
    )
