"""Deterministic program sampling and exhaustive enumeration.

Randomness is pinned down to the bit so that independent implementations
produce identical samples: a splitmix64 stream derives one 64-bit seed per
trial, each trial seeds a xoshiro256** generator, and bounded draws use
threshold rejection.  Programs are encoded as mixed-radix digit strings with
one digit in [0, 2a(n+1)) per table entry, entries ordered by (state,
symbol) with (q1, 0) most significant.
"""

from __future__ import annotations

from typing import Iterator

from .machine import HALT, Program, Transition, count_programs

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64_next(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output)."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    """Seed-expansion stream; reference C semantics with 64-bit wraparound."""

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next(self) -> int:
        self.state, out = splitmix64_next(self.state)
        return out


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed for trial i: output i+1 of the splitmix64 stream started at master.

    Closed form of i+1 sequential calls, so bulk derivation can jump straight
    to any index.
    """
    if trial_index < 0:
        raise ValueError(f"trial_index must be >= 0, got {trial_index}")
    state = (master_seed + (trial_index + 1) * GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** 1.0; state from four splitmix64 outputs of the seed."""

    def __init__(self, seed: int) -> None:
        sm = SplitMix64(seed)
        self.s = [sm.next(), sm.next(), sm.next(), sm.next()]

    def next(self) -> int:
        s = self.s
        out = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return out

    def below(self, bound: int) -> int:
        """Uniform draw in [0, bound) by threshold rejection, no modulo bias."""
        if bound <= 0:
            raise ValueError(f"bound must be >= 1, got {bound}")
        threshold = (1 << 64) % bound  # == (2^64 - bound) % bound
        while True:
            x = self.next()
            if x >= threshold:
                return x % bound


# ---------------------------------------------------------------------------
# Digit codec: each table entry is one digit d in [0, 2a(n+1)).


def digit_to_transition(digit: int, n: int, a: int) -> Transition:
    """Decode digit d: target d // (2a) with n meaning halt; then write, move.

    The remainder r = d % (2a) splits as write r // 2, move r % 2 with 0 = L.
    """
    radix = 2 * a * (n + 1)
    if not 0 <= digit < radix:
        raise ValueError(f"digit {digit} out of range 0..{radix - 1}")
    target_idx, rem = divmod(digit, 2 * a)
    target = HALT if target_idx == n else target_idx + 1
    write, move = divmod(rem, 2)
    return Transition(target, write, move)


def transition_to_digit(tr: Transition, n: int, a: int) -> int:
    target_idx = n if tr.target == HALT else tr.target - 1
    return target_idx * 2 * a + tr.write * 2 + tr.move


def sample_program(n: int, a: int, stream: Xoshiro256StarStar) -> Program:
    """Draw all n*a digits eagerly in (state, symbol) order, one per entry."""
    radix = 2 * a * (n + 1)
    table = tuple(digit_to_transition(stream.below(radix), n, a) for _ in range(n * a))
    return Program(n, a, table)


def sample_program_for_trial(master_seed: int, trial_index: int, n: int, a: int = 2) -> Program:
    return sample_program(n, a, Xoshiro256StarStar(derive_trial_seed(master_seed, trial_index)))


# ---------------------------------------------------------------------------
# Exhaustive enumeration: index <-> program, big-endian mixed radix.

DEFAULT_ENUMERATION_GUARD = 10**8


class TooManyPrograms(ValueError):
    """Enumeration would exceed the guard; carries the exact program count."""

    def __init__(self, n: int, a: int, count: int, guard: int) -> None:
        super().__init__(
            f"P_{n} over {a} symbols holds {count} programs, above the guard {guard}"
        )
        self.count = count
        self.guard = guard


def index_to_program(index: int, n: int, a: int = 2) -> Program:
    """Program at `index` in the canonical order; (q1, 0) most significant."""
    total = count_programs(n, a)
    if not 0 <= index < total:
        raise ValueError(f"index {index} out of range 0..{total - 1}")
    radix = 2 * a * (n + 1)
    digits = []
    for _ in range(n * a):
        index, d = divmod(index, radix)
        digits.append(d)
    digits.reverse()
    return Program(n, a, tuple(digit_to_transition(d, n, a) for d in digits))


def program_to_index(program: Program) -> int:
    radix = 2 * program.a * (program.n + 1)
    index = 0
    for tr in program.table:
        index = index * radix + transition_to_digit(tr, program.n, program.a)
    return index


def enumerate_programs(
    n: int, a: int = 2, guard: int = DEFAULT_ENUMERATION_GUARD
) -> Iterator[Program]:
    """All (2a(n+1))^(an) programs in canonical index order.

    Digits tick like an odometer on the least significant entry, so
    successive programs share most of their table.  Refuses counts above
    `guard` up front rather than running for geological time.
    """
    total = count_programs(n, a)
    if total > guard:
        raise TooManyPrograms(n, a, total, guard)

    def gen() -> Iterator[Program]:
        radix = 2 * a * (n + 1)
        k = n * a
        transitions = [digit_to_transition(d, n, a) for d in range(radix)]
        digits = [0] * k
        while True:
            yield Program(n, a, tuple(transitions[d] for d in digits))
            i = k - 1
            while i >= 0 and digits[i] == radix - 1:
                digits[i] = 0
                i -= 1
            if i < 0:
                return
            digits[i] += 1

    return gen()
