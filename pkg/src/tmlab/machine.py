"""Turing machine model: programs, stepping, full runs, counting, serialization.

The machine has states q1..qn plus a distinguished halt state that is not
counted among the n states.  Each step reads the symbol under the head,
applies the unique table entry for (state, symbol), writes, then attempts
the move.  On a one-way tape a left move from cell 0 makes the head fall
off and all computation ceases: the step's target state is *not* achieved,
even when that target is the halt state.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Optional

HALT = 0  # sentinel transition target; real states are 1..n
LEFT = 0
RIGHT = 1

_MOVE_NAMES = ("L", "R")


class TapeGeometry(Enum):
    ONE_WAY_FALL_OFF = "oneway"
    TWO_WAY_INFINITE = "twoway"


@dataclass(frozen=True)
class MachineModel:
    """Tape geometry plus alphabet size; programs run against one of these."""

    geometry: TapeGeometry
    alphabet_size: int = 2

    def __post_init__(self) -> None:
        if self.alphabet_size < 2:
            raise ValueError(f"alphabet_size must be >= 2, got {self.alphabet_size}")

    @classmethod
    def one_way(cls, alphabet_size: int = 2) -> "MachineModel":
        return cls(TapeGeometry.ONE_WAY_FALL_OFF, alphabet_size)

    @classmethod
    def two_way(cls, alphabet_size: int = 2) -> "MachineModel":
        return cls(TapeGeometry.TWO_WAY_INFINITE, alphabet_size)

    @property
    def is_one_way(self) -> bool:
        return self.geometry is TapeGeometry.ONE_WAY_FALL_OFF


class Transition(NamedTuple):
    """One table entry: go to `target` (HALT or 1..n), write `write`, move L/R."""

    target: int
    write: int
    move: int


@dataclass(frozen=True)
class Program:
    """Total transition table over n states and an a-symbol alphabet.

    `table[(state - 1) * a + symbol]` holds the entry for (state, symbol);
    state 1 is the start state.
    """

    n: int
    a: int
    table: tuple[Transition, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"state count must be >= 1, got {self.n}")
        if self.a < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.a}")
        if len(self.table) != self.n * self.a:
            raise ValueError(
                f"table must have exactly {self.n * self.a} entries, got {len(self.table)}"
            )
        for (state, symbol), tr in self.entries():
            if not (tr.target == HALT or 1 <= tr.target <= self.n):
                raise ValueError(f"entry (q{state},{symbol}): target {tr.target} out of range")
            if not 0 <= tr.write < self.a:
                raise ValueError(f"entry (q{state},{symbol}): write {tr.write} out of range")
            if tr.move not in (LEFT, RIGHT):
                raise ValueError(f"entry (q{state},{symbol}): bad move {tr.move}")

    def entry(self, state: int, symbol: int) -> Transition:
        return self.table[(state - 1) * self.a + symbol]

    def entries(self) -> Iterator[tuple[tuple[int, int], Transition]]:
        """Yield ((state, symbol), transition) sorted by state then symbol."""
        for i, tr in enumerate(self.table):
            yield (i // self.a + 1, i % self.a), tr


def count_programs(n: int, a: int = 2) -> int:
    """Exact number of n-state programs over an a-symbol alphabet: (2a(n+1))^(an)."""
    if n < 1:
        raise ValueError(f"state count must be >= 1, got {n}")
    if a < 2:
        raise ValueError(f"alphabet size must be >= 2, got {a}")
    return (2 * a * (n + 1)) ** (a * n)


class Configuration:
    """Mutable machine snapshot: state, head, tape overlay, and run statistics.

    The tape is an overlay of explicitly written cells over the uniform
    `fill` symbol.  `visited` records every cell index read so far, and
    `achieved` the states entered so far (the start state counts as achieved
    at time 0).
    """

    __slots__ = ("state", "head", "tape", "fill", "visited", "achieved", "steps")

    def __init__(self, fill: int) -> None:
        self.state = 1
        self.head = 0
        self.tape: dict[int, int] = {}
        self.fill = fill
        self.visited: set[int] = set()
        self.achieved: set[int] = {1}
        self.steps = 0

    def read(self) -> int:
        return self.tape.get(self.head, self.fill)


class StepResult(Enum):
    CONTINUE = "continue"
    HALTED = "halted"
    FELL_OFF = "fell-off"


def step(
    config: Configuration,
    program: Program,
    model: MachineModel,
    record_falling_write: bool = True,
) -> StepResult:
    """Advance `config` by one step in place; the result tags how it ended.

    Order of effects: read, write, move, then state entry.  A left move from
    cell 0 on a one-way tape fails: the run ends FELL_OFF and the target
    state is not achieved, halt target included.  The falling step's write is
    performed by default but is unobservable either way; pass
    record_falling_write=False for the alternate bookkeeping.
    """
    cell = config.head
    config.visited.add(cell)
    symbol = config.tape.get(cell, config.fill)
    tr = program.entry(config.state, symbol)

    falls = (
        model.is_one_way and tr.move == LEFT and cell == 0
    )
    if not falls or record_falling_write:
        config.tape[cell] = tr.write
    config.steps += 1
    if falls:
        return StepResult.FELL_OFF
    config.head = cell - 1 if tr.move == LEFT else cell + 1
    if tr.target == HALT:
        return StepResult.HALTED
    config.achieved.add(tr.target)
    config.state = tr.target
    return StepResult.CONTINUE


class Outcome(Enum):
    HALTED = "halted"
    FELL_OFF = "fell-off"
    OUT_OF_BUDGET = "out-of-budget"


@dataclass(frozen=True)
class RunRecord:
    """Full execution outcome with step, state, and cell statistics.

    For HALTED and FELL_OFF, `steps_executed` is the step at which the run
    ended (<= budget); OUT_OF_BUDGET means exactly `budget` steps ran.
    `final_head` is None when the head fell off the tape.
    """

    outcome: Outcome
    steps_executed: int
    budget: int
    max_state_count_used: int
    visited_cell_count: int
    final_head: Optional[int]


def initial_configuration(fill: int) -> Configuration:
    return Configuration(fill)


def run(
    program: Program,
    fill: int,
    model: MachineModel,
    budget: int,
    record_falling_write: bool = True,
) -> RunRecord:
    """Run from state 1, head 0, uniform `fill` tape until halt/fall-off/budget."""
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if not 0 <= fill < program.a:
        raise ValueError(f"fill {fill} not a symbol of an {program.a}-symbol alphabet")
    if model.alphabet_size != program.a:
        raise ValueError(
            f"model alphabet size {model.alphabet_size} != program alphabet {program.a}"
        )
    config = Configuration(fill)
    while config.steps < budget:
        result = step(config, program, model, record_falling_write)
        if result is StepResult.HALTED:
            return RunRecord(
                Outcome.HALTED,
                config.steps,
                budget,
                len(config.achieved),
                len(config.visited),
                config.head,
            )
        if result is StepResult.FELL_OFF:
            return RunRecord(
                Outcome.FELL_OFF,
                config.steps,
                budget,
                len(config.achieved),
                len(config.visited),
                None,
            )
    return RunRecord(
        Outcome.OUT_OF_BUDGET,
        budget,
        budget,
        len(config.achieved),
        len(config.visited),
        config.head,
    )


# ---------------------------------------------------------------------------
# Text and JSON serialization.
#
# Text format, one entry per line, sorted by (state, symbol):
#
#   tm n=2 a=2
#   q1 0 -> H 0 R
#   q1 1 -> q2 1 L
#   ...


class ParseError(ValueError):
    """Malformed program text; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
        self.reason = message


_HEADER_RE = re.compile(r"^tm n=(\d+) a=(\d+)$")
_ENTRY_RE = re.compile(r"^q(\d+) (\d+) -> (H|q\d+) (\d+) ([LR])$")


def serialize(program: Program) -> str:
    """Canonical text form; parse(serialize(p)) == p."""
    lines = [f"tm n={program.n} a={program.a}"]
    for (state, symbol), tr in program.entries():
        target = "H" if tr.target == HALT else f"q{tr.target}"
        lines.append(f"q{state} {symbol} -> {target} {tr.write} {_MOVE_NAMES[tr.move]}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> Program:
    """Parse the text format, reporting line number and cause on bad input."""
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty input, expected 'tm n=<n> a=<a>' header")
    m = _HEADER_RE.match(lines[0].strip())
    if m is None:
        raise ParseError(1, f"bad header {lines[0]!r}, expected 'tm n=<n> a=<a>'")
    n, a = int(m.group(1)), int(m.group(2))
    if n < 1:
        raise ParseError(1, f"state count must be >= 1, got {n}")
    if a < 2:
        raise ParseError(1, f"alphabet size must be >= 2, got {a}")

    entries: dict[tuple[int, int], Transition] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        m = _ENTRY_RE.match(line)
        if m is None:
            raise ParseError(lineno, f"bad entry {line!r}")
        state, symbol = int(m.group(1)), int(m.group(2))
        if not 1 <= state <= n:
            raise ParseError(lineno, f"state q{state} out of range 1..{n}")
        if not 0 <= symbol < a:
            raise ParseError(lineno, f"symbol {symbol} out of range 0..{a - 1}")
        if (state, symbol) in entries:
            raise ParseError(lineno, f"duplicate entry for (q{state}, {symbol})")
        target_text = m.group(3)
        if target_text == "H":
            target = HALT
        else:
            target = int(target_text[1:])
            if not 1 <= target <= n:
                raise ParseError(lineno, f"state out of range: target {target_text}, header has n={n}")
        write = int(m.group(4))
        if not 0 <= write < a:
            raise ParseError(lineno, f"write symbol {write} out of range 0..{a - 1}")
        move = LEFT if m.group(5) == "L" else RIGHT
        entries[(state, symbol)] = Transition(target, write, move)

    if len(entries) != n * a:
        missing = [
            f"(q{s}, {sym})"
            for s in range(1, n + 1)
            for sym in range(a)
            if (s, sym) not in entries
        ]
        raise ParseError(
            len(lines), f"incomplete table: missing {', '.join(missing)}"
        )
    table = tuple(entries[(s, sym)] for s in range(1, n + 1) for sym in range(a))
    return Program(n, a, table)


def program_to_json(program: Program) -> dict:
    """JSON-ready dict mirroring the text format's fields."""
    return {
        "n": program.n,
        "a": program.a,
        "table": [
            {
                "state": state,
                "symbol": symbol,
                "target": "H" if tr.target == HALT else tr.target,
                "write": tr.write,
                "move": _MOVE_NAMES[tr.move],
            }
            for (state, symbol), tr in program.entries()
        ],
    }


def program_from_json(obj: dict) -> Program:
    try:
        n = int(obj["n"])
        a = int(obj["a"])
        rows = obj["table"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad program JSON: {exc}") from exc
    entries: dict[tuple[int, int], Transition] = {}
    for row in rows:
        target = HALT if row["target"] == "H" else int(row["target"])
        move = LEFT if row["move"] == "L" else RIGHT
        key = (int(row["state"]), int(row["symbol"]))
        if key in entries:
            raise ValueError(f"bad program JSON: duplicate entry for {key}")
        entries[key] = Transition(target, int(row["write"]), move)
    if len(entries) != n * a:
        raise ValueError("bad program JSON: incomplete table")
    try:
        table = tuple(entries[(s, sym)] for s in range(1, n + 1) for sym in range(a))
    except KeyError as exc:
        raise ValueError(f"bad program JSON: missing entry {exc}") from exc
    return Program(n, a, table)


def program_to_json_text(program: Program) -> str:
    return json.dumps(program_to_json(program), sort_keys=True) + "\n"
