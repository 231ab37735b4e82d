"""Fast classifiers and halting verdicts.

The quick classifier runs a program on a uniform tape and reports the first
of three events: it halts, its head falls off the left edge, or it enters a
state it has already been in.  One of the three must happen within n steps
(after n completed steps there have been n+1 state-achievements among n
states).  Halting is then decidable for every program in the first two
buckets: a halt is a halt, and a fallen-off head never reaches the halt
state.  Programs in the third bucket get no verdict here; the budgeted
`conservative_halting` covers what it can certify.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .machine import (
    HALT,
    Configuration,
    MachineModel,
    Program,
    StepResult,
    step,
)
from .sampling import Xoshiro256StarStar


class ClassifyKind(Enum):
    HALTS_BEFORE_REPEAT = "halts-before-repeat"
    FALLS_OFF_BEFORE_REPEAT = "falls-off-before-repeat"
    REPEATS_STATE = "repeats-state"


@dataclass(frozen=True)
class Classification:
    """Outcome of the quick classifier; step is 1-based and always <= n.

    `visited_cells` accompanies a fall-off (cells read before the head
    dropped), `repeated_state` a state repeat; both are None otherwise.
    """

    kind: ClassifyKind
    step: int
    visited_cells: Optional[int] = None
    repeated_state: Optional[int] = None

    @property
    def decides_halting(self) -> bool:
        return self.kind is not ClassifyKind.REPEATS_STATE

    def to_json(self) -> dict:
        out: dict = {"verdict": self.kind.value, "step": self.step}
        if self.visited_cells is not None:
            out["visited_cells"] = self.visited_cells
        if self.repeated_state is not None:
            out["repeated_state"] = self.repeated_state
        return out


def classify(program: Program, fill: int = 0) -> Classification:
    """First of halt / fall-off / state-repeat on the uniform-fill tape.

    One-way geometry.  The start state counts as already achieved before the
    first step, and a step that falls off achieves nothing, so a fall-off
    wins over a repeat on the same step.
    """
    model = MachineModel.one_way(program.a)
    config = Configuration(fill)
    while True:
        tr = program.entry(config.state, config.read())
        target_seen = tr.target != HALT and tr.target in config.achieved
        result = step(config, program, model)
        if result is StepResult.HALTED:
            verdict = Classification(ClassifyKind.HALTS_BEFORE_REPEAT, config.steps)
            break
        if result is StepResult.FELL_OFF:
            verdict = Classification(
                ClassifyKind.FALLS_OFF_BEFORE_REPEAT,
                config.steps,
                visited_cells=len(config.visited),
            )
            break
        if target_seen:
            verdict = Classification(
                ClassifyKind.REPEATS_STATE, config.steps, repeated_state=tr.target
            )
            break
    assert verdict.step <= program.n, "classifier exceeded its n-step bound"
    return verdict


def halts_or_falls_before_repeat(program: Program) -> bool:
    """True iff the program halts or falls off before repeating a state (fill 0)."""
    return classify(program, fill=0).decides_halting


class HaltingDecision(Enum):
    HALTS = "halts"
    DOES_NOT_HALT = "does-not-halt"
    UNRESOLVED = "unresolved"


def decide_halting_before_repeat(program: Program) -> HaltingDecision:
    """Halting verdict from the quick classifier alone.

    HALTS and DOES_NOT_HALT are certificates; UNRESOLVED (a state repeated
    first) claims nothing.
    """
    kind = classify(program, fill=0).kind
    if kind is ClassifyKind.HALTS_BEFORE_REPEAT:
        return HaltingDecision.HALTS
    if kind is ClassifyKind.FALLS_OFF_BEFORE_REPEAT:
        return HaltingDecision.DOES_NOT_HALT
    return HaltingDecision.UNRESOLVED


def has_halt_transition(program: Program) -> bool:
    return any(tr.target == HALT for tr in program.table)


class VerdictKind(Enum):
    HALTS = "halts"
    NON_HALTING = "non-halting"
    UNKNOWN = "unknown"


class NonHaltingReason(Enum):
    NO_HALT_TRANSITION = "no-halt-transition"
    CONFIGURATION_CYCLE = "configuration-cycle"
    FELL_OFF = "fell-off"


@dataclass(frozen=True)
class HaltingVerdict:
    """Certified halting status from bounded simulation.

    HALTS and NON_HALTING are never issued without a certificate: the halt
    step, the absence of any halt-targeting entry, an exact configuration
    cycle (first occurrence + period), or a fall-off step.  UNKNOWN carries
    the exhausted budget.
    """

    kind: VerdictKind
    step: Optional[int] = None
    reason: Optional[NonHaltingReason] = None
    cycle_start: Optional[int] = None
    period: Optional[int] = None
    budget: Optional[int] = None

    def to_json(self) -> dict:
        out: dict = {"verdict": self.kind.value}
        if self.reason is not None:
            out["reason"] = self.reason.value
        for key in ("step", "cycle_start", "period", "budget"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def _tape_digest(config: Configuration) -> tuple:
    # Cells explicitly written back to the fill symbol are indistinguishable
    # from untouched cells, so they drop out of the digest.
    overlay = frozenset(
        item for item in config.tape.items() if item[1] != config.fill
    )
    return (config.state, config.head, overlay)


def conservative_halting(
    program: Program, model: MachineModel, budget: int, fill: int = 0
) -> HaltingVerdict:
    """Budgeted halting verdict with exact-certificate-only claims.

    A program with no halt-targeting entry is non-halting on any model, even
    at budget 0.  Otherwise simulate up to `budget` steps, digesting each
    configuration exactly; a repeated digest certifies a cycle, a fall-off
    certifies non-halting on the one-way tape, and anything else is UNKNOWN.
    """
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if not has_halt_transition(program):
        return HaltingVerdict(
            VerdictKind.NON_HALTING, reason=NonHaltingReason.NO_HALT_TRANSITION
        )
    config = Configuration(fill)
    seen = {_tape_digest(config): 0}
    while config.steps < budget:
        result = step(config, program, model)
        if result is StepResult.HALTED:
            return HaltingVerdict(VerdictKind.HALTS, step=config.steps)
        if result is StepResult.FELL_OFF:
            return HaltingVerdict(
                VerdictKind.NON_HALTING,
                reason=NonHaltingReason.FELL_OFF,
                step=config.steps,
            )
        digest = _tape_digest(config)
        first = seen.setdefault(digest, config.steps)
        if first != config.steps:
            return HaltingVerdict(
                VerdictKind.NON_HALTING,
                reason=NonHaltingReason.CONFIGURATION_CYCLE,
                cycle_start=first,
                period=config.steps - first,
            )
    return HaltingVerdict(VerdictKind.UNKNOWN, budget=budget)


def cycle_replays(
    program: Program, model: MachineModel, verdict: HaltingVerdict, fill: int = 0
) -> bool:
    """Re-simulate a CONFIGURATION_CYCLE certificate and confirm the repeat.

    Steps to the cycle's first configuration, then `period` further steps,
    and checks the two configurations are identical.
    """
    if verdict.reason is not NonHaltingReason.CONFIGURATION_CYCLE:
        raise ValueError(f"verdict carries no cycle certificate: {verdict}")
    config = Configuration(fill)
    for _ in range(verdict.cycle_start):
        if step(config, program, model) is not StepResult.CONTINUE:
            return False
    at_start = _tape_digest(config)
    for _ in range(verdict.period):
        if step(config, program, model) is not StepResult.CONTINUE:
            return False
    return _tape_digest(config) == at_start


# ---------------------------------------------------------------------------
# Finite-domain certification on the all-1 tape.


def finite_domain_witness(program: Program) -> Optional[int]:
    """Visited-cell count v when the program falls off the all-1 tape early.

    Reading happens at the head, the head moves one cell at a time from cell
    0, so the v cells read are exactly 0..v-1.  Any unary input with at
    least v leading 1s therefore produces the identical fall-off, and the
    program's computed function has finite domain.  None when the program
    halts or repeats a state first.
    """
    verdict = classify(program, fill=1)
    if verdict.kind is ClassifyKind.FALLS_OFF_BEFORE_REPEAT:
        return verdict.visited_cells
    return None


def _trace(
    program: Program, preset: dict[int, int], max_steps: int
) -> tuple[list[tuple[int, int, int]], Optional[StepResult]]:
    """(state, head, symbol-read) per step on the fill-1 tape, plus the end."""
    model = MachineModel.one_way(program.a)
    config = Configuration(1)
    config.tape.update(preset)
    trace: list[tuple[int, int, int]] = []
    while config.steps < max_steps:
        trace.append((config.state, config.head, config.read()))
        result = step(config, program, model)
        if result is not StepResult.CONTINUE:
            return trace, result
    return trace, None


def check_trace_stability(
    program: Program,
    v: int,
    suffix_trials: int,
    stream: Xoshiro256StarStar,
) -> bool:
    """Re-run on tapes that are all-1 up to cell v-1 and random beyond.

    True iff every trial reproduces the witness run step for step, fall-off
    included.  A genuine witness can never fail (cells at v and beyond were
    never read); an understated one fails as soon as a randomized cell that
    the run does read draws a different symbol.
    """
    reference, end = _trace(program, {}, max_steps=program.n + 1)
    if end is not StepResult.FELL_OFF:
        return False
    horizon = len(reference)
    for _ in range(suffix_trials):
        # Head index never exceeds the step count, so cells v..horizon cover
        # everything a replay could read beyond the witness prefix.
        preset = {
            cell: stream.below(program.a) for cell in range(v, horizon + 1)
        }
        replay, replay_end = _trace(program, preset, max_steps=horizon)
        if replay != reference or replay_end is not StepResult.FELL_OFF:
            return False
    return True
