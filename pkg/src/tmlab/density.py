"""Density experiments over random and exhaustively enumerated programs.

Each experiment measures the proportion of n-state programs exhibiting some
decidable event: halting or dropping off the tape before any state repeats,
carrying no halt transition at all, halting within a step budget, and so
on.  Monte Carlo estimates follow the per-trial seeding contract so that
results are reproducible bit for bit on any worker count, and exhaustive
enumeration provides exact rational densities where the program space is
small enough.  The module also hosts the integer-set density constructions
used to contrast computational equivalence with density behavior.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .decide import has_halt_transition
from .machine import (
    HALT,
    Configuration,
    MachineModel,
    Outcome,
    Program,
    StepResult,
    run,
    step,
)
from .sampling import (
    DEFAULT_ENUMERATION_GUARD,
    derive_trial_seed,
    enumerate_programs,
    sample_program_for_trial,
)
from .stats import Z_95, wilson_interval


class EventKind(Enum):
    HALTS_OR_FALLS_BEFORE_REPEAT = "halts-or-falls-before-repeat"
    HALTS_BEFORE_REPEAT = "halts-before-repeat"
    FALLS_OFF_BEFORE_REPEAT = "falls-off-before-repeat"
    REPEATS_STATE = "repeats-state"
    NO_HALT_TRANSITION = "no-halt-transition"
    NO_REPEAT_WITHIN = "no-repeat-within"
    NO_REPEAT_NO_HALT_WITHIN = "no-repeat-no-halt-within"
    HALTS_WITHIN_BUDGET = "halts-within-budget"
    HALTS_OR_FALLS_BEFORE_REPEAT_UNARY = "halts-or-falls-before-repeat-unary"


_PARAMETRIC = {
    EventKind.NO_REPEAT_WITHIN,
    EventKind.NO_REPEAT_NO_HALT_WITHIN,
    EventKind.HALTS_WITHIN_BUDGET,
}

# Events whose very definition involves the head dropping off the left edge.
_NEEDS_EDGE = {
    EventKind.HALTS_OR_FALLS_BEFORE_REPEAT,
    EventKind.FALLS_OFF_BEFORE_REPEAT,
    EventKind.HALTS_OR_FALLS_BEFORE_REPEAT_UNARY,
}


@dataclass(frozen=True)
class Event:
    """A decidable per-program predicate, optionally parameterized.

    The step-count kinds take their bound in `param`; halts-within-budget
    defaults to 10n when `param` is None.
    """

    kind: EventKind
    param: Optional[int] = None

    def __post_init__(self) -> None:
        if self.param is not None and self.param < 0:
            raise ValueError(f"event parameter must be >= 0, got {self.param}")
        if self.param is None and self.kind in (
            EventKind.NO_REPEAT_WITHIN,
            EventKind.NO_REPEAT_NO_HALT_WITHIN,
        ):
            raise ValueError(f"{self.kind.value} requires a step-count parameter")
        if self.param is not None and self.kind not in _PARAMETRIC:
            raise ValueError(f"{self.kind.value} takes no parameter")

    @property
    def token(self) -> str:
        if self.param is None:
            return self.kind.value
        return f"{self.kind.value}:{self.param}"

    @property
    def needs_edge(self) -> bool:
        return self.kind in _NEEDS_EDGE

    @property
    def fill(self) -> int:
        return 1 if self.kind is EventKind.HALTS_OR_FALLS_BEFORE_REPEAT_UNARY else 0

    def budget(self, n: int) -> int:
        """Resolved simulation bound for an n-state program."""
        if self.kind is EventKind.HALTS_WITHIN_BUDGET:
            return 10 * n if self.param is None else self.param
        if self.kind in (EventKind.NO_REPEAT_WITHIN, EventKind.NO_REPEAT_NO_HALT_WITHIN):
            # Pigeonhole ends every run by step n, so the bound never
            # needs to exceed it.
            return min(self.param, n)
        return n


def parse_event(token: str) -> Event:
    """Inverse of Event.token; accepts `kind` or `kind:param`."""
    name, sep, raw = token.partition(":")
    try:
        kind = EventKind(name)
    except ValueError:
        valid = ", ".join(k.value for k in EventKind)
        raise ValueError(f"unknown event {name!r}; expected one of: {valid}") from None
    if not sep:
        return Event(kind)
    if not raw.isdigit():
        raise ValueError(f"bad event parameter {raw!r} in {token!r}")
    return Event(kind, int(raw))


class IncompatibleModel(ValueError):
    """The event presupposes a tape edge but the model has none."""


def _first_event(
    program: Program, fill: int, model: MachineModel, bound: int
) -> tuple[str, int]:
    """First of halt / fall / state-repeat within `bound` steps, or none.

    Returns (kind, step) with kind in {"halt", "fall", "repeat", "none"}.
    """
    config = Configuration(fill)
    while config.steps < bound:
        tr = program.entry(config.state, config.read())
        target_seen = tr.target != HALT and tr.target in config.achieved
        result = step(config, program, model)
        if result is StepResult.HALTED:
            return "halt", config.steps
        if result is StepResult.FELL_OFF:
            return "fall", config.steps
        if target_seen:
            return "repeat", config.steps
    return "none", config.steps


def event_hit(event: Event, program: Program, model: MachineModel) -> bool:
    """Evaluate the event on one program; the reference implementation."""
    if event.needs_edge and not model.is_one_way:
        raise IncompatibleModel(
            f"event {event.token} needs a tape edge but the model is two-way"
        )
    kind = event.kind
    if kind is EventKind.NO_HALT_TRANSITION:
        return not has_halt_transition(program)
    if kind is EventKind.HALTS_WITHIN_BUDGET:
        record = run(program, event.fill, model, event.budget(program.n))
        return record.outcome is Outcome.HALTED
    first, _ = _first_event(program, event.fill, model, event.budget(program.n))
    if kind in (
        EventKind.HALTS_OR_FALLS_BEFORE_REPEAT,
        EventKind.HALTS_OR_FALLS_BEFORE_REPEAT_UNARY,
    ):
        return first in ("halt", "fall")
    if kind is EventKind.HALTS_BEFORE_REPEAT:
        return first == "halt"
    if kind is EventKind.FALLS_OFF_BEFORE_REPEAT:
        return first == "fall"
    if kind is EventKind.REPEATS_STATE:
        return first == "repeat"
    if kind is EventKind.NO_REPEAT_WITHIN:
        return first != "repeat"
    if kind is EventKind.NO_REPEAT_NO_HALT_WITHIN:
        return first not in ("repeat", "halt")
    raise AssertionError(f"unhandled event kind {kind}")


@dataclass(frozen=True)
class DensityEstimate:
    """Monte Carlo proportion for one event at one (n, a, model) point."""

    n: int
    a: int
    model: MachineModel
    event: Event
    trials: int
    hits: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    master_seed: int


def _pure_hits(
    event: Event,
    n: int,
    a: int,
    model: MachineModel,
    master_seed: int,
    lo: int,
    hi: int,
) -> int:
    hits = 0
    for i in range(lo, hi):
        program = sample_program_for_trial(master_seed, i, n, a)
        if event_hit(event, program, model):
            hits += 1
    return hits


def _chunk_bounds(trials: int, workers: int) -> list[tuple[int, int]]:
    bounds = [trials * i // workers for i in range(workers + 1)]
    return [(lo, hi) for lo, hi in zip(bounds, bounds[1:]) if lo < hi]


def _resolve_engine(engine: str) -> str:
    if engine == "auto":
        try:
            import numba  # noqa: F401

            return "compiled"
        except ImportError:
            return "pure"
    if engine not in ("pure", "compiled"):
        raise ValueError(f"unknown engine {engine!r}")
    return engine


def estimate_density(
    event: Event,
    n: int,
    a: int,
    model: MachineModel,
    trials: int,
    master_seed: int,
    workers: int = 1,
    engine: str = "auto",
) -> DensityEstimate:
    """Sample `trials` programs independently and estimate the event density.

    Trial i draws its program from the stream seeded by (master_seed, i),
    so the hit count is a sum over trials that no chunking or scheduling
    can change.  The interval is a 95% Wilson score interval.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if model.alphabet_size != a:
        raise ValueError(f"model alphabet size {model.alphabet_size} != a {a}")
    if event.needs_edge and not model.is_one_way:
        raise IncompatibleModel(
            f"event {event.token} needs a tape edge but the model is two-way"
        )
    engine = _resolve_engine(engine)
    if engine == "pure":
        hits = _pure_hits(event, n, a, model, master_seed, 0, trials)
    else:
        from . import _kernels

        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _kernels.density_hits,
                    master_seed,
                    lo,
                    hi,
                    n,
                    a,
                    event,
                    model.is_one_way,
                )
                for lo, hi in _chunk_bounds(trials, workers)
            ]
            hits = sum(int(f.result()) for f in futures)
    p_hat = hits / trials
    ci_lo, ci_hi = wilson_interval(hits, trials, Z_95)
    return DensityEstimate(n, a, model, event, trials, hits, p_hat, ci_lo, ci_hi, master_seed)


@dataclass(frozen=True)
class ExactDensity:
    """Event density over every program in P_n, as an exact count."""

    event: Event
    n: int
    a: int
    hits: int
    total: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.hits, self.total)

    @property
    def value(self) -> float:
        return self.hits / self.total


def exact_density(
    event: Event,
    n: int,
    a: int = 2,
    guard: int = DEFAULT_ENUMERATION_GUARD,
    model: Optional[MachineModel] = None,
) -> ExactDensity:
    """Evaluate the event on all (2a(n+1))^(an) programs; exact by counting."""
    if model is None:
        model = MachineModel.one_way(a)
    hits = 0
    total = 0
    for program in enumerate_programs(n, a, guard):
        total += 1
        if event_hit(event, program, model):
            hits += 1
    return ExactDensity(event, n, a, hits, total)


def nohalt_exact_fraction(n: int) -> Fraction:
    """Exact fraction of 2-symbol n-state programs with no halt transition.

    Per entry, 2a·n of the 2a(n+1) choices avoid the halt target, so the
    fraction is (n/(n+1))^(2n); it decreases toward e^-2 as n grows.
    """
    if n < 1:
        raise ValueError(f"state count must be >= 1, got {n}")
    return Fraction(n ** (2 * n), (n + 1) ** (2 * n))


@dataclass(frozen=True)
class ExperimentSpec:
    """A replayable convergence experiment across a grid of state counts."""

    event: Event
    model: MachineModel
    a: int
    n_grid: tuple[int, ...]
    trials: int
    master_seed: int

    def __post_init__(self) -> None:
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if any(b <= a_ for a_, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"n_grid must be strictly increasing, got {self.n_grid}")
        if self.n_grid[0] < 1:
            raise ValueError(f"state counts must be >= 1, got {self.n_grid[0]}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


def convergence_table(
    spec: ExperimentSpec, workers: int = 1, engine: str = "auto"
) -> list[DensityEstimate]:
    """One estimate per grid point, in grid order.

    Each n gets its own master seed derived from (experiment seed, grid
    index), so the full table replays from a single seed and single rows
    can be reproduced in isolation.
    """
    rows = []
    for grid_index, n in enumerate(spec.n_grid):
        row_seed = derive_trial_seed(spec.master_seed, grid_index)
        rows.append(
            estimate_density(
                spec.event, n, spec.a, spec.model, spec.trials, row_seed, workers, engine
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Integer-set densities: how much a set's density can change under simple
# computable transformations that preserve its computational content.


def prefix_density(set_predicate: Callable[[int], bool], upto: int) -> Fraction:
    """Exact |{1..upto} ∩ set| / upto by direct counting."""
    if upto < 1:
        raise ValueError(f"prefix length must be >= 1, got {upto}")
    count = sum(1 for x in range(1, upto + 1) if set_predicate(x))
    return Fraction(count, upto)


def stretch_set(members: Iterable[int]) -> Iterator[int]:
    """Multiply the k-th member (1-based) by k, preserving strict increase.

    The image of a strictly increasing sequence thins out quadratically:
    its k-th member is at least k^2, so at most sqrt(N) members fall below
    N and the output's prefix density tends to 0.
    """
    previous = 0
    for k, member in enumerate(members, start=1):
        if member <= previous:
            raise ValueError(
                f"input must be strictly increasing and positive, got {member} after {previous}"
            )
        previous = member
        yield k * member


def _markers() -> Iterator[int]:
    # 1, 2, 4, 16, 256, 65536, ...: marker j for j >= 1 is 2^(2^(j-1)).
    yield 1
    value = 2
    while True:
        yield value
        value *= value


def oscillating_markers(count: int) -> list[int]:
    """First `count` markers 1, 2, 4, 16, 256, ...: each next is the square.

    The gaps between consecutive markers widen so fast that the prefix
    density of the block union swings between the extremes forever.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    return list(itertools.islice(_markers(), count))


def oscillating_set_membership(x: int) -> bool:
    """Membership in the union of blocks [m_2i, m_2i+1) over the markers.

    Members fill [1,2), [4,16), [256,65536), ... so the prefix density
    climbs toward 1 at the end of each block and collapses toward 0 at the
    end of each gap: upper density 1, lower density 0.
    """
    if x < 1:
        raise ValueError(f"membership is defined on positive integers, got {x}")
    last = 0
    for j, marker in enumerate(_markers()):
        if marker > x:
            break
        last = j
    # Inside a block exactly when the last marker at or below x opens one.
    return last % 2 == 0


def oscillating_prefix_count(upto: int) -> int:
    """|{1..upto} ∩ oscillating set| in closed form; usable at huge prefixes."""
    if upto < 1:
        raise ValueError(f"prefix length must be >= 1, got {upto}")
    count = 0
    markers = _markers()
    j = 0
    lo = next(markers)
    hi = next(markers)
    while lo <= upto:
        if j % 2 == 0:
            count += min(hi - 1, upto) - lo + 1
        lo, hi = hi, next(markers)
        j += 1
    return count
