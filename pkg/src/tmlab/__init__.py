"""Turing machine density laboratory.

Simulate n-state machines on one-way or two-way tapes, decide halting for
the programs that halt or fall off the tape before repeating a state, and
measure how program behavior densities evolve as n grows, with exact
enumeration, Monte Carlo estimation, and independent random-walk oracles.
"""

from .decide import (
    Classification,
    ClassifyKind,
    HaltingDecision,
    HaltingVerdict,
    NonHaltingReason,
    VerdictKind,
    check_trace_stability,
    classify,
    conservative_halting,
    cycle_replays,
    decide_halting_before_repeat,
    finite_domain_witness,
    halts_or_falls_before_repeat,
    has_halt_transition,
)
from .density import (
    DensityEstimate,
    Event,
    EventKind,
    ExactDensity,
    ExperimentSpec,
    IncompatibleModel,
    convergence_table,
    estimate_density,
    event_hit,
    exact_density,
    nohalt_exact_fraction,
    oscillating_markers,
    oscillating_prefix_count,
    oscillating_set_membership,
    parse_event,
    prefix_density,
    stretch_set,
)
from .machine import (
    HALT,
    LEFT,
    RIGHT,
    Configuration,
    MachineModel,
    Outcome,
    ParseError,
    Program,
    RunRecord,
    StepResult,
    TapeGeometry,
    Transition,
    count_programs,
    parse,
    program_from_json,
    program_to_json,
    run,
    serialize,
    step,
)
from .sampling import (
    TooManyPrograms,
    Xoshiro256StarStar,
    derive_trial_seed,
    enumerate_programs,
    index_to_program,
    program_to_index,
    sample_program,
    sample_program_for_trial,
)
from .walks import (
    WalkEstimate,
    WalkSpec,
    falloff2d_mc,
    falloff_cdf,
    falloff_cdf_exact,
    falloff_mc,
    first_passage,
)

__version__ = "0.1.0"
