"""Acceptance gate: one test per shipping criterion, tolerances pinned.

Each test is self-contained and runs at the full advertised scale, so a
verbose run of this module prints one pass/fail line per criterion.
"""

import itertools
import math
import time
from fractions import Fraction

import pytest

from tmlab.cli import main
from tmlab.decide import (
    HaltingDecision,
    NonHaltingReason,
    VerdictKind,
    check_trace_stability,
    conservative_halting,
    cycle_replays,
    decide_halting_before_repeat,
    finite_domain_witness,
)
from tmlab.density import (
    Event,
    EventKind,
    ExperimentSpec,
    convergence_table,
    estimate_density,
    exact_density,
    nohalt_exact_fraction,
    oscillating_markers,
    oscillating_prefix_count,
    stretch_set,
)
from tmlab.machine import MachineModel, Outcome, run
from tmlab.sampling import Xoshiro256StarStar, sample_program_for_trial
from tmlab.stats import Z_999, wilson_interval, within_sigmas
from tmlab.walks import (
    WalkSpec,
    falloff_cdf,
    falloff_cdf_exact,
    falloff_mc,
    first_passage,
)

ONE_WAY = MachineModel.one_way(2)

IN_B = Event(EventKind.HALTS_OR_FALLS_BEFORE_REPEAT)
HALTS_FIRST = Event(EventKind.HALTS_BEFORE_REPEAT)
FALLS_FIRST = Event(EventKind.FALLS_OFF_BEFORE_REPEAT)
REPEATS = Event(EventKind.REPEATS_STATE)
NO_HALT = Event(EventKind.NO_HALT_TRANSITION)
HALTS_10N = Event(EventKind.HALTS_WITHIN_BUDGET)


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # Compile (or load from cache) the jitted kernels outside any timed
    # section; the runtime bounds below measure the experiments themselves.
    from tmlab import _kernels

    _kernels.walk1d_hits(0, 0, 1, 1)
    _kernels.walk2d_hits(0, 0, 1, 1)
    for event in (IN_B, HALTS_10N, NO_HALT):
        _kernels.density_hits(0, 0, 1, 2, 2, event, True)


def test_criterion_01_exact_enumeration_n1():
    started = time.perf_counter()
    counts = {
        event.token: exact_density(event, 1)
        for event in (IN_B, HALTS_FIRST, FALLS_FIRST, REPEATS, NO_HALT)
    }
    elapsed = time.perf_counter() - started
    assert counts[IN_B.token].hits == 48
    assert counts[HALTS_FIRST.token].hits == 16
    assert counts[FALLS_FIRST.token].hits == 32
    assert counts[REPEATS.token].hits == 16
    assert counts[NO_HALT.token].hits == 16
    assert all(c.total == 64 for c in counts.values())
    partition = (
        counts[HALTS_FIRST.token].fraction
        + counts[FALLS_FIRST.token].fraction
        + counts[REPEATS.token].fraction
    )
    assert partition == 1
    assert counts[IN_B.token].fraction == (
        counts[HALTS_FIRST.token].fraction + counts[FALLS_FIRST.token].fraction
    )
    assert elapsed < 1.0


def test_criterion_02_exact_vs_monte_carlo_n2():
    started = time.perf_counter()
    for event in (IN_B, NO_HALT, HALTS_FIRST):
        exact = exact_density(event, 2)
        assert exact.total == 20736
        est = estimate_density(
            event, 2, 2, ONE_WAY, 10**5, master_seed=42, workers=4, engine="compiled"
        )
        lo, hi = wilson_interval(est.hits, est.trials, Z_999)
        assert lo <= exact.value <= hi, (event.token, exact.value, lo, hi)
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0


def test_criterion_03_halt_free_fraction():
    for n in (1, 2, 10, 100):
        assert nohalt_exact_fraction(n) == Fraction(n, n + 1) ** (2 * n)
    for n in (10, 100):
        expected = float(nohalt_exact_fraction(n))
        est = estimate_density(
            NO_HALT, n, 2, ONE_WAY, 10**5, master_seed=7, workers=4, engine="compiled"
        )
        assert within_sigmas(est.p_hat, expected, est.trials, 3.0), (n, est.p_hat, expected)
    assert abs(float(nohalt_exact_fraction(10**4)) - math.exp(-2)) < 1e-3


def test_criterion_04_density_climbs_toward_one():
    spec = ExperimentSpec(
        event=IN_B,
        model=ONE_WAY,
        a=2,
        n_grid=(10, 100, 1000, 10_000),
        trials=10**4,
        master_seed=20260815,
    )
    started = time.perf_counter()
    rows = convergence_table(spec, workers=4, engine="compiled")
    elapsed = time.perf_counter() - started
    p_hats = [r.p_hat for r in rows]
    assert all(prev < cur for prev, cur in zip(p_hats, p_hats[1:])), p_hats
    assert rows[0].ci_hi < rows[-1].ci_lo
    assert rows[-1].p_hat > 0.85, rows[-1].p_hat
    assert elapsed < 120.0


def test_criterion_05_halting_density_collapses():
    spec = ExperimentSpec(
        event=HALTS_10N,
        model=ONE_WAY,
        a=2,
        n_grid=(10, 100, 1000, 10_000),
        trials=10**4,
        master_seed=20260815,
    )
    rows = convergence_table(spec, workers=4, engine="compiled")
    p_hats = [r.p_hat for r in rows]
    assert all(prev > cur for prev, cur in zip(p_hats, p_hats[1:])), p_hats
    assert rows[-1].p_hat < 0.02, rows[-1].p_hat


def test_criterion_06_walk_oracles_agree():
    cumulative = Fraction(0)
    for m in range(101):
        cumulative += first_passage(m)
        assert falloff_cdf_exact(2 * m + 1) == cumulative
    for index, k in enumerate((1, 3, 5, 99)):
        est = falloff_mc(
            WalkSpec(1, k, trials=10**6, master_seed=607 + index),
            workers=4,
            engine="compiled",
        )
        expected = float(falloff_cdf_exact(k))
        assert within_sigmas(est.p_hat, expected, est.trials, 4.0), (k, est.p_hat, expected)
    assert falloff_cdf(10**4) >= 0.99


def test_criterion_07_decider_soundness_zero_disagreements():
    disagreements = 0
    cycles_checked = 0
    for i in range(10**4):
        n = (i % 200) + 1
        program = sample_program_for_trial(314159, i, n)
        decision = decide_halting_before_repeat(program)
        record = run(program, 0, ONE_WAY, 10 * n)
        if decision is HaltingDecision.HALTS:
            if record.outcome is not Outcome.HALTED:
                disagreements += 1
        elif decision is HaltingDecision.DOES_NOT_HALT:
            if record.outcome is Outcome.HALTED:
                disagreements += 1
        verdict = conservative_halting(program, ONE_WAY, 10 * n)
        if verdict.kind is VerdictKind.HALTS and record.outcome is not Outcome.HALTED:
            disagreements += 1
        if verdict.reason is NonHaltingReason.CONFIGURATION_CYCLE:
            cycles_checked += 1
            if not cycle_replays(program, ONE_WAY, verdict):
                disagreements += 1
    assert disagreements == 0
    assert cycles_checked > 0


def test_criterion_08_finite_domain_witnesses_are_stable():
    stream = Xoshiro256StarStar(8888)
    witnessed = 0
    stable = 0
    for i in range(10**4):
        program = sample_program_for_trial(2718, i, 100)
        v = finite_domain_witness(program)
        if v is None:
            continue
        witnessed += 1
        if check_trace_stability(program, v, 10, stream):
            stable += 1
    assert witnessed > 5000, witnessed
    assert stable == witnessed, (stable, witnessed)


def test_criterion_09_reports_are_byte_identical_across_workers(capsys):
    density_argv = [
        "density", "--event", "halts-or-falls-before-repeat", "--n", "2,20",
        "--trials", "2000", "--seed", "11", "--engine", "compiled",
    ]
    walk_argv = [
        "walk", "--k", "5,33", "--trials", "20000", "--seed", "11",
        "--engine", "compiled",
    ]
    for argv in (density_argv, walk_argv):
        outputs = set()
        for workers in ("1", "4"):
            assert main(argv + ["--workers", workers]) == 0
            outputs.add(capsys.readouterr().out)
        assert len(outputs) == 1


def test_criterion_10_set_density_constructions():
    upto = 10**6
    stretched = list(
        itertools.takewhile(lambda v: v <= upto, stretch_set(itertools.count(1)))
    )
    assert stretched == [k * k for k in range(1, 1001)]
    assert Fraction(len(stretched), upto) <= Fraction(1, 1000)

    markers = oscillating_markers(11)
    # density is high at each block-closing marker and has collapsed by the
    # next block-opening marker; checked for the third block onward
    for block in (3, 4, 5):
        closing = markers[2 * block - 1]
        opening = markers[2 * block]
        high = Fraction(oscillating_prefix_count(closing), closing)
        low = Fraction(oscillating_prefix_count(opening), opening)
        assert high > Fraction(99, 100), (block, float(high))
        assert low < Fraction(1, 100), (block, float(low))
