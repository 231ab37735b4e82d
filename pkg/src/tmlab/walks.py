"""Fall-off probabilities for symmetric random walks near an absorbing edge.

The head of a machine that keeps moving on fresh tape behaves like a
symmetric walk, so the probability of eventually dropping off the left edge
is a useful independent target for the simulator experiments.  Two exact
routes are kept deliberately separate so they can check each other: a
path-counting dynamic program over (step, position), and the closed form
via Catalan numbers for the first-passage probabilities.  Monte Carlo walks
provide a third, sampling-based route.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .sampling import Xoshiro256StarStar, derive_trial_seed
from .stats import Z_95, wilson_interval

# Above this horizon the rational DP's numerators get impractically wide and
# the float DP takes over; its additive error stays below k * 2^-50.
EXACT_HORIZON_LIMIT = 256


def falloff_cdf_exact(k: int) -> Fraction:
    """P(walk from cell 0 first steps to cell -1 within k steps), exactly.

    Counts the 2^k equally likely k-step paths, crediting a path that falls
    at step t with all 2^(k-t) continuations.
    """
    if k < 0:
        raise ValueError(f"horizon must be >= 0, got {k}")
    if k > EXACT_HORIZON_LIMIT:
        raise ValueError(
            f"horizon {k} above exact limit {EXACT_HORIZON_LIMIT}, use falloff_cdf"
        )
    counts = [0] * (k + 2)
    counts[0] = 1
    fallen = 0
    for t in range(1, k + 1):
        fallen += counts[0] << (k - t)
        new = [0] * (k + 2)
        for pos in range(k + 1):
            c = counts[pos]
            if c:
                new[pos + 1] += c
                if pos >= 1:
                    new[pos - 1] += c
        counts = new
    return Fraction(fallen, 1 << k)


def _falloff_cdf_float(k: int) -> float:
    # Survival-mass DP in float64; error grows at most linearly in k.
    survive = np.zeros(k + 2, dtype=np.float64)
    survive[0] = 1.0
    fallen = 0.0
    for _ in range(k):
        fallen += 0.5 * survive[0]
        new = np.zeros_like(survive)
        new[:-1] = 0.5 * survive[1:]
        new[1:] += 0.5 * survive[:-1]
        survive = new
    return fallen


def falloff_cdf(k: int) -> float:
    """Float fall-off probability within k steps; exact route when feasible."""
    if k < 0:
        raise ValueError(f"horizon must be >= 0, got {k}")
    if k <= EXACT_HORIZON_LIMIT:
        return float(falloff_cdf_exact(k))
    return _falloff_cdf_float(k)


def first_passage(m: int) -> Fraction:
    """P(first fall-off happens exactly at step 2m+1) = Catalan(m) / 2^(2m+1).

    Fall-off can only happen at odd steps, and the cumulative sums of this
    sequence must reproduce falloff_cdf_exact at every odd horizon.
    """
    if m < 0:
        raise ValueError(f"index must be >= 0, got {m}")
    catalan = math.comb(2 * m, m) // (m + 1)
    return Fraction(catalan, 1 << (2 * m + 1))


@dataclass(frozen=True)
class WalkSpec:
    """One walk experiment: 1D edge walk or 2D quarter-plane corner walk."""

    dimension: int
    steps: int
    trials: Optional[int] = None
    master_seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.trials is not None and self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class WalkEstimate:
    """Monte Carlo fall-off proportion with a 95% Wilson interval."""

    dimension: int
    steps: int
    trials: int
    hits: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    master_seed: int


def _walk1d_falls(stream: Xoshiro256StarStar, k: int) -> bool:
    pos = 0
    for _ in range(k):
        if stream.below(2) == 0:
            if pos == 0:
                return True
            pos -= 1
        else:
            pos += 1
    return False


def _walk2d_falls(stream: Xoshiro256StarStar, k: int) -> bool:
    # Direction codes: 0 -x, 1 +x, 2 -y, 3 +y; edges at x = -1 and y = -1.
    x = y = 0
    for _ in range(k):
        d = stream.below(4)
        if d == 0:
            if x == 0:
                return True
            x -= 1
        elif d == 1:
            x += 1
        elif d == 2:
            if y == 0:
                return True
            y -= 1
        else:
            y += 1
    return False


def _pure_walk_hits(dimension: int, k: int, master_seed: int, lo: int, hi: int) -> int:
    falls = _walk1d_falls if dimension == 1 else _walk2d_falls
    hits = 0
    for i in range(lo, hi):
        stream = Xoshiro256StarStar(derive_trial_seed(master_seed, i))
        if falls(stream, k):
            hits += 1
    return hits


def _compiled_walk_chunk(dimension: int):
    from . import _kernels

    return _kernels.walk1d_hits if dimension == 1 else _kernels.walk2d_hits


def _chunk_bounds(trials: int, workers: int) -> list[tuple[int, int]]:
    bounds = [trials * i // workers for i in range(workers + 1)]
    return [(lo, hi) for lo, hi in zip(bounds, bounds[1:]) if lo < hi]


def _mc_estimate(spec: WalkSpec, workers: int, engine: str) -> WalkEstimate:
    if spec.trials is None or spec.master_seed is None:
        raise ValueError("Monte Carlo needs trials and master_seed")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if engine == "auto":
        try:
            import numba  # noqa: F401

            engine = "compiled"
        except ImportError:
            engine = "pure"
    if engine == "pure":
        hits = _pure_walk_hits(spec.dimension, spec.steps, spec.master_seed, 0, spec.trials)
    elif engine == "compiled":
        chunk = _compiled_walk_chunk(spec.dimension)
        seed, k = spec.master_seed, spec.steps
        # Per-trial seeding makes the hit count independent of the chunking,
        # so any worker count produces the same estimate.
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(chunk, seed, lo, hi, k)
                for lo, hi in _chunk_bounds(spec.trials, workers)
            ]
            hits = sum(int(f.result()) for f in futures)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    p_hat = hits / spec.trials
    ci_lo, ci_hi = wilson_interval(hits, spec.trials, Z_95)
    return WalkEstimate(
        spec.dimension, spec.steps, spec.trials, hits, p_hat, ci_lo, ci_hi, spec.master_seed
    )


def falloff_mc(spec: WalkSpec, workers: int = 1, engine: str = "auto") -> WalkEstimate:
    """Monte Carlo 1D fall-off proportion at the requested horizon."""
    if spec.dimension != 1:
        raise ValueError(f"falloff_mc is 1D only, got dimension {spec.dimension}")
    return _mc_estimate(spec, workers, engine)


def falloff2d_mc(spec: WalkSpec, workers: int = 1, engine: str = "auto") -> WalkEstimate:
    """Monte Carlo quarter-plane fall-off proportion from the corner cell."""
    if spec.dimension != 2:
        raise ValueError(f"falloff2d_mc is 2D only, got dimension {spec.dimension}")
    return _mc_estimate(spec, workers, engine)
