"""Small statistics helpers for Monte Carlo proportion estimates."""

from __future__ import annotations

import math

# Two-sided normal quantiles used throughout the reports and tests.
Z_95 = 1.959964
Z_999 = 3.290527


def wilson_interval(hits: int, trials: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Stays inside [0, 1] and behaves sensibly at hits = 0 or hits = trials,
    which is where most of the interesting estimates sit.
    """
    if trials <= 0:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= hits <= trials:
        raise ValueError(f"hits {hits} outside 0..{trials}")
    p = hits / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials * trials))
    # In exact arithmetic the bounds meet p at hits = 0 and hits = trials;
    # rounding can land a hair inside, which would exclude p_hat itself.
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return lo, hi


def binomial_sigma(p: float, trials: int) -> float:
    """Standard deviation of a sample proportion at true probability p."""
    if trials <= 0:
        raise ValueError(f"trials must be >= 1, got {trials}")
    return math.sqrt(p * (1.0 - p) / trials)


def within_sigmas(p_hat: float, p_true: float, trials: int, sigmas: float) -> bool:
    """True iff p_hat deviates from p_true by at most `sigmas` standard errors."""
    return abs(p_hat - p_true) <= sigmas * binomial_sigma(p_true, trials)
