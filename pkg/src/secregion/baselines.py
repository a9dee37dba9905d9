"""Independent validators: random-search oracle and orthogonal baselines.

The random-search region approximates the optimal nonlinear-coding region
on small instances by evaluating a large number of random covariance
triples; every reported point is achievable because it passes through the
shared rate evaluator with validated covariances.  The orthogonal
baselines serve each message in its own time slot (equal-length TDMA) or
time-share the two single-user optima (OMA).
"""

from __future__ import annotations

import math

import numpy as np

from .multicast import solve_multicast
from .rates import evaluate_triple
from .rotation import SolverOptions, build_rotation, n_angles
from .splitting import hull_pareto
from .types import (
    ORDER_12,
    ORDER_21,
    ORDER_NA,
    ChannelPair,
    CovarianceTriple,
    RateRegion,
    RateTriple,
    Scenario,
)
from .waterfill import waterfill
from .wiretap import solve_wiretap

# Sample family cycle: two full-rank draws, one rank-one, one rotated
# diagonal.  Extreme points of these regions are frequently low rank;
# a pure full-rank sampler under-covers them.
_FAMILY_CYCLE = ("full", "full", "rank1", "rotdiag")


def _random_shape(rng: np.random.Generator, nt: int, family: str) -> np.ndarray:
    if family == "full":
        g = rng.standard_normal((nt, nt))
        b = g @ g.T
    elif family == "rank1":
        g = rng.standard_normal(nt)
        b = np.outer(g, g)
    else:
        v = build_rotation(rng.uniform(0.0, math.pi, n_angles(nt)), nt)
        d = rng.dirichlet(np.ones(nt))
        b = (v * d) @ v.T
    return 0.5 * (b + b.T)


def _scaled(shape: np.ndarray, trace: float) -> np.ndarray:
    t = float(np.trace(shape))
    if trace <= 0 or t <= 0:
        return np.zeros_like(shape)
    return shape * (trace / t)


def random_search_region(
    ch: ChannelPair,
    scenario: Scenario,
    p: float,
    n_samples: int,
    seed: int = 0,
) -> RateRegion:
    """Pareto hull over random covariance triples with simplex trace splits.

    Sample zero is always the all-zero triple, so a single-sample run
    returns the origin.  Both encoding orders are evaluated when the
    scenario permits a swap.  Deterministic for a fixed seed.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if p < 0:
        raise ValueError("power budget must be nonnegative")
    rng = np.random.default_rng(seed)
    nt = ch.nt
    orders = (ORDER_12, ORDER_21) if scenario.allows_order_swap else (ORDER_12,)
    n_active = 3 if scenario.common_enabled else 2
    points = [RateTriple(0.0, 0.0, 0.0, ORDER_NA)]
    for i in range(n_samples - 1):
        family = _FAMILY_CYCLE[i % len(_FAMILY_CYCLE)]
        shares = rng.dirichlet(np.ones(n_active)) * p
        traces = shares if scenario.common_enabled else np.concatenate([[0.0], shares])
        shapes = [_random_shape(rng, nt, family) for _ in range(3)]
        cov = CovarianceTriple(
            _scaled(shapes[0], traces[0]),
            _scaled(shapes[1], traces[1]),
            _scaled(shapes[2], traces[2]),
            p,
        )
        for order in orders:
            points.append(evaluate_triple(ch, scenario, cov, order))
    return RateRegion(tuple(hull_pareto(points)), scenario, p)


def _slot_rates(
    ch: ChannelPair, scenario: Scenario, p: float, opts: SolverOptions | None
) -> tuple:
    """Full-power single-message optima for the three slots."""
    if scenario.common_enabled:
        r0 = solve_multicast(ch.h1, ch.h2, p, opts).rate if p > 0 else 0.0
    else:
        r0 = 0.0
    if scenario.user1_confidential:
        r1 = solve_wiretap(ch.h1, ch.h2, p, opts).rate
    else:
        r1 = waterfill(ch.h1, p)[1]
    if scenario.user2_confidential:
        r2 = solve_wiretap(ch.h2, ch.h1, p, opts).rate
    else:
        r2 = waterfill(ch.h2, p)[1]
    return r0, r1, r2


def tdma_region(
    ch: ChannelPair, scenario: Scenario, p: float, opts: SolverOptions | None = None
) -> RateRegion:
    """Equal-length orthogonal slots, one message per slot at full power.

    Each message gets 1/3 of the time (1/2 without a common message), so
    the achieved point is the per-slot optimum scaled by the slot share.
    """
    if p < 0:
        raise ValueError("power budget must be nonnegative")
    r0, r1, r2 = _slot_rates(ch, scenario, p, opts)
    n_slots = 3 if scenario.common_enabled else 2
    point = RateTriple(r0 / n_slots, r1 / n_slots, r2 / n_slots, ORDER_NA)
    return RateRegion(tuple(hull_pareto([point])), scenario, p)


def oma_timeshare(
    ch: ChannelPair, scenario: Scenario, p: float, opts: SolverOptions | None = None
) -> RateRegion:
    """Segment between the two full-power single-user optima.

    Defined for the two-message case only; the common message must be
    disabled.
    """
    if scenario.common_enabled:
        raise ValueError("the time-share baseline is defined without a common message")
    if p < 0:
        raise ValueError("power budget must be nonnegative")
    _, r1, r2 = _slot_rates(ch, scenario, p, opts)
    endpoints = [
        RateTriple(0.0, r1, 0.0, ORDER_NA),
        RateTriple(0.0, 0.0, r2, ORDER_NA),
    ]
    return RateRegion(tuple(hull_pareto(endpoints)), scenario, p)
