"""Secrecy-rate maximization over a legitimate/eavesdropper channel pair.

The covariance is searched through the rotation-plus-loading
parameterization with multi-start BFGS.  The water-filling matrix for the
legitimate channel doubles as warm start and as a standing candidate, so
the returned rate never falls below the warm start evaluated under the
secrecy objective, nor below zero (the zero matrix is always a candidate).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .rates import gauss_rate, link_rate_batch_fn, link_rate_fn
from .rotation import SolverOptions, maximize_psd_objective
from .types import DimensionError, as_matrix
from .waterfill import DegenerateChannelWarning, waterfill


@dataclass(frozen=True)
class WiretapResult:
    q: np.ndarray
    rate: float
    converged: bool


def secrecy_rate(hm, he, q) -> float:
    """0.5 * (log2|I + Hm Q Hm^T| - log2|I + He Q He^T|), unclamped."""
    return gauss_rate(hm, q) - gauss_rate(he, q)


def solve_wiretap(hm, he, p: float, opts: SolverOptions | None = None) -> WiretapResult:
    """Best found covariance for the secrecy rate under a trace budget.

    Returns a PSD matrix with trace at most ``p`` plus the achieved rate.
    With a zero budget, or whenever every positive-power direction leaks
    more than it carries, the zero matrix wins and the rate is 0.
    """
    hm = as_matrix(hm, "legitimate channel")
    he = as_matrix(he, "eavesdropper channel")
    if hm.shape[1] != he.shape[1]:
        raise DimensionError(
            f"channels must share the column count, got {hm.shape} and {he.shape}"
        )
    if p < 0:
        raise ValueError("power budget must be nonnegative")
    nt = hm.shape[1]
    if p == 0:
        return WiretapResult(np.zeros((nt, nt)), 0.0, True)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateChannelWarning)
        warm_q, _ = waterfill(hm, p)

    fm, fe = link_rate_fn(hm), link_rate_fn(he)
    bm, be = link_rate_batch_fn(hm), link_rate_batch_fn(he)
    q, _, converged = maximize_psd_objective(
        lambda q: fm(q) - fe(q),
        nt,
        p,
        opts=opts,
        warm_q=warm_q,
        batch_search=lambda qs: bm(qs) - be(qs),
    )
    # Report through the stock evaluator, not the fast search path.
    return WiretapResult(q, secrecy_rate(hm, he, q), converged)
