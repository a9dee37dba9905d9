"""Shared value types, validation, and tolerances for the rate-region solvers.

Conventions used throughout the package:

* Channels are real-valued and transposes are plain transposes.
* Rates are in bits per (real) channel use, i.e. half log2-determinants.
* Covariance matrices carry power; the transmit budget is a trace bound.
* Negative computed rates (possible for confidential messages) are clamped
  to zero only at reporting boundaries, never inside solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Double-precision eigensolvers drift at roughly 1e-13 per operation;
# the validation margins sit an order of magnitude above observed drift.
SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-9
PROJECTED_PSD_TOL = 1e-12
TRACE_REL_SLACK = 1e-8
SIMPLEX_TOL = 1e-12
RATE_FLOOR = -1e-9

ORDER_12 = "12"
ORDER_21 = "21"
ORDER_NA = "na"
ENCODING_ORDERS = (ORDER_12, ORDER_21, ORDER_NA)

SCENARIO_TAGS = ("A", "B", "C")


class DimensionError(ValueError):
    """Matrix arguments with incompatible or non-matrix shapes."""


class ConsistencyError(RuntimeError):
    """An internal cross-check between two computation paths disagreed."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array, raising ``DimensionError`` otherwise."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _frozen_copy(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out


def validate_covariance(q, tol: float = PSD_TOL) -> bool:
    """Check that ``q`` is symmetric within ``tol`` with min eigenvalue >= -tol.

    Raises ``DimensionError`` for non-square input; otherwise never raises.
    """
    arr = as_matrix(q, "covariance")
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"covariance must be square, got {arr.shape}")
    if arr.size == 0:
        return True
    if float(np.max(np.abs(arr - arr.T))) > tol:
        return False
    w = np.linalg.eigvalsh(0.5 * (arr + arr.T))
    return bool(w[0] >= -tol)


def project_psd(q) -> np.ndarray:
    """Project a nominally symmetric matrix onto the PSD cone.

    The symmetrized input is eigendecomposed, negative eigenvalues are
    clamped to zero, and the matrix is reassembled.  Intended as numerical
    hygiene after iterative updates; the input must already be symmetric
    within 1e-6.
    """
    arr = as_matrix(q, "matrix")
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"matrix must be square, got {arr.shape}")
    if arr.size and float(np.max(np.abs(arr - arr.T))) > 1e-6:
        raise ValueError("input is not symmetric within 1e-6")
    sym = 0.5 * (arr + arr.T)
    w, v = np.linalg.eigh(sym)
    out = (v * np.maximum(w, 0.0)) @ v.T
    return 0.5 * (out + out.T)


@dataclass(frozen=True)
class ChannelPair:
    """The two real downlink channel matrices defining a problem instance.

    ``h1`` is n1 x nt and ``h2`` is n2 x nt; both share the transmit
    antenna count nt.  Instances are immutable and safe to share across
    parallel workers.
    """

    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        h1 = as_matrix(self.h1, "h1")
        h2 = as_matrix(self.h2, "h2")
        if min(h1.shape) < 1 or min(h2.shape) < 1:
            raise DimensionError("channel matrices need at least one row and column")
        if h1.shape[1] != h2.shape[1]:
            raise DimensionError(
                f"h1 and h2 must share the column count, got {h1.shape} and {h2.shape}"
            )
        object.__setattr__(self, "h1", _frozen_copy(h1))
        object.__setattr__(self, "h2", _frozen_copy(h2))

    @property
    def nt(self) -> int:
        return self.h1.shape[1]

    @property
    def n1(self) -> int:
        return self.h1.shape[0]

    @property
    def n2(self) -> int:
        return self.h2.shape[0]

    def swapped(self) -> "ChannelPair":
        """The same instance with the user roles exchanged."""
        return ChannelPair(self.h2, self.h1)


@dataclass(frozen=True)
class Scenario:
    """Security configuration: which user messages are confidential.

    Tag A carries two private messages, B protects user 1 only, C protects
    both users.  ``common_enabled`` switches the shared multicast message
    on or off.
    """

    tag: str
    common_enabled: bool = True

    def __post_init__(self):
        tag = str(self.tag).upper()
        if tag not in SCENARIO_TAGS:
            raise ValueError(f"scenario tag must be one of {SCENARIO_TAGS}, got {self.tag!r}")
        object.__setattr__(self, "tag", tag)

    @property
    def user1_confidential(self) -> bool:
        return self.tag in ("B", "C")

    @property
    def user2_confidential(self) -> bool:
        return self.tag == "C"

    @property
    def allows_order_swap(self) -> bool:
        # For B the single encoding order is already optimal; swapping is an error.
        return self.tag != "B"


@dataclass(frozen=True)
class CovarianceTriple:
    """Transmit covariances (q0, q1, q2) under a total trace budget ``p_total``."""

    q0: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    p_total: float

    def __post_init__(self):
        mats = []
        for name in ("q0", "q1", "q2"):
            arr = as_matrix(getattr(self, name), name)
            if arr.shape[0] != arr.shape[1]:
                raise DimensionError(f"{name} must be square, got {arr.shape}")
            if float(np.max(np.abs(arr - arr.T))) > SYMMETRY_TOL:
                raise ValueError(f"{name} is not symmetric within {SYMMETRY_TOL}")
            if np.linalg.eigvalsh(0.5 * (arr + arr.T))[0] < -PSD_TOL:
                raise ValueError(f"{name} fails the PSD check at tolerance {PSD_TOL}")
            mats.append(arr)
        if len({m.shape for m in mats}) != 1:
            raise DimensionError("q0, q1, q2 must share a common shape")
        p = float(self.p_total)
        if p < 0:
            raise ValueError("p_total must be nonnegative")
        total = sum(float(np.trace(m)) for m in mats)
        if total > p * (1.0 + TRACE_REL_SLACK) + 1e-12:
            raise ValueError(f"trace sum {total} exceeds budget {p}")
        object.__setattr__(self, "q0", _frozen_copy(mats[0]))
        object.__setattr__(self, "q1", _frozen_copy(mats[1]))
        object.__setattr__(self, "q2", _frozen_copy(mats[2]))
        object.__setattr__(self, "p_total", p)

    @property
    def nt(self) -> int:
        return self.q0.shape[0]

    def trace_total(self) -> float:
        return float(np.trace(self.q0) + np.trace(self.q1) + np.trace(self.q2))


@dataclass(frozen=True)
class PowerSplit:
    """Fractions (alpha0, alpha1, alpha2) partitioning the power budget."""

    alpha0: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        vals = (float(self.alpha0), float(self.alpha1), float(self.alpha2))
        for name, v in zip(("alpha0", "alpha1", "alpha2"), vals):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(sum(vals) - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"fractions must sum to 1 within {SIMPLEX_TOL}, got {sum(vals)}")
        object.__setattr__(self, "alpha0", vals[0])
        object.__setattr__(self, "alpha1", vals[1])
        object.__setattr__(self, "alpha2", vals[2])

    def as_tuple(self):
        return (self.alpha0, self.alpha1, self.alpha2)


@dataclass(frozen=True)
class RateTriple:
    """A point (r0, r1, r2) in bits per channel use with encoding-order provenance.

    Values in [-1e-9, 0) are clamped to zero on construction; anything more
    negative is rejected, since reported points must be achievable.
    """

    r0: float
    r1: float
    r2: float
    order: str = ORDER_NA

    def __post_init__(self):
        if self.order not in ENCODING_ORDERS:
            raise ValueError(f"order must be one of {ENCODING_ORDERS}, got {self.order!r}")
        for name in ("r0", "r1", "r2"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"{name} is not finite")
            if v < RATE_FLOOR:
                raise ValueError(f"{name} = {v} is below the clamp floor {RATE_FLOOR}")
            object.__setattr__(self, name, max(v, 0.0))

    def as_array(self) -> np.ndarray:
        return np.array([self.r0, self.r1, self.r2], dtype=float)


def _dominated_mask(arr: np.ndarray) -> np.ndarray:
    """Boolean mask of points strictly dominated by another point in ``arr``."""
    ge_all = (arr[None, :, :] >= arr[:, None, :]).all(axis=2)
    gt_any = (arr[None, :, :] > arr[:, None, :]).any(axis=2)
    return (ge_all & gt_any).any(axis=1)


@dataclass(frozen=True)
class RateRegion:
    """A Pareto set of rate triples for one scenario and power budget."""

    points: tuple
    scenario: Scenario
    p_total: float

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ValueError("a rate region needs at least one point")
        for p in pts:
            if not isinstance(p, RateTriple):
                raise TypeError("region points must be RateTriple instances")
        arr = np.array([p.as_array() for p in pts])
        if bool(_dominated_mask(arr).any()):
            raise ValueError("region contains a dominated point")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "p_total", float(self.p_total))

    def as_array(self) -> np.ndarray:
        return np.array([p.as_array() for p in self.points])

    def max_rate(self, component: int) -> float:
        return float(self.as_array()[:, component].max())


def pareto_filter(points: Sequence[RateTriple]) -> list:
    """Drop every point strictly dominated by another point in the list.

    Points are swept in lexicographic descending order, where any dominator
    precedes what it dominates, so each candidate only needs comparing
    against the kept set; memory stays linear in the input.
    """
    if not points:
        return []
    arr = np.array([p.as_array() for p in points])
    order = np.lexsort((arr[:, 2], arr[:, 1], arr[:, 0]))[::-1]
    kept_rows = []
    kept_arr = np.empty((0, 3))
    kept_idx = []
    for i in order:
        p = arr[i]
        if kept_rows:
            ge = (kept_arr >= p).all(axis=1)
            gt = (kept_arr > p).any(axis=1)
            if bool((ge & gt).any()):
                continue
        kept_rows.append(p)
        kept_arr = np.asarray(kept_rows)
        kept_idx.append(i)
    kept_idx.sort()
    return [points[i] for i in kept_idx]
