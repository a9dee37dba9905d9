"""Rate expressions for the two-user downlink with layered messages.

Every achievable-rate formula used anywhere in the package is evaluated
here, always against the original (untransformed) channels.  Log
determinants go through a Cholesky factorization of I + PSD, which is
positive definite by construction; an eigenvalue sum is the fallback when
round-off defeats the factorization.  Inverse-times-matrix expressions are
rewritten as differences of log determinants, so no explicit inverse is
ever formed.
"""

from __future__ import annotations

import math

import numpy as np

from .types import (
    ORDER_12,
    ORDER_21,
    ChannelPair,
    CovarianceTriple,
    DimensionError,
    RateTriple,
    Scenario,
    as_matrix,
)

LN2 = math.log(2.0)


def logdet_pd(m: np.ndarray) -> float:
    """Natural-log determinant of a symmetric positive-definite matrix."""
    try:
        chol = np.linalg.cholesky(m)
        return 2.0 * float(np.sum(np.log(np.diag(chol))))
    except np.linalg.LinAlgError:
        w = np.linalg.eigvalsh(m)
        return float(np.sum(np.log(np.maximum(w, np.finfo(float).tiny))))


def _half_logdet2_iplus(h: np.ndarray, q: np.ndarray) -> float:
    """0.5 * log2 det(I + H Q H^T) with the argument symmetrized first."""
    m = np.eye(h.shape[0]) + h @ q @ h.T
    return 0.5 * logdet_pd(0.5 * (m + m.T)) / LN2


def _check_link(h, q, name: str) -> tuple:
    h = as_matrix(h, f"{name} channel")
    q = as_matrix(q, f"{name} covariance")
    if q.shape[0] != q.shape[1] or q.shape[0] != h.shape[1]:
        raise DimensionError(
            f"{name}: channel {h.shape} and covariance {q.shape} are incompatible"
        )
    return h, q


def gauss_rate(h, q) -> float:
    """Interference-free link rate 0.5 * log2|I + H Q H^T| in bits."""
    h, q = _check_link(h, q, "link")
    return _half_logdet2_iplus(h, q)


def link_rate_fn(h):
    """Fast evaluator q -> 0.5 * log2|I + H Q H^T| with the channel fixed.

    Validates the channel once and skips per-call argument checks, for use
    inside optimizer inner loops; sizes up to 3 use the explicit
    determinant.  Reported results must still go through ``gauss_rate``.
    """
    h = as_matrix(h, "channel")
    n = h.shape[0]
    eye = np.eye(n)
    if n == 1:
        hv = h[0]

        def f1(q):
            return 0.5 * math.log2(1.0 + float(hv @ q @ hv))

        return f1
    if n == 2:

        def f2(q):
            m = eye + h @ q @ h.T
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            return 0.5 * math.log2(det)

        return f2
    if n == 3:

        def f3(q):
            m = eye + h @ q @ h.T
            det = (
                m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
                - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
                + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
            )
            return 0.5 * math.log2(det)

        return f3

    def fn(q):
        return _half_logdet2_iplus(h, q)

    return fn


def link_rate_batch_fn(h):
    """Vectorized companion of ``link_rate_fn`` over a stack of covariances.

    Returns a callable mapping an array of shape (k, nt, nt) to the k link
    rates.  Used by finite-difference gradients, where all perturbed
    points can be evaluated in one shot.
    """
    h = as_matrix(h, "channel")
    n = h.shape[0]
    eye = np.eye(n)
    tiny = np.finfo(float).tiny

    def rates(qs):
        m = eye + np.einsum("ij,kjl,ml->kim", h, qs, h)
        if n == 1:
            det = m[:, 0, 0]
        elif n == 2:
            det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        elif n == 3:
            det = (
                m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1])
                - m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 0])
                + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] - m[:, 1, 1] * m[:, 2, 0])
            )
        else:
            _, logabs = np.linalg.slogdet(m)
            return 0.5 * logabs / LN2
        return 0.5 * np.log2(np.maximum(det, tiny))

    return rates


def layered_rate(h, q_signal, q_interference) -> float:
    """Rate of a signal decoded while another layer acts as noise.

    Computed as the log-determinant difference
    0.5 * (log2|I + H (Qi + Qs) H^T| - log2|I + H Qi H^T|), which equals
    the resolvent form with (I + H Qi H^T) inverted but is better
    conditioned.
    """
    h, qs = _check_link(h, q_signal, "signal")
    _, qi = _check_link(h, q_interference, "interference")
    return _half_logdet2_iplus(h, qs + qi) - _half_logdet2_iplus(h, qi)


def common_rate_components(ch: ChannelPair, cov: CovarianceTriple) -> tuple:
    """Per-user rates of the shared message over the residual interference."""
    qi = cov.q1 + cov.q2
    return (
        layered_rate(ch.h1, cov.q0, qi),
        layered_rate(ch.h2, cov.q0, qi),
    )


def common_rate(ch: ChannelPair, cov: CovarianceTriple) -> float:
    """Rate of the message both users decode: the worse of the two links."""
    return min(common_rate_components(ch, cov))


def private_rate_user1(ch: ChannelPair, q1) -> float:
    """First-encoded private message: interference-free link to user 1."""
    return gauss_rate(ch.h1, q1)


def private_rate_user2(ch: ChannelPair, q1, q2) -> float:
    """Second private message, with the first user's signal as interference."""
    return layered_rate(ch.h2, q2, q1)


def conf_rate_user1(ch: ChannelPair, q1) -> float:
    """Secrecy rate of user 1's message with user 2 as the eavesdropper.

    May be negative; callers clamp only at reporting boundaries.
    """
    return gauss_rate(ch.h1, q1) - gauss_rate(ch.h2, q1)


def conf_rate_user2(ch: ChannelPair, q1, q2) -> float:
    """Secrecy rate of user 2's message with user 1 eavesdropping.

    Both links see user 1's signal as interference; may be negative.
    """
    return layered_rate(ch.h2, q2, q1) - layered_rate(ch.h1, q2, q1)


def evaluate_triple(
    ch: ChannelPair,
    scenario: Scenario,
    cov: CovarianceTriple,
    order: str = ORDER_12,
) -> RateTriple:
    """Evaluate the scenario's three rate formulas for a covariance triple.

    ``order`` selects which user is encoded first.  Order "21" exchanges the
    roles of the two users in the formulas (h1 with h2 and q1 with q2) and
    is rejected for scenario B, whose single order is already optimal.
    Negative secrecy rates are clamped to zero in the reported triple.
    """
    if order not in (ORDER_12, ORDER_21):
        raise ValueError(f"order must be '12' or '21', got {order!r}")
    if order == ORDER_21 and not scenario.allows_order_swap:
        raise ValueError("scenario B supports only the '12' encoding order")
    if cov.nt != ch.nt:
        raise DimensionError(
            f"covariances of size {cov.nt} do not match nt = {ch.nt}"
        )

    if order == ORDER_21:
        work = ch.swapped()
        q_first, q_second = cov.q2, cov.q1
    else:
        work = ch
        q_first, q_second = cov.q1, cov.q2

    # The shared message sees the sum q1 + q2 on both links, so the swap
    # leaves its value unchanged.
    r0 = min(
        layered_rate(work.h1, cov.q0, q_first + q_second),
        layered_rate(work.h2, cov.q0, q_first + q_second),
    )

    if scenario.user1_confidential:
        r_first = gauss_rate(work.h1, q_first) - gauss_rate(work.h2, q_first)
    else:
        r_first = gauss_rate(work.h1, q_first)

    if scenario.user2_confidential:
        r_second = layered_rate(work.h2, q_second, q_first) - layered_rate(
            work.h1, q_second, q_first
        )
    else:
        r_second = layered_rate(work.h2, q_second, q_first)

    if order == ORDER_21:
        r1, r2 = r_second, r_first
    else:
        r1, r2 = r_first, r_second

    return RateTriple(max(r0, 0.0), max(r1, 0.0), max(r2, 0.0), order)
