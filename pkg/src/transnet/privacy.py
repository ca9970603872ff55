"""Randomized response on edges, debiasing, and edge-DP accounting."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PrivacyParams:
    """Edge-preserving probabilities of randomized response.

    ``q`` is P(1 -> 1) and ``q_prime`` is P(0 -> 0).
    """

    q: float
    q_prime: float

    def __post_init__(self):
        q, qp = float(self.q), float(self.q_prime)
        if not (0.0 <= q <= 1.0 and 0.0 <= qp <= 1.0):
            raise ValueError(f"q and q' must lie in [0, 1], got ({q}, {qp})")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "q_prime", qp)

    @classmethod
    def symmetric(cls, q: float) -> "PrivacyParams":
        return cls(q, q)

    @property
    def scale(self) -> float:
        """``q + q' - 1``, the debiasing denominator."""
        return self.q + self.q_prime - 1.0

    def check_debiasable(self):
        if self.scale <= 0:
            raise ValueError(
                f"debiasing needs q + q' > 1, got q={self.q}, q'={self.q_prime}"
            )


@dataclass(frozen=True)
class DebiasedNetwork:
    """Real symmetric matrix with an exactly-zero diagonal and its privacy parameters."""

    mat: np.ndarray
    params: PrivacyParams

    @property
    def n(self) -> int:
        return self.mat.shape[0]


def randomized_response(a, params: PrivacyParams, seed):
    """Release ``a`` through edge-level randomized response.

    Each pair ``i < j`` is perturbed once and mirrored: an edge survives with
    probability ``q``, a non-edge survives with probability ``q'``.
    """
    from .netgen import BinaryNetwork, symmetrize_upper

    adj = a.adj if isinstance(a, BinaryNetwork) else np.asarray(a)
    rng = np.random.default_rng(seed)
    u = rng.random(adj.shape)
    keep = np.where(adj == 1, u < params.q, u < params.q_prime)
    out = np.where(keep, adj, 1 - adj).astype(np.int8)
    return BinaryNetwork(symmetrize_upper(out))


def debias(a_tilde, params: PrivacyParams) -> DebiasedNetwork:
    """Unbiased correction ``(A~ - (1 - q')) / (q + q' - 1)`` off the diagonal."""
    from .netgen import BinaryNetwork

    params.check_debiasable()
    adj = a_tilde.adj if isinstance(a_tilde, BinaryNetwork) else np.asarray(a_tilde)
    mat = (adj.astype(float) - (1.0 - params.q_prime)) / params.scale
    np.fill_diagonal(mat, 0.0)
    return DebiasedNetwork(mat, params)


def epsilon_to_q(eps: float) -> PrivacyParams:
    """Symmetric randomized response meeting an ``eps`` edge-DP budget."""
    if not eps > 0:
        raise ValueError(f"privacy budget must be positive, got {eps}")
    # e^eps / (1 + e^eps) written to stay finite for large eps
    q = 1.0 / (1.0 + math.exp(-eps))
    return PrivacyParams(q, q)


def q_to_epsilon(params: PrivacyParams) -> float:
    """Smallest edge-DP budget satisfied by randomized response with ``params``.

    Raises ``ValueError`` when one of the four likelihood ratios has a zero
    denominator (this includes the no-noise case ``q = q' = 1``).
    """
    q, qp = params.q, params.q_prime
    pairs = ((qp, 1 - q), (1 - q, qp), (1 - qp, q), (q, 1 - qp))
    if any(den == 0 for _, den in pairs):
        raise ValueError(
            f"edge-DP budget undefined for q={q}, q'={qp}: a likelihood ratio has zero denominator"
        )
    ratio = max(num / den for num, den in pairs)
    if ratio <= 0:
        raise ValueError(f"edge-DP budget undefined for q={q}, q'={qp}")
    return math.log(ratio)
