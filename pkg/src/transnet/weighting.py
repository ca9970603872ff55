"""Per-source statistics and source weights (equal and adaptive)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .privacy import DebiasedNetwork, PrivacyParams
from .spectral import projection_distance


class DensityEstimate(NamedTuple):
    value: float
    clamped: bool


@dataclass(frozen=True)
class SourceStats:
    rho_hat: float
    e_theta_hat: float
    params: PrivacyParams
    n: int
    l: int = 0

    def __post_init__(self):
        if not math.isfinite(self.rho_hat):
            raise ValueError("density estimate must be finite")
        if not 0.0 <= self.e_theta_hat <= 1.0 + 1e-8:
            raise ValueError(f"heterogeneity estimate must lie in [0, 1], got {self.e_theta_hat}")


def estimate_density(a_hat) -> DensityEstimate:
    """Mean off-diagonal entry, floored at ``1 / (n (n - 1))``.

    Heavy perturbation of a sparse graph can make the debiased mean
    nonpositive; the floor keeps ``1 / rho**2`` finite and ``clamped`` marks it.
    """
    mat = a_hat.mat if isinstance(a_hat, DebiasedNetwork) else np.asarray(a_hat, dtype=float)
    n = mat.shape[0]
    if n < 2:
        raise ValueError("density needs at least two nodes")
    pairs = n * (n - 1)
    raw = (float(mat.sum()) - float(np.trace(mat))) / pairs
    floor = 1.0 / pairs
    if raw < floor:
        return DensityEstimate(floor, True)
    return DensityEstimate(raw, False)


def estimate_heterogeneity(u_l, u_0) -> float:
    return projection_distance(u_l, u_0)


def privacy_cost(stats: SourceStats) -> float:
    """``[(q + q' - 1) rho + 1 - q'] log(n) / (n rho^2)``."""
    p = stats.params
    rho = stats.rho_hat
    return (p.scale * rho + 1.0 - p.q_prime) * math.log(stats.n) / (stats.n * rho**2)


def _normalize(inv) -> np.ndarray:
    inv = np.asarray(inv, dtype=float)
    w = inv / inv.sum()
    return w / w.sum()


def equal_weights(l_count: int) -> np.ndarray:
    if l_count < 1:
        raise ValueError("need at least one source")
    return _normalize(np.ones(l_count))


def adaptive_weights_theoretical(stats, rho_plugin: float) -> np.ndarray:
    """Weights inversely proportional to privacy cost + ``L E^2`` + ``L / (n rho)``.

    ``rho_plugin`` stands in for the unknown common density; the target's
    debiased density is the usual choice.
    """
    L = len(stats)
    if L < 1:
        raise ValueError("need at least one source")
    if not rho_plugin > 0:
        raise ValueError(f"rho_plugin must be positive, got {rho_plugin}")
    denom = np.array([
        privacy_cost(s) + s.e_theta_hat**2 * L + L / (s.n * rho_plugin) for s in stats
    ])
    assert np.all(denom > 0), "adaptive weight denominators must be positive"
    return _normalize(1.0 / denom)


def adaptive_weights_practical(stats) -> np.ndarray:
    """Max-normalised variant: ``w_l ~ 1 / (a_l / max a + b_l / max b)``.

    ``a_l`` is the privacy cost and ``b_l = L E_l^2``.  A term whose maximum
    is zero is dropped; if both vanish the weights are equal.
    """
    L = len(stats)
    if L < 1:
        raise ValueError("need at least one source")
    a = np.array([privacy_cost(s) for s in stats])
    b = np.array([s.e_theta_hat**2 * L for s in stats])
    total = np.zeros(L)
    if a.max() > 0:
        total += a / a.max()
    if b.max() > 0:
        total += b / b.max()
    if not np.any(total > 0):
        return equal_weights(L)
    if np.any(total == 0):
        # a source with both terms zero dominates: split mass among such sources
        return _normalize((total == 0).astype(float))
    return _normalize(1.0 / total)


WEIGHTINGS = ("equal", "adaptive_practical", "adaptive_theoretical")
