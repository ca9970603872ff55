"""Clustering and subspace accuracy metrics."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

EXHAUSTIVE_MAX_K = 8


def confusion(est, truth, k: int) -> np.ndarray:
    est = np.asarray(est, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if est.shape != truth.shape:
        raise ValueError(f"label vectors differ in length: {est.shape} vs {truth.shape}")
    for name, lab in (("estimated", est), ("true", truth)):
        if lab.size and (lab.min() < 0 or lab.max() >= k):
            raise ValueError(f"{name} labels must lie in [0, {k})")
    c = np.zeros((k, k), dtype=np.int64)
    np.add.at(c, (est, truth), 1)
    return c


@lru_cache(maxsize=None)
def _permutations(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.intp)


def matched_exhaustive(c: np.ndarray) -> int:
    """Largest agreement count over all label permutations."""
    k = c.shape[0]
    perms = _permutations(k)
    return int(c[np.arange(k), perms].sum(axis=1).max())


def matched_assignment(c: np.ndarray) -> int:
    rows, cols = linear_sum_assignment(c, maximize=True)
    return int(c[rows, cols].sum())


def misclassification_rate(est, truth, k: int, method: str = "auto") -> float:
    """Fraction of nodes misclassified under the best relabelling of ``est``.

    ``method="auto"`` searches all ``k!`` permutations for ``k <= 8`` and
    solves the assignment problem on the confusion matrix otherwise.
    """
    c = confusion(est, truth, k)
    n = int(c.sum())
    if n == 0:
        return 0.0
    if method == "auto":
        method = "exhaustive" if k <= EXHAUSTIVE_MAX_K else "assignment"
    if method == "exhaustive":
        hits = matched_exhaustive(c)
    elif method == "assignment":
        hits = matched_assignment(c)
    else:
        raise ValueError(f"unknown method {method!r}")
    return 1.0 - hits / n
