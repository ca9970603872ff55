"""Seeded k-means (k-means++ initialisation, Lloyd iterations, restarts)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    wcss: float
    degenerate: bool = False


def _sq_dists(x, centers):
    return ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def kmeans_plusplus(x, k, rng):
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)
        centers[c] = x[idx]
        closest = np.minimum(closest, ((x - centers[c]) ** 2).sum(axis=1))
    return centers


def _repair_empty(x, labels, d2, k):
    """Give each empty cluster the point farthest from its current center."""
    counts = np.bincount(labels, minlength=k)
    if counts.min() > 0:
        return labels
    labels = labels.copy()
    own = d2[np.arange(x.shape[0]), labels]
    order = np.argsort(-own, kind="stable")
    pos = 0
    for c in np.flatnonzero(counts == 0):
        while pos < order.size and counts[labels[order[pos]]] <= 1:
            pos += 1
        if pos == order.size:
            break
        p = order[pos]
        counts[labels[p]] -= 1
        labels[p] = c
        counts[c] = 1
        pos += 1
    return labels


def _means(x, labels, k, fallback):
    counts = np.bincount(labels, minlength=k).astype(float)
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, x)
    centers = fallback.copy()
    nz = counts > 0
    centers[nz] = sums[nz] / counts[nz, None]
    return centers


def lloyd(x, centers, max_iter=100, tol=1e-8):
    k = centers.shape[0]
    prev = np.inf
    labels = None
    for _ in range(max_iter):
        d2 = _sq_dists(x, centers)
        new_labels = _repair_empty(x, np.argmin(d2, axis=1), d2, k)
        centers = _means(x, new_labels, k, centers)
        wcss = float(((x - centers[new_labels]) ** 2).sum())
        stalled = labels is not None and np.array_equal(new_labels, labels)
        labels = new_labels
        if stalled or (np.isfinite(prev) and prev - wcss <= tol * max(prev, 1e-300)):
            break
        prev = wcss
    wcss = float(((x - centers[labels]) ** 2).sum())
    return labels, centers, wcss


def canonical_labels(labels):
    """Renumber clusters in order of first appearance."""
    _, first = np.unique(labels, return_index=True)
    mapping = np.empty(labels.max() + 1, dtype=int)
    mapping[labels[np.sort(first)]] = np.arange(first.size)
    return mapping[labels]


def cluster_kmeans(space, k: int, restarts: int = 20, seed: int = 0,
                   max_iter: int = 100, tol: float = 1e-8) -> KMeansResult:
    """Cluster the rows of ``space`` into ``k`` groups.

    Each restart ``r`` draws its own generator from ``(seed, r)``; the run with
    the smallest within-cluster sum of squares wins, earliest on ties.  Labels
    are renumbered by first appearance.  ``degenerate`` is set when there are
    fewer distinct rows than ``k``.
    """
    x = np.asarray(getattr(space, "basis", space), dtype=float)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if restarts < 1:
        raise ValueError("need at least one restart")
    degenerate = np.unique(x, axis=0).shape[0] < k
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([int(seed), r])
        labels, centers, wcss = lloyd(x, kmeans_plusplus(x, k, rng), max_iter, tol)
        if best is None or wcss < best[2]:
            best = (labels, centers, wcss)
    labels, centers, wcss = best
    canon = canonical_labels(labels)
    # reorder centers to match the renumbered labels
    order = np.empty(k, dtype=int)
    seen = {}
    for old, new in zip(labels, canon):
        seen.setdefault(int(new), int(old))
    used = set(seen.values())
    rest = [c for c in range(k) if c not in used]
    for new in range(k):
        order[new] = seen[new] if new in seen else rest.pop(0)
    return KMeansResult(canon, centers[order], wcss, bool(degenerate))


def wcss(x, labels) -> float:
    """Within-cluster sum of squares of ``labels`` on rows of ``x``."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for c in np.unique(labels):
        pts = x[labels == c]
        total += float(((pts - pts.mean(axis=0)) ** 2).sum())
    return total
