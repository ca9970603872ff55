"""Independent reference implementations used only by the tests.

None of these call into ``transnet``; they are deliberately naive.
"""
import itertools
import math

import numpy as np


def jacobi_eigh(a, tol=1e-15, max_sweeps=100):
    """Cyclic Jacobi rotations on a symmetric matrix; returns (values, vectors)."""
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(1.0, float(np.abs(a).max()))
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                # A <- R^T A R with R the (p, q) plane rotation
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * ap - s * aq, s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
    return np.diag(a).copy(), v


def jacobi_top_k(a, k, by_magnitude=True):
    vals, vecs = jacobi_eigh(a)
    key = np.abs(vals) if by_magnitude else vals
    order = np.argsort(-key)
    return vecs[:, order[:k]]


def gram_schmidt(x):
    """Classical Gram-Schmidt with re-orthogonalisation."""
    x = np.array(x, dtype=float)
    q = np.zeros_like(x)
    for j in range(x.shape[1]):
        v = x[:, j].copy()
        for _ in range(2):
            for i in range(j):
                v -= (q[:, i] @ v) * q[:, i]
        q[:, j] = v / np.linalg.norm(v)
    return q


def dense_projection_distance(u, v):
    """Spectral norm of ``U U^T - V V^T`` via the Jacobi reference solver."""
    d = u @ u.T - v @ v.T
    vals, _ = jacobi_eigh(d)
    return float(np.abs(vals).max())


def spectral_norm_power(m, iters=2000, seed=0):
    """Largest |eigenvalue| of a symmetric matrix by power iteration on m @ m."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(m.shape[0])
    m2 = m @ m
    for _ in range(iters):
        x = m2 @ x
        x /= np.linalg.norm(x)
    return float(math.sqrt(max(0.0, x @ m2 @ x)))


def random_orthogonal(k, rng):
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def random_basis(n, k, rng):
    return random_orthogonal(n, rng)[:, :k]


def brute_misclassification(est, truth, k):
    n = len(est)
    best = n
    for perm in itertools.permutations(range(k)):
        wrong = sum(1 for e, t in zip(est, truth) if perm[e] != t)
        best = min(best, wrong)
    return best / n


def naive_lloyd_wcss(x, k, restarts, seed):
    """Best WCSS over random-point initialisations and plain Lloyd iterations."""
    rng = np.random.default_rng(seed)
    best = np.inf
    n = x.shape[0]
    for _ in range(restarts):
        centers = x[rng.choice(n, size=k, replace=False)].copy()
        for _ in range(200):
            d = ((x[:, None, :] - centers[None]) ** 2).sum(-1)
            lab = d.argmin(1)
            new = np.array([x[lab == c].mean(0) if np.any(lab == c) else centers[c] for c in range(k)])
            if np.allclose(new, centers, atol=0, rtol=0):
                break
            centers = new
        lab = ((x[:, None, :] - centers[None]) ** 2).sum(-1).argmin(1)
        w = sum(((x[lab == c] - x[lab == c].mean(0)) ** 2).sum() for c in range(k) if np.any(lab == c))
        best = min(best, w)
    return best


def population_edge_sum(theta_labels, b):
    """Sum of P_ij over i < j by explicit double loop."""
    total = 0.0
    n = len(theta_labels)
    for i in range(n):
        for j in range(i + 1, n):
            total += b[theta_labels[i]][theta_labels[j]]
    return total
