"""Eigenspace primitives: top-K eigenvectors, Procrustes alignment,
weighted aggregation, projection distance and population eigenspaces."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-10


class RankDeficientError(ValueError):
    """Weighted aggregate of eigenspaces lost a direction before QR."""

    def __init__(self, index: int, value: float):
        super().__init__(
            f"aggregated eigenspace is rank deficient: |R[{index},{index}]| = {value:.3e}"
        )
        self.index = index
        self.value = value


class DegenerateEigengapWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class Eigenspace:
    """``n x k`` basis with orthonormal columns.

    ``degenerate`` marks a basis whose cut at ``k`` fell on a repeated
    eigenvalue, so the span is not uniquely determined.
    """

    basis: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[1] > basis.shape[0]:
            raise ValueError(f"basis must be n x k with k <= n, got shape {basis.shape}")
        object.__setattr__(self, "basis", basis)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    def orthogonality_error(self) -> float:
        return float(np.linalg.norm(self.basis.T @ self.basis - np.eye(self.k)))

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


def _as_basis(u) -> np.ndarray:
    return u.basis if isinstance(u, Eigenspace) else np.asarray(u, dtype=float)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so that each one's largest-magnitude entry is positive.

    Ties go to the lowest row index (``argmax`` returns the first maximum).
    """
    vectors = np.array(vectors, dtype=float, copy=True)
    if vectors.size == 0:
        return vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def top_k_eigvecs(s, k: int, which: str = "magnitude") -> Eigenspace:
    """Leading ``k`` eigenvectors of a symmetric matrix.

    Parameters
    ----------
    s : ndarray
        Symmetric ``n x n`` matrix.
    k : int
        Number of eigenvectors.
    which : {"magnitude", "algebraic"}
        Rank eigenvalues by absolute value (default) or by signed value.

    Returns
    -------
    Eigenspace
        Columns ordered by the chosen ranking, descending, with the sign
        convention of :func:`fix_signs`.  ``degenerate`` is set when the
        ``k``-th and ``k+1``-th ranked eigenvalues coincide.
    """
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    if s.ndim != 2 or s.shape[1] != n:
        raise ValueError("matrix must be square")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not np.allclose(s, s.T, rtol=0, atol=1e-10 * max(1.0, np.abs(s).max())):
        raise ValueError("matrix must be symmetric")
    vals, vecs = np.linalg.eigh(s)
    if which == "magnitude":
        key = np.abs(vals)
    elif which == "algebraic":
        key = vals
    else:
        raise ValueError(f"unknown ordering {which!r}")
    # stable sort on -key keeps eigh's ascending order among exact ties
    order = np.argsort(-key, kind="stable")
    degenerate = False
    if k < n:
        scale = max(1.0, float(np.abs(vals).max()))
        degenerate = bool(abs(key[order[k - 1]] - key[order[k]]) <= 1e-12 * scale)
        if degenerate:
            warnings.warn("eigen-gap at the k-th cut is zero; basis is not unique",
                          DegenerateEigengapWarning, stacklevel=2)
    return Eigenspace(fix_signs(vecs[:, order[:k]]), degenerate)


def procrustes_align(u_l, u_0) -> np.ndarray:
    """Orthogonal ``Z`` minimising ``||u_l Z - u_0||_F``.

    With ``u_l.T @ u_0 = V S W.T``, the minimiser is ``V W.T``.
    """
    a, b = _as_basis(u_l), _as_basis(u_0)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    v, _, wt = np.linalg.svd(a.T @ b)
    return v @ wt


def weighted_aggregate(spaces, rotations, w, tol: float = 1e-8) -> Eigenspace:
    """QR-orthonormalised ``sum_l w_l U_l Z_l``.

    Raises
    ------
    RankDeficientError
        If a diagonal entry of ``R`` falls below ``tol`` in absolute value.
    """
    w = np.asarray(w, dtype=float)
    if len(spaces) == 0 or len(spaces) != len(rotations) or len(spaces) != w.size:
        raise ValueError("spaces, rotations and weights must be non-empty and of equal length")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be nonnegative and sum to one")
    bases = [_as_basis(u) for u in spaces]
    if len({b.shape for b in bases}) != 1:
        raise ValueError("all eigenspaces must share (n, k)")
    total = np.zeros_like(bases[0])
    for wl, ul, zl in zip(w, bases, rotations):
        total += wl * (ul @ np.asarray(zl, dtype=float))
    q, r = np.linalg.qr(total)
    diag = np.abs(np.diag(r))
    bad = np.flatnonzero(diag < tol)
    if bad.size:
        raise RankDeficientError(int(bad[0]), float(diag[bad[0]]))
    # make R's diagonal positive so Q is the unique thin-QR factor
    q = q * np.sign(np.diag(r))
    return Eigenspace(q)


def projection_distance(u, v) -> float:
    """``||U U^T - V V^T||_2``, the sine of the largest principal angle.

    Equal to ``sqrt(1 - s_min(U^T V)**2)`` but evaluated as the spectral norm
    of ``U - V (V^T U)``, which keeps full relative accuracy for nearly equal
    subspaces (the square-root form bottoms out near 1.5e-8).
    """
    a, b = _as_basis(u), _as_basis(v)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    resid = a - b @ (b.T @ a)
    return float(min(1.0, np.linalg.svd(resid, compute_uv=False).max()))


def ground_truth_eigenspace(spec) -> Eigenspace:
    """Population eigenspace ``Theta Delta^{-1}`` of an SBM layer.

    Only the span matters for projection distances, so the rotation that
    diagonalises ``Delta B Delta`` is not applied.
    """
    theta = np.asarray(spec.theta, dtype=float)
    sizes = theta.sum(axis=0)
    if np.any(sizes == 0):
        raise ValueError(f"empty community: sizes {sizes.astype(int).tolist()}")
    if np.linalg.matrix_rank(spec.b) < spec.b.shape[0]:
        raise ValueError("connectivity matrix must have full rank K")
    return Eigenspace(theta / np.sqrt(sizes))


def membership_eigenspace(labels, k: int) -> Eigenspace:
    """``Theta Delta^{-1}`` from a label vector (no connectivity check)."""
    labels = np.asarray(labels, dtype=int)
    theta = np.zeros((labels.size, k))
    theta[np.arange(labels.size), labels] = 1.0
    sizes = theta.sum(axis=0)
    if np.any(sizes == 0):
        raise ValueError(f"empty community: sizes {sizes.astype(int).tolist()}")
    return Eigenspace(theta / np.sqrt(sizes))
