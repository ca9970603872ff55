"""TransNet: weighted eigenspace aggregation, ridge-type regularisation
towards the aggregate, and k-means on the result.  Also the Distributed SC
and Single SC baselines."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .clustering import cluster_kmeans
from .federation import SourceSummary, local_site_compute
from .privacy import DebiasedNetwork, debias
from .spectral import (
    Eigenspace,
    fix_signs,
    procrustes_align,
    projection_distance,
    top_k_eigvecs,
    weighted_aggregate,
)
from .weighting import (
    WEIGHTINGS,
    SourceStats,
    adaptive_weights_practical,
    adaptive_weights_theoretical,
    equal_weights,
    estimate_density,
)

log = logging.getLogger(__name__)

DEFAULT_GRID = (0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for one TransNet run.

    ``lam`` is either a nonnegative number or ``"cv"`` to pick it from
    ``lambda_grid`` by edge hold-out.  ``debias=False`` feeds the released
    matrices in unchanged (ablation).
    """

    k: int = 3
    weighting: str = "adaptive_practical"
    lam: float | str = "cv"
    lambda_grid: tuple = DEFAULT_GRID
    folds: int = 5
    debias: bool = True
    kmeans_restarts: int = 20
    cv_restarts: int = 5
    seed: int = 0
    which: str = "magnitude"
    rho_plugin: float | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("need k >= 2")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}")
        if isinstance(self.lam, str):
            if self.lam != "cv":
                raise ValueError(f"lam must be a number or 'cv', got {self.lam!r}")
        elif self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if not self.lambda_grid or min(self.lambda_grid) < 0:
            raise ValueError("lambda grid must be non-empty and nonnegative")
        if self.folds < 2:
            raise ValueError("need at least two folds")


@dataclass
class PipelineResult:
    regularized_space: Eigenspace
    aggregated_space: Eigenspace
    target_space: Eigenspace
    labels: np.ndarray
    weights: np.ndarray
    lambda_selected: float
    diagnostics: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, PipelineResult):
            return NotImplemented
        arrays = ("labels", "weights")
        spaces = ("regularized_space", "aggregated_space", "target_space")
        return (
            all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays)
            and all(np.array_equal(getattr(self, s).basis, getattr(other, s).basis) for s in spaces)
            and self.lambda_selected == other.lambda_selected
        )


class BaselineResult(NamedTuple):
    labels: np.ndarray
    space: Eigenspace


@dataclass
class PreparedData:
    """Coordinator's view: target matrix plus one summary per source."""

    target: DebiasedNetwork
    target_space: Eigenspace
    summaries: list


def source_stats(summaries: Sequence[SourceSummary], target_space: Eigenspace) -> list:
    return [
        SourceStats(s.rho_hat, projection_distance(s.eigenspace, target_space), s.params, s.n, s.l)
        for s in summaries
    ]


def compute_weights(stats, mode: str, rho_plugin: float | None = None) -> np.ndarray:
    if mode == "equal":
        return equal_weights(len(stats))
    if mode == "adaptive_practical":
        return adaptive_weights_practical(stats)
    if mode == "adaptive_theoretical":
        if rho_plugin is None:
            raise ValueError("theoretical adaptive weights need rho_plugin")
        return adaptive_weights_theoretical(stats, rho_plugin)
    raise ValueError(f"unknown weighting {mode!r}")


def step1_aggregate(source_summaries, target_space: Eigenspace, weighting_mode: str = "adaptive_practical",
                    rho_plugin: float | None = None):
    """Align every source eigenspace to the target and aggregate.

    Returns ``(aggregated_space, weights, stats)``.
    """
    if not source_summaries:
        raise ValueError("need at least one source summary")
    for s in source_summaries:
        if (s.n, s.k) != (target_space.n, target_space.k):
            raise ValueError(
                f"source {s.l} has shape ({s.n}, {s.k}), target ({target_space.n}, {target_space.k})"
            )
    stats = source_stats(source_summaries, target_space)
    w = compute_weights(stats, weighting_mode, rho_plugin)
    spaces = [s.eigenspace for s in source_summaries]
    rotations = [procrustes_align(u, target_space) for u in spaces]
    return weighted_aggregate(spaces, rotations, w), w, stats


def regularize(target_space: Eigenspace, aggregated_space: Eigenspace, lam: float) -> Eigenspace:
    """Top-``k`` eigenvectors of ``U0 U0^T + lam * Ubar Ubar^T``.

    Solved inside the joint column span of ``[U0, Ubar]`` (dimension at most
    ``2k``), which contains the whole range of that matrix.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    u0, ub = target_space.basis, aggregated_space.basis
    if u0.shape != ub.shape:
        raise ValueError(f"shape mismatch: {u0.shape} vs {ub.shape}")
    if lam == 0:
        return target_space
    k = u0.shape[1]
    left, sv, _ = np.linalg.svd(np.hstack([u0, ub]), full_matrices=False)
    q = left[:, sv > 1e-10 * sv[0]]
    a, b = q.T @ u0, q.T @ ub
    vals, vecs = np.linalg.eigh(a @ a.T + lam * (b @ b.T))
    order = np.argsort(-vals, kind="stable")
    degenerate = k < vals.size and abs(vals[order[k - 1]] - vals[order[k]]) <= 1e-12 * (1 + lam)
    return Eigenspace(fix_signs(q @ vecs[:, order[:k]]), bool(degenerate))


def regularization_objective(v, target_space, aggregated_space, lam: float) -> float:
    """``tr(V^T U0 U0^T V) - lam/2 ||V V^T - Ubar Ubar^T||_F^2`` from ``k x k`` products."""
    v = getattr(v, "basis", v)
    u0 = getattr(target_space, "basis", target_space)
    ub = getattr(aggregated_space, "basis", aggregated_space)
    k = v.shape[1]
    fit = np.linalg.norm(v.T @ u0) ** 2
    gap = 2 * k - 2 * np.linalg.norm(v.T @ ub) ** 2
    return float(fit - 0.5 * lam * gap)


def _block_means(labels, rows, cols, values, k):
    sums = np.zeros((k, k))
    counts = np.zeros((k, k))
    gi, gj = labels[rows], labels[cols]
    np.add.at(sums, (gi, gj), values)
    np.add.at(counts, (gi, gj), 1)
    sums, counts = sums + sums.T - np.diag(np.diag(sums)), counts + counts.T - np.diag(np.diag(counts))
    out = np.full((k, k), values.mean() if values.size else 0.0)
    nz = counts > 0
    out[nz] = sums[nz] / counts[nz]
    return out


def cv_lambda_scores(a_hat_0, aggregated_space: Eigenspace, k: int, grid, folds: int = 5,
                     seed: int = 0, restarts: int = 5, which: str = "magnitude") -> np.ndarray:
    """Mean hold-out block-model reconstruction error for each ``lam`` in ``grid``.

    Node pairs are split at random into ``folds`` parts.  For each fold the
    held-in entries, scaled by ``folds / (folds - 1)``, form a training
    matrix; its eigenspace is regularised toward ``aggregated_space``,
    clustered, and the block means of the held-in entries predict the
    held-out ones.
    """
    mat = a_hat_0.mat if isinstance(a_hat_0, DebiasedNetwork) else np.asarray(a_hat_0, dtype=float)
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("lambda grid must be non-empty")
    if folds < 2:
        raise ValueError("need at least two folds")
    n = mat.shape[0]
    iu, ju = np.triu_indices(n, 1)
    vals = mat[iu, ju]
    rng = np.random.default_rng([int(seed), 7919])
    fold_of = np.empty(iu.size, dtype=int)
    fold_of[rng.permutation(iu.size)] = np.arange(iu.size) % folds
    unique = sorted(set(grid))
    scores = dict.fromkeys(unique, 0.0)
    for f in range(folds):
        hold = fold_of == f
        train = ~hold
        t = np.zeros_like(mat)
        t[iu[train], ju[train]] = vals[train] * folds / (folds - 1)
        t = t + t.T
        u_train = top_k_eigvecs(t, k, which=which)
        for lam in unique:
            v = regularize(u_train, aggregated_space, lam)
            labels = cluster_kmeans(v, k, restarts, seed=int(seed) * 1000 + f).labels
            bhat = _block_means(labels, iu[train], ju[train], vals[train], k)
            resid = vals[hold] - bhat[labels[iu[hold]], labels[ju[hold]]]
            scores[lam] += float(resid @ resid) / folds
    return np.array([scores[g] for g in grid])


def select_lambda_cv(a_hat_0, aggregated_space: Eigenspace, k: int, grid=DEFAULT_GRID, folds: int = 5,
                     seed: int = 0, restarts: int = 5, which: str = "magnitude",
                     return_scores: bool = False):
    """Grid value with the smallest hold-out score; ties go to the smaller value."""
    grid = [float(g) for g in grid]
    if len(grid) == 1:
        return (grid[0], np.zeros(1)) if return_scores else grid[0]
    scores = cv_lambda_scores(a_hat_0, aggregated_space, k, grid, folds, seed, restarts, which)
    best = scores.min()
    candidates = [i for i, s in enumerate(scores) if s == best]
    pick = min(candidates, key=lambda i: (grid[i], i))
    return (grid[pick], scores) if return_scores else grid[pick]


def prepare(scenario, config: PipelineConfig) -> PreparedData:
    """Site-side work: debias the target and summarise each released source."""
    k = config.k
    if config.debias:
        target = debias(scenario.target, scenario.target_params)
    else:
        target = DebiasedNetwork(scenario.target.adj.astype(float), scenario.target_params)
    target_space = top_k_eigvecs(target.mat, k, which=config.which)
    summaries = [
        local_site_compute(net, par, k, config.debias, l=l, which=config.which)
        for l, (net, par) in enumerate(zip(scenario.sources, scenario.source_params), start=1)
    ]
    return PreparedData(target, target_space, summaries)


def transnet_from_summaries(target: DebiasedNetwork, target_space: Eigenspace, summaries,
                            config: PipelineConfig) -> PipelineResult:
    """Coordinator-side TransNet; never sees a source adjacency matrix."""
    k = config.k
    diagnostics = {"n_sources": len(summaries), "target_degenerate": target_space.degenerate}
    rho0 = estimate_density(target)
    diagnostics["rho_hat_0"] = rho0.value
    if summaries:
        rho_plugin = config.rho_plugin if config.rho_plugin is not None else rho0.value
        aggregated, w, stats = step1_aggregate(summaries, target_space, config.weighting, rho_plugin)
        diagnostics["rho_hat"] = [s.rho_hat for s in stats]
        diagnostics["e_theta_hat"] = [s.e_theta_hat for s in stats]
    else:
        aggregated, w = target_space, np.zeros(0)
    if config.lam == "cv":
        lam, scores = select_lambda_cv(target, aggregated, k, config.lambda_grid, config.folds,
                                       seed=config.seed, restarts=config.cv_restarts,
                                       which=config.which, return_scores=True)
        diagnostics["cv_scores"] = scores.tolist()
    else:
        lam = float(config.lam)
    regularized = regularize(target_space, aggregated, lam)
    km = cluster_kmeans(regularized, k, config.kmeans_restarts, seed=config.seed)
    diagnostics["kmeans_wcss"] = km.wcss
    diagnostics["kmeans_degenerate"] = km.degenerate
    log.debug("transnet: L=%d lambda=%g weights=%s", len(summaries), lam, np.round(w, 4))
    return PipelineResult(regularized, aggregated, target_space, km.labels, w, lam, diagnostics)


def distributed_sc_from_summaries(target_space: Eigenspace, summaries, config: PipelineConfig) -> BaselineResult:
    aggregated, _, _ = step1_aggregate(summaries, target_space, "equal")
    return BaselineResult(cluster_kmeans(aggregated, config.k, config.kmeans_restarts, seed=config.seed).labels,
                          aggregated)


def single_sc_from_target(target_space: Eigenspace, config: PipelineConfig) -> BaselineResult:
    return BaselineResult(cluster_kmeans(target_space, config.k, config.kmeans_restarts, seed=config.seed).labels,
                          target_space)


def run_transnet(scenario, config: PipelineConfig) -> PipelineResult:
    """End-to-end TransNet on a scenario whose layers are the released networks."""
    prep = prepare(scenario, config)
    return transnet_from_summaries(prep.target, prep.target_space, prep.summaries, config)


def baseline_distributed_sc(scenario, config: PipelineConfig) -> BaselineResult:
    """Equal-weight aggregate of the sources (aligned to the target), then k-means."""
    prep = prepare(scenario, config)
    return distributed_sc_from_summaries(prep.target_space, prep.summaries, config)


def baseline_single_sc(scenario, config: PipelineConfig) -> BaselineResult:
    """Spectral clustering of the target alone."""
    prep = prepare(scenario.without_sources(), config)
    return single_sc_from_target(prep.target_space, config)
