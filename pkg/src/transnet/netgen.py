"""Network generation for the heterogeneous multi-layer stochastic block model.

A layer is described by an :class:`SbmSpec` (one-hot membership matrix plus a
symmetric connectivity matrix).  :func:`build_scenario` assembles the
four-group simulation design used throughout the experiments: one target layer
and ``L`` source layers split into four index brackets that share
connectivity, membership perturbation and privacy level.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .privacy import PrivacyParams, randomized_response


def layer_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Independent generator for ``(seed, stream, index)``.

    Streams: 0 network draw, 1 group membership, 2 randomized response,
    3 per-layer membership.
    """
    return np.random.default_rng([int(seed), int(stream), int(index)])


def one_hot(labels: Sequence[int], k: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    theta = np.zeros((labels.size, k), dtype=np.int8)
    theta[np.arange(labels.size), labels] = 1
    return theta


def membership_labels(theta: np.ndarray) -> np.ndarray:
    return np.argmax(np.asarray(theta), axis=1)


def balanced_labels(n: int, k: int) -> np.ndarray:
    """Contiguous community blocks; the first ``n % k`` communities get one extra node."""
    if k < 1 or n < k:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    return np.repeat(np.arange(k), sizes)


@dataclass(frozen=True)
class SbmSpec:
    """One SBM layer: ``P = theta @ b @ theta.T``."""

    theta: np.ndarray
    b: np.ndarray
    label: int = 0

    def __post_init__(self):
        theta = np.asarray(self.theta)
        b = np.asarray(self.b, dtype=float)
        if theta.ndim != 2 or b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("theta must be n x K and b must be K x K")
        if theta.shape[1] != b.shape[0]:
            raise ValueError(
                f"dimension mismatch: theta has {theta.shape[1]} columns, b is {b.shape[0]}x{b.shape[1]}"
            )
        if not np.all((theta == 0) | (theta == 1)) or not np.all(theta.sum(axis=1) == 1):
            raise ValueError("every row of theta must contain exactly one 1")
        if not np.allclose(b, b.T, rtol=0, atol=1e-12):
            raise ValueError("connectivity matrix must be symmetric")
        if b.min() < 0 or b.max() > 1:
            raise ValueError("connectivity entries must lie in [0, 1]")
        object.__setattr__(self, "theta", theta.astype(np.int8))
        object.__setattr__(self, "b", b)

    @classmethod
    def from_labels(cls, labels, b, label: int = 0) -> "SbmSpec":
        b = np.asarray(b, dtype=float)
        return cls(one_hot(labels, b.shape[0]), b, label)

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def k(self) -> int:
        return self.b.shape[0]

    @property
    def labels(self) -> np.ndarray:
        return membership_labels(self.theta)

    def population(self) -> np.ndarray:
        theta = self.theta.astype(float)
        return theta @ self.b @ theta.T


@dataclass(frozen=True)
class BinaryNetwork:
    """Symmetric 0/1 adjacency matrix with an empty diagonal."""

    adj: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adj)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.all((adj == 0) | (adj == 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(adj) != 0):
            raise ValueError("adjacency diagonal must be zero")
        object.__setattr__(self, "adj", adj.astype(np.int8))

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    def edges(self) -> np.ndarray:
        """Edge list ``(i, j)`` with ``i < j`` in row-major order."""
        i, j = np.nonzero(np.triu(self.adj, 1))
        return np.column_stack([i, j])

    def density(self) -> float:
        n = self.n
        return float(self.adj.sum()) / (n * (n - 1)) if n > 1 else 0.0


def symmetrize_upper(upper: np.ndarray) -> np.ndarray:
    """Mirror the strict upper triangle of ``upper``; diagonal set to zero."""
    tri = np.triu(upper, 1)
    return tri + tri.T


def generate_sbm(spec: SbmSpec, seed) -> BinaryNetwork:
    """Draw ``A_ij ~ Bernoulli(P_ij)`` independently for ``i < j``.

    ``seed`` may be anything accepted by :func:`numpy.random.default_rng`,
    including a ready ``Generator``.
    """
    rng = np.random.default_rng(seed)
    p = spec.population()
    draws = (rng.random(p.shape) < p).astype(np.int8)
    return BinaryNetwork(symmetrize_upper(draws))


def perturb_membership(theta0: np.ndarray, mu_frac: float, seed) -> np.ndarray:
    """Move ``floor(mu_frac * size)`` nodes of each community to another community.

    The destination is drawn uniformly among the remaining ``K - 1``
    communities, so a moved node never lands back in its own community.
    """
    if not 0.0 <= mu_frac <= 1.0:
        raise ValueError(f"mu_frac must lie in [0, 1], got {mu_frac}")
    theta0 = np.asarray(theta0)
    k = theta0.shape[1]
    if k < 2:
        raise ValueError("membership perturbation needs K >= 2")
    rng = np.random.default_rng(seed)
    labels = membership_labels(theta0)
    new = labels.copy()
    for c in range(k):
        members = np.flatnonzero(labels == c)
        count = int(np.floor(mu_frac * members.size + 1e-12))
        if count == 0:
            continue
        moved = rng.choice(members, size=count, replace=False)
        shift = rng.integers(1, k, size=count)
        new[moved] = (c + shift) % k
    return one_hot(new, k).astype(theta0.dtype)


# Connectivity matrices of the simulation design (target and four source groups).
B0 = np.array([[0.3, 0.1, 0.0], [0.1, 0.3, 0.06], [0.0, 0.06, 0.3]])
B_GROUPS = (
    np.array([[0.3, 0.1, 0.1], [0.1, 0.3, 0.06], [0.1, 0.06, 0.3]]),
    np.array([[0.3, 0.1, 0.0], [0.1, 0.2, 0.06], [0.0, 0.06, 0.2]]),
    np.array([[0.3, 0.1, 0.0], [0.1, 0.3, 0.1], [0.0, 0.1, 0.3]]),
    np.array([[0.3, 0.15, 0.0], [0.15, 0.3, 0.06], [0.0, 0.06, 0.3]]),
)

# (experiment, case) -> (mu, q, q0); Experiment II releases every layer unperturbed.
DESIGN = {
    (1, 1): ((0, 0, 0, 0), (0.95, 0.95, 0.7, 0.7), 0.95),
    (1, 2): ((0, 0, 0, 0), (0.95, 0.95, 0.8, 0.8), 0.95),
    (1, 3): ((0, 0, 0, 0), (0.8, 0.8, 0.8, 0.8), 0.95),
    (2, 1): ((0.02, 0.02, 0.5, 0.5), (1, 1, 1, 1), 1.0),
    (2, 2): ((0.02, 0.02, 0.3, 0.3), (1, 1, 1, 1), 1.0),
    (2, 3): ((0.3, 0.3, 0.3, 0.3), (1, 1, 1, 1), 1.0),
    (3, 1): ((0.02, 0.02, 0.5, 0.5), (0.95, 0.95, 0.7, 0.7), 0.95),
    (3, 2): ((0.1, 0.1, 0.5, 0.5), (0.95, 0.95, 0.7, 0.7), 0.95),
    (3, 3): ((0.02, 0.02, 0.5, 0.5), (0.8, 0.8, 0.95, 0.95), 0.95),
}


@dataclass
class ExperimentConfig:
    """Parameters of one simulation design.

    ``mu[i]`` and ``q[i]`` belong to source group ``i``; the non-edge
    preserving probability of every layer equals its ``q``.  With
    ``membership_per_layer`` False, all layers of a group share one
    perturbed membership; otherwise each layer is relabelled independently.
    """

    n: int = 120
    K: int = 3
    L: int = 8
    b0: np.ndarray = field(default_factory=lambda: B0.copy())
    b_groups: tuple = field(default_factory=lambda: tuple(b.copy() for b in B_GROUPS))
    mu: tuple = (0.0, 0.0, 0.0, 0.0)
    q: tuple = (0.95, 0.95, 0.7, 0.7)
    q0: float = 0.95
    reps: int = 10
    seed: int = 42
    membership_per_layer: bool = False

    def __post_init__(self):
        self.b0 = np.asarray(self.b0, dtype=float)
        self.b_groups = tuple(np.asarray(b, dtype=float) for b in self.b_groups)
        self.mu = tuple(float(m) for m in self.mu)
        self.q = tuple(float(v) for v in self.q)
        self.q0 = float(self.q0)
        self.validate()

    def validate(self):
        if len(self.mu) != 4 or len(self.q) != 4 or len(self.b_groups) != 4:
            raise ValueError("mu, q and b_groups must each have four entries")
        if any(not 0 <= m <= 1 for m in self.mu):
            raise ValueError(f"mu entries must lie in [0, 1], got {self.mu}")
        if any(not 0.5 < v <= 1 for v in (*self.q, self.q0)):
            raise ValueError("privacy parameters must lie in (0.5, 1]")
        for b in (self.b0, *self.b_groups):
            if b.shape != (self.K, self.K):
                raise ValueError(f"connectivity matrices must be {self.K}x{self.K}")
        if self.L < 4:
            raise ValueError(f"need at least 4 source layers, got L={self.L}")
        if self.n < self.K:
            raise ValueError("need n >= K")

    @classmethod
    def design(cls, experiment: int, case: int, **overrides) -> "ExperimentConfig":
        """Configuration of Experiment ``experiment`` (1-3), case ``case`` (1-3)."""
        try:
            mu, q, q0 = DESIGN[(experiment, case)]
        except KeyError:
            raise ValueError(f"unknown design: experiment {experiment}, case {case}") from None
        return cls(**{"mu": mu, "q": q, "q0": q0, **overrides})

    def with_L(self, L: int) -> "ExperimentConfig":
        return replace(self, L=L)

    def to_keyvalue(self) -> str:
        def fmt(x):
            return ",".join(repr(float(v)) for v in np.ravel(x))

        lines = [
            f"n={self.n}",
            f"K={self.K}",
            f"L={self.L}",
            f"b0={fmt(self.b0)}",
            *(f"b{g + 1}={fmt(b)}" for g, b in enumerate(self.b_groups)),
            f"mu={fmt(self.mu)}",
            f"q={fmt(self.q)}",
            f"q0={self.q0!r}",
            f"reps={self.reps}",
            f"seed={self.seed}",
            f"membership_per_layer={int(self.membership_per_layer)}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_keyvalue(cls, text: str, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        """Parse ``key=value`` lines (``#`` comments allowed) over ``base``."""
        kv = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            kv[key] = value
        cfg = base if base is not None else cls()
        K = int(kv.get("K", cfg.K))

        def floats(s):
            return [float(v) for v in s.replace(";", ",").split(",") if v.strip()]

        def matrix(s):
            return np.array(floats(s)).reshape(K, K)

        b_groups = list(cfg.b_groups)
        for g in range(4):
            if f"b{g + 1}" in kv:
                b_groups[g] = matrix(kv.pop(f"b{g + 1}"))
        known = {"n", "K", "L", "b0", "mu", "q", "q0", "reps", "seed", "membership_per_layer"}
        unknown = set(kv) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            n=int(kv.get("n", cfg.n)),
            K=K,
            L=int(kv.get("L", cfg.L)),
            b0=matrix(kv["b0"]) if "b0" in kv else cfg.b0,
            b_groups=tuple(b_groups),
            mu=tuple(floats(kv["mu"])) if "mu" in kv else cfg.mu,
            q=tuple(floats(kv["q"])) if "q" in kv else cfg.q,
            q0=float(kv.get("q0", cfg.q0)),
            reps=int(kv.get("reps", cfg.reps)),
            seed=int(kv.get("seed", cfg.seed)),
            membership_per_layer=bool(int(kv.get("membership_per_layer", int(cfg.membership_per_layer)))),
        )


def group_index(L: int) -> np.ndarray:
    """Group (0-3) of source layers ``1..L`` by the floor-bracket rule."""
    if L < 4:
        raise ValueError(f"need at least 4 source layers, got L={L}")
    cuts = [L // 4, L // 2, (3 * L) // 4]
    layers = np.arange(1, L + 1)
    return np.searchsorted(cuts, layers, side="left").astype(int)


@dataclass
class Scenario:
    """Target layer (index 0) plus ``L`` source layers.

    ``networks`` hold the raw draws until :meth:`release` applies randomized
    response; ``released`` records which state the matrices are in.
    """

    target: BinaryNetwork
    sources: list
    target_labels: np.ndarray
    source_labels: list
    target_params: PrivacyParams
    source_params: list
    k: int
    released: bool = False
    seed: int | None = None
    groups: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.target.n

    @property
    def L(self) -> int:
        return len(self.sources)

    def layers(self) -> list:
        return [self.target, *self.sources]

    def params(self) -> list:
        return [self.target_params, *self.source_params]

    def release(self, seed=None) -> "Scenario":
        """Apply randomized response to every layer with its own stream."""
        if self.released:
            raise ValueError("scenario already released")
        seed = self.seed if seed is None else seed
        if seed is None:
            raise ValueError("release needs a seed")
        out = [
            randomized_response(net, par, layer_rng(seed, 2, l))
            for l, (net, par) in enumerate(zip(self.layers(), self.params()))
        ]
        return replace(self, target=out[0], sources=out[1:], released=True)

    def without_sources(self) -> "Scenario":
        return replace(self, sources=[], source_labels=[], source_params=[],
                       groups=None if self.groups is None else self.groups[:0])


def build_scenario(config: ExperimentConfig, seed: int) -> Scenario:
    """Draw the target and all source layers of ``config`` (unreleased)."""
    config.validate()
    target_labels = balanced_labels(config.n, config.K)
    theta0 = one_hot(target_labels, config.K)
    target = generate_sbm(SbmSpec(theta0, config.b0, 0), layer_rng(seed, 0, 0))

    groups = group_index(config.L)
    group_theta = [
        perturb_membership(theta0, config.mu[g], layer_rng(seed, 1, g)) for g in range(4)
    ]
    sources, source_labels, source_params = [], [], []
    for l in range(1, config.L + 1):
        g = groups[l - 1]
        if config.membership_per_layer:
            theta = perturb_membership(theta0, config.mu[g], layer_rng(seed, 3, l))
        else:
            theta = group_theta[g]
        spec = SbmSpec(theta, config.b_groups[g], l)
        sources.append(generate_sbm(spec, layer_rng(seed, 0, l)))
        source_labels.append(membership_labels(theta))
        source_params.append(PrivacyParams(config.q[g], config.q[g]))
    return Scenario(
        target=target,
        sources=sources,
        target_labels=target_labels,
        source_labels=source_labels,
        target_params=PrivacyParams(config.q0, config.q0),
        source_params=source_params,
        k=config.K,
        seed=int(seed),
        groups=groups,
    )
