"""Edge-list files, scenario export, and multilayer dataset loading.

Edge lists hold one ``i j`` pair per line (zero-based, whitespace
separated, ``#`` starts a comment).  Label files hold one community id per
line; ``-1``, ``NA`` or an empty line marks an unlabelled node.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..netgen import BinaryNetwork, Scenario
from ..privacy import PrivacyParams

log = logging.getLogger(__name__)

UNLABELLED = {"", "-1", "na", "nan", "none"}


def read_edges(path) -> np.ndarray:
    path = Path(path)
    pairs = []
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read edge list {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"{path}:{lineno}: expected 'i j', got {raw!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-integer node index in {raw!r}") from None
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def edges_to_network(pairs: np.ndarray, n: int, source: str = "edge list") -> BinaryNetwork:
    """Symmetric 0/1 network from index pairs; drops self-loops, merges duplicates."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        bad = pairs[(pairs < 0).any(axis=1) | (pairs >= n).any(axis=1)][0]
        raise ValueError(f"{source}: node index out of range [0, {n}) in pair {tuple(bad)}")
    loops = pairs[:, 0] == pairs[:, 1]
    if loops.any():
        log.warning("%s: dropped %d self-loop(s)", source, int(loops.sum()))
        pairs = pairs[~loops]
    adj = np.zeros((n, n), dtype=np.int8)
    adj[pairs[:, 0], pairs[:, 1]] = 1
    adj[pairs[:, 1], pairs[:, 0]] = 1
    return BinaryNetwork(adj)


def write_edges(net: BinaryNetwork, path) -> Path:
    path = Path(path)
    edges = net.edges()
    text = "".join(f"{i} {j}\n" for i, j in edges)
    path.write_text(text)
    return path


def read_labels(path) -> np.ndarray:
    """Label per line; unlabelled entries become -1."""
    out = []
    for raw in Path(path).read_text().splitlines():
        token = raw.split("#", 1)[0].strip()
        out.append(-1 if token.lower() in UNLABELLED else int(token))
    return np.array(out, dtype=np.int64)


def write_labels(labels, path) -> Path:
    path = Path(path)
    path.write_text("".join(f"{int(v)}\n" for v in labels))
    return path


@dataclass
class RealDataset:
    layers: list
    labels: np.ndarray
    names: list
    params: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.layers[0].n

    @property
    def labelled(self) -> np.ndarray:
        return np.flatnonzero(self.labels >= 0)

    def encoded_labels(self):
        """Labelled node ids with their labels renumbered to ``0..K-1``."""
        idx = self.labelled
        uniq, codes = np.unique(self.labels[idx], return_inverse=True)
        return idx, codes, uniq.size


def load_multilayer(edge_files, labels_file, n: int | None = None, names=None, params=None) -> RealDataset:
    """Read aligned layers over one node universe.

    The universe size is ``n`` if given, else the length of the label file.
    Unlabelled nodes stay in the matrices and are only skipped at evaluation.
    """
    labels = read_labels(labels_file)
    if n is None:
        n = labels.size
    if labels.size != n:
        raise ValueError(f"{labels_file}: {labels.size} labels for {n} nodes")
    layers = [edges_to_network(read_edges(f), n, source=str(f)) for f in edge_files]
    if not layers:
        raise ValueError("need at least one layer")
    names = list(names) if names is not None else [Path(f).stem for f in edge_files]
    return RealDataset(layers, labels, names, list(params) if params is not None else [])


def write_scenario(scenario: Scenario, directory) -> Path:
    """Export ``layer_<l>.edges`` (l=0 is the target), ``labels.txt`` and ``meta.txt``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for l, net in enumerate(scenario.layers()):
        write_edges(net, directory / f"layer_{l}.edges")
    write_labels(scenario.target_labels, directory / "labels.txt")
    meta = [f"n={scenario.n}", f"K={scenario.k}", f"L={scenario.L}",
            f"released={int(scenario.released)}"]
    for l, par in enumerate(scenario.params()):
        meta.append(f"q_{l}={par.q!r}")
        meta.append(f"qprime_{l}={par.q_prime!r}")
    (directory / "meta.txt").write_text("\n".join(meta) + "\n")
    return directory


def read_meta(path) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def read_scenario(directory) -> Scenario:
    directory = Path(directory)
    meta = read_meta(directory / "meta.txt")
    n, k, L = int(meta["n"]), int(meta["K"]), int(meta["L"])
    files = [directory / f"layer_{l}.edges" for l in range(L + 1)]
    data = load_multilayer(files, directory / "labels.txt", n=n)
    params = [PrivacyParams(float(meta[f"q_{l}"]), float(meta[f"qprime_{l}"])) for l in range(L + 1)]
    return Scenario(
        target=data.layers[0], sources=data.layers[1:], target_labels=data.labels,
        source_labels=[], target_params=params[0], source_params=params[1:], k=k,
        released=bool(int(meta.get("released", "0"))),
    )
