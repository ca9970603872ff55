"""Simulation and real-data experiment runners with CSV output."""
from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..netgen import ExperimentConfig, Scenario, build_scenario, layer_rng
from ..pipeline import (
    PipelineConfig,
    distributed_sc_from_summaries,
    prepare,
    single_sc_from_target,
    transnet_from_summaries,
)
from ..privacy import PrivacyParams, randomized_response
from ..spectral import membership_eigenspace, projection_distance
from .metrics import misclassification_rate

log = logging.getLogger(__name__)

METHODS = {
    "adaw": "TransNet-AdaW",
    "ew": "TransNet-EW",
    "dsc": "Distributed SC",
    "ssc": "Single SC",
}
DEFAULT_L = (8, 12, 16, 20, 24)
METRIC_FIELDS = ("method", "L", "case", "rep", "seed", "proj_dist", "misclass", "lambda", "seconds")
REAL_FIELDS = ("method", "target", "q0", "rep", "seed", "misclass", "lambda", "seconds")


@dataclass
class MetricRecord:
    method: str
    L: int
    case: str
    rep: int
    seed: int
    proj_dist: float
    misclass: float
    lambda_selected: float = float("nan")
    seconds: float = float("nan")

    def __post_init__(self):
        if not 0.0 <= self.misclass <= 1.0:
            raise ValueError(f"misclassification must lie in [0, 1], got {self.misclass}")


def derive_seed(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def parse_methods(spec) -> list:
    """Accept ``"adaw,ew"`` or an iterable of short or display names."""
    if isinstance(spec, str):
        spec = [s for s in spec.split(",") if s.strip()]
    display = {v: k for k, v in METHODS.items()}
    out = []
    for m in spec:
        m = m.strip()
        key = m.lower() if m.lower() in METHODS else display.get(m)
        if key is None:
            raise ValueError(f"unknown method {m!r}; choose from {sorted(METHODS)}")
        out.append(key)
    return out


def evaluate_methods(scenario: Scenario, methods, seed: int, truth_labels=None, eval_nodes=None,
                     truth_space=None, pipeline: PipelineConfig | None = None) -> dict:
    """Run ``methods`` on one released scenario.

    Returns ``{short_name: (proj_dist, misclass, lambda, seconds)}``.  Site
    summaries are computed once and shared by every method.
    """
    base = pipeline or PipelineConfig(k=scenario.k)
    base = replace(base, k=scenario.k, seed=int(seed))
    truth = scenario.target_labels if truth_labels is None else np.asarray(truth_labels)
    nodes = np.arange(scenario.n) if eval_nodes is None else np.asarray(eval_nodes)
    if truth_space is None and eval_nodes is None:
        truth_space = membership_eigenspace(truth, scenario.k)
    t0 = time.perf_counter()
    prep = prepare(scenario, base)
    shared = time.perf_counter() - t0

    def score(labels, space):
        pd = projection_distance(space, truth_space) if truth_space is not None else float("nan")
        est = labels[nodes]
        k = max(scenario.k, int(truth.max()) + 1, int(est.max()) + 1)
        return pd, misclassification_rate(est, truth, k)

    out = {}
    for m in methods:
        t = time.perf_counter()
        if m in ("adaw", "ew"):
            cfg = replace(base, weighting="adaptive_practical" if m == "adaw" else "equal")
            res = transnet_from_summaries(prep.target, prep.target_space, prep.summaries, cfg)
            pd, mc = score(res.labels, res.regularized_space)
            lam = res.lambda_selected
        elif m == "dsc":
            res = distributed_sc_from_summaries(prep.target_space, prep.summaries, base)
            pd, mc = score(res.labels, res.space)
            lam = float("nan")
        elif m == "ssc":
            res = single_sc_from_target(prep.target_space, base)
            pd, mc = score(res.labels, res.space)
            lam = float("nan")
        else:
            raise ValueError(f"unknown method {m!r}")
        out[m] = (pd, mc, lam, time.perf_counter() - t + shared)
    return out


def _simulate_job(args):
    config, L, rep, methods, case, pipeline = args
    seed = derive_seed(config.seed, rep)
    scenario = build_scenario(config.with_L(L), seed).release()
    results = evaluate_methods(scenario, methods, seed, pipeline=pipeline)
    return [
        MetricRecord(METHODS[m], L, case, rep, seed, pd, mc, lam, sec)
        for m, (pd, mc, lam, sec) in results.items()
    ]


def run_experiment(config: ExperimentConfig, methods=tuple(METHODS), out_path=None, l_values=DEFAULT_L,
                   case: str = "", pipeline: PipelineConfig | None = None, workers: int = 1,
                   record_time: bool = False) -> list:
    """Replicate ``config`` for every ``L`` in ``l_values``.

    Replication ``rep`` uses seed ``derive_seed(config.seed, rep)`` for every
    ``L``.  With ``out_path`` set, ``metrics.csv`` and ``summary.csv`` are
    written there (a directory) or to the named ``.csv`` file.
    """
    methods = parse_methods(methods)
    jobs = [(config, int(L), rep, methods, case, pipeline) for L in l_values for rep in range(config.reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_simulate_job, jobs))
    else:
        chunks = [_simulate_job(j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    if out_path is not None:
        path = Path(out_path)
        metrics = path if path.suffix == ".csv" else path / "metrics.csv"
        write_metrics(records, metrics, record_time=record_time)
        write_summary(records, metrics.with_name("summary.csv"))
    return records


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_metrics(records, path, record_time: bool = False) -> Path:
    """Write ``records`` with the stable ``metrics.csv`` schema.

    Wall-clock seconds are left blank unless ``record_time`` is set, so that
    reruns with one seed produce identical files.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(METRIC_FIELDS)
            for r in records:
                w.writerow([r.method, r.L, r.case, r.rep, r.seed, _fmt(r.proj_dist), _fmt(r.misclass),
                            _fmt(r.lambda_selected), _fmt(r.seconds) if record_time else ""])
    except OSError as exc:
        raise OSError(f"cannot write metrics to {path}: {exc}") from exc
    return path


def _num(s: str) -> float:
    return float(s) if s != "" else float("nan")


def read_metrics(path) -> list:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        MetricRecord(r["method"], int(r["L"]), r["case"], int(r["rep"]), int(r["seed"]),
                     _num(r["proj_dist"]), _num(r["misclass"]), _num(r["lambda"]), _num(r["seconds"]))
        for r in rows
    ]


def summarize(records, x: str = "L", group: str = "case") -> list:
    """Mean and standard error per ``(group, method, x)``."""
    groups = {}
    for r in records:
        groups.setdefault((getattr(r, group), r.method, getattr(r, x)), []).append(r)
    out = []
    for (g, method, xv), rs in sorted(groups.items(), key=lambda kv: kv[0]):
        row = {group: g, "method": method, x: xv, "reps": len(rs)}
        for metric in ("proj_dist", "misclass", "lambda_selected"):
            vals = np.array([getattr(r, metric, float("nan")) for r in rs], dtype=float)
            vals = vals[~np.isnan(vals)]
            row[f"mean_{metric}"] = float(vals.mean()) if vals.size else float("nan")
            row[f"se_{metric}"] = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else float("nan")
        out.append(row)
    return out


def write_summary(records, path, x: str = "L", group: str = "case") -> Path:
    rows = summarize(records, x, group)
    path = Path(path)
    if not rows:
        path.write_text("")
        return path
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})
    return path


def mean_metric(records, method: str, metric: str = "misclass", **where) -> float:
    vals = [getattr(r, metric) for r in records
            if r.method == method and all(getattr(r, k) == v for k, v in where.items())]
    if not vals:
        raise ValueError(f"no records for {method} with {where}")
    return float(np.mean(vals))


@dataclass
class RealRecord:
    method: str
    target: str
    q0: float
    rep: int
    seed: int
    misclass: float
    lambda_selected: float = float("nan")
    seconds: float = float("nan")


def run_realdata(dataset, target_layer=None, q0_sweep=(0.7, 0.75, 0.8, 0.85, 0.9, 0.95), source_qs=None,
                 k: int | None = None, seed: int = 42, reps: int = 10, out_path=None,
                 methods=tuple(METHODS), pipeline: PipelineConfig | None = None,
                 record_time: bool = False) -> list:
    """Perturb-and-cluster protocol on a multilayer dataset.

    Each chosen target layer (all layers when ``target_layer`` is None) is
    released at every ``q0`` in ``q0_sweep``; the other layers act as sources
    released at their fixed ``source_qs``.  Only labelled nodes are scored.
    """
    methods = parse_methods(methods)
    idx, codes, n_labels = dataset.encoded_labels()
    k = k or n_labels
    nl = len(dataset.layers)
    if source_qs is None:
        source_qs = [p.q for p in dataset.params] if dataset.params else [1.0] * nl
    if len(source_qs) != nl:
        raise ValueError(f"need one source q per layer ({nl}), got {len(source_qs)}")
    targets = range(nl) if target_layer is None else [int(target_layer)]
    records = []
    for t in targets:
        src = [l for l in range(nl) if l != t]
        for q0 in q0_sweep:
            for rep in range(reps):
                rs = derive_seed(seed, t, rep)
                target_par = PrivacyParams(q0, q0)
                src_par = [PrivacyParams(source_qs[l], source_qs[l]) for l in src]
                released_t = randomized_response(dataset.layers[t], target_par, layer_rng(rs, 2, 0))
                released_s = [randomized_response(dataset.layers[l], p, layer_rng(rs, 2, i + 1))
                              for i, (l, p) in enumerate(zip(src, src_par))]
                full_labels = np.zeros(dataset.n, dtype=int)
                full_labels[idx] = codes
                scen = Scenario(released_t, released_s, full_labels, [], target_par, src_par, k,
                                released=True, seed=rs)
                results = evaluate_methods(scen, methods, rs, truth_labels=codes, eval_nodes=idx,
                                           pipeline=pipeline)
                for m, (_, mc, lam, sec) in results.items():
                    records.append(RealRecord(METHODS[m], dataset.names[t], float(q0), rep, rs, mc, lam, sec))
    if out_path is not None:
        path = Path(out_path)
        path = path if path.suffix == ".csv" else path / "realdata.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REAL_FIELDS)
            for r in records:
                w.writerow([r.method, r.target, repr(r.q0), r.rep, r.seed, _fmt(r.misclass),
                            _fmt(r.lambda_selected), _fmt(r.seconds) if record_time else ""])
    return records


def read_realdata(path) -> list:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        RealRecord(r["method"], r["target"], float(r["q0"]), int(r["rep"]), int(r["seed"]),
                   _num(r["misclass"]), _num(r["lambda"]), _num(r["seconds"]))
        for r in rows
    ]
