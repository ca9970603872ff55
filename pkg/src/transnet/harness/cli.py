"""Command line entry point: ``transnet <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path


from ..federation import decode, encode, local_site_compute, read_summary, summary_filename, to_csv
from ..netgen import ExperimentConfig, build_scenario
from ..pipeline import PipelineConfig, transnet_from_summaries
from ..privacy import DebiasedNetwork, PrivacyParams, debias
from ..spectral import top_k_eigvecs
from .experiments import DEFAULT_L, run_experiment, run_realdata
from .io import edges_to_network, load_multilayer, read_edges, write_labels, write_scenario
from .plots import emit_plots

log = logging.getLogger("transnet")

WEIGHTING_ALIASES = {
    "equal": "equal",
    "adaptive": "adaptive_practical",
    "adaptive_practical": "adaptive_practical",
    "adaptive_theoretical": "adaptive_theoretical",
}


def parse_range(text: str) -> list:
    """``"0.7:0.95:0.05"`` (inclusive) or ``"0.7,0.8"``."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(v) for v in text.split(",") if v.strip()]


def _floats(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def _files(text_or_list) -> list:
    if isinstance(text_or_list, str):
        return [Path(p) for p in text_or_list.split(",") if p.strip()]
    out = []
    for item in text_or_list:
        out.extend(_files(item))
    return out


def _lambda(text: str):
    return "cv" if text == "cv" else float(text)


def cmd_simulate(args) -> int:
    base = ExperimentConfig.design(args.experiment, args.case)
    if args.config:
        base = ExperimentConfig.from_keyvalue(Path(args.config).read_text(), base)
    overrides = {}
    if args.reps is not None:
        overrides["reps"] = args.reps
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.n is not None:
        overrides["n"] = args.n
    cfg = ExperimentConfig(**{**base.__dict__, **overrides})
    l_values = [int(v) for v in args.L.split(",")] if args.L else list(DEFAULT_L)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    case = f"{args.experiment}.{args.case}"
    t0 = time.perf_counter()
    records = run_experiment(cfg, args.methods, out, l_values=l_values, case=case,
                             workers=args.workers, record_time=args.timing)
    (out / "config.txt").write_text(cfg.to_keyvalue())
    if not args.no_plots:
        emit_plots(records, out)
    log.info("simulate: %d records in %.1fs -> %s", len(records), time.perf_counter() - t0, out)
    return 0


def cmd_realdata(args) -> int:
    layers = _files(args.layers)
    data = load_multilayer(layers, args.labels, n=args.n)
    qs = _floats(args.qs) if args.qs else None
    if qs is not None and len(qs) == 1:
        qs = qs * len(layers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = run_realdata(data, args.target, parse_range(args.q0), qs, k=args.k, seed=args.seed,
                           reps=args.reps, out_path=out, methods=args.methods, record_time=args.timing)
    if not args.no_plots:
        emit_plots(records, out, x="q0", metrics=("misclass",), group="target")
    return 0


def cmd_run(args) -> int:
    target_pairs = read_edges(args.target)
    if args.summaries:
        summaries = [read_summary(p) for p in _files(args.summaries)]
    else:
        summaries = []
    source_files = _files(args.sources) if args.sources else []
    n = args.n
    if n is None:
        if summaries:
            n = summaries[0].n
        else:
            n = int(max([target_pairs.max(initial=-1)] + [read_edges(f).max(initial=-1) for f in source_files])) + 1
    qs = _floats(args.qs) if args.qs else []
    if source_files:
        if len(qs) == 1:
            qs = qs * len(source_files)
        if len(qs) != len(source_files):
            raise SystemExit(f"--qs needs one value per source ({len(source_files)}), got {len(qs)}")
    k = args.k
    for l, (f, q) in enumerate(zip(source_files, qs), start=len(summaries) + 1):
        net = edges_to_network(read_edges(f), n, source=str(f))
        summaries.append(local_site_compute(net, PrivacyParams(q, q), k, not args.no_debias, l=l))
    target_params = PrivacyParams(args.q0, args.q0)
    target_net = edges_to_network(target_pairs, n, source=str(args.target))
    if args.no_debias:
        target = DebiasedNetwork(target_net.adj.astype(float), target_params)
    else:
        target = debias(target_net, target_params)
    config = PipelineConfig(k=k, weighting=WEIGHTING_ALIASES[args.weighting], lam=_lambda(args.lam),
                            debias=not args.no_debias, seed=args.seed)
    res = transnet_from_summaries(target, top_k_eigvecs(target.mat, k), summaries, config)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_labels(res.labels, out / "labels.txt")
        with (out / "result.csv").open("w") as fh:
            fh.write("lambda," + ",".join(f"w_{s.l}" for s in summaries) + "\n")
            fh.write(repr(res.lambda_selected) + "".join("," + repr(float(w)) for w in res.weights) + "\n")
        (out / "diagnostics.log").write_text(
            "".join(f"{k}: {json.dumps(v, default=float)}\n" for k, v in res.diagnostics.items()))
    else:
        sys.stdout.write("".join(f"{int(v)}\n" for v in res.labels))
    return 0


def cmd_summary_encode(args) -> int:
    pairs = read_edges(args.network)
    n = args.n if args.n is not None else int(pairs.max(initial=-1)) + 1
    net = edges_to_network(pairs, n, source=str(args.network))
    qp = args.q if args.q_prime is None else args.q_prime
    summary = local_site_compute(net, PrivacyParams(args.q, qp), args.k, not args.no_debias, l=args.l)
    out = Path(args.out) if args.out else Path(".")
    path = out / summary_filename(args.l) if out.is_dir() or not out.suffix else out
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode(summary))
    print(path)
    return 0


def cmd_summary_decode(args) -> int:
    s = decode(Path(args.file).read_bytes())
    if args.csv:
        sys.stdout.write(to_csv(s))
    else:
        print(f"l={s.l} n={s.n} k={s.k} q={s.params.q!r} q_prime={s.params.q_prime!r} "
              f"rho_hat={s.rho_hat!r} version={s.format_version}")
    return 0


def cmd_scenario(args) -> int:
    cfg = ExperimentConfig.design(args.experiment, args.case, L=args.L, seed=args.seed)
    scen = build_scenario(cfg, args.seed)
    if args.released:
        scen = scen.release()
    write_scenario(scen, args.out)
    print(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transnet", description="Transfer learning of network communities.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a simulation design and write metrics.csv and plots")
    s.add_argument("--experiment", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--case", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--reps", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--L", help="comma-separated source counts (default 8,12,16,20,24)")
    s.add_argument("--methods", default="adaw,ew,dsc,ssc")
    s.add_argument("--config", help="key=value file overriding the design")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--timing", action="store_true", help="fill the seconds column")
    s.add_argument("--no-plots", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("realdata", help="perturb-and-cluster protocol on multilayer edge lists")
    r.add_argument("--layers", required=True, help="comma-separated edge-list files")
    r.add_argument("--labels", required=True)
    r.add_argument("--target", type=int, help="target layer index (default: every layer in turn)")
    r.add_argument("--q0", default="0.7:0.95:0.05")
    r.add_argument("--qs", help="comma-separated source q per layer, or one value for all")
    r.add_argument("--k", type=int)
    r.add_argument("--n", type=int)
    r.add_argument("--reps", type=int, default=10)
    r.add_argument("--seed", type=int, default=42)
    r.add_argument("--methods", default="adaw,ew,dsc,ssc")
    r.add_argument("--timing", action="store_true")
    r.add_argument("--no-plots", action="store_true")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_realdata)

    u = sub.add_parser("run", help="cluster a released target with released sources or summaries")
    u.add_argument("--target", required=True)
    u.add_argument("--sources", nargs="*", default=[])
    u.add_argument("--summaries", nargs="*", default=[])
    u.add_argument("--q0", type=float, required=True)
    u.add_argument("--qs", help="comma-separated q for each source file")
    u.add_argument("--k", type=int, required=True)
    u.add_argument("--n", type=int)
    u.add_argument("--lambda", dest="lam", default="cv")
    u.add_argument("--weighting", choices=sorted(WEIGHTING_ALIASES), default="adaptive")
    u.add_argument("--no-debias", action="store_true")
    u.add_argument("--seed", type=int, default=42)
    u.add_argument("--out")
    u.set_defaults(func=cmd_run)

    e = sub.add_parser("summary-encode", help="compute a source summary and write a .tns frame")
    e.add_argument("--network", required=True)
    e.add_argument("--q", type=float, required=True)
    e.add_argument("--q-prime", type=float)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--l", type=int, required=True)
    e.add_argument("--n", type=int)
    e.add_argument("--no-debias", action="store_true")
    e.add_argument("--out")
    e.set_defaults(func=cmd_summary_encode)

    d = sub.add_parser("summary-decode", help="print a .tns frame")
    d.add_argument("file")
    d.add_argument("--csv", action="store_true")
    d.set_defaults(func=cmd_summary_decode)

    c = sub.add_parser("scenario", help="export a simulated scenario as edge lists")
    c.add_argument("--experiment", type=int, choices=(1, 2, 3), default=1)
    c.add_argument("--case", type=int, choices=(1, 2, 3), default=1)
    c.add_argument("--L", type=int, default=8)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--released", action="store_true")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
