"""Line charts of mean metrics against ``L`` or ``q0``, one series per method."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import summarize, write_summary  # noqa: E402

LABELS = {"proj_dist": "projection distance", "misclass": "misclassification rate"}
STYLE = {
    "TransNet-AdaW": dict(color="tab:red", marker="o"),
    "TransNet-EW": dict(color="tab:blue", marker="s"),
    "Distributed SC": dict(color="tab:green", marker="^"),
    "Single SC": dict(color="tab:gray", marker="x"),
}


def emit_plots(records, out_dir, x: str = "L", metrics=("proj_dist", "misclass"), prefix: str = "",
               group: str = "case") -> list:
    """Write one SVG per ``(case, metric)`` plus the summary CSV behind them."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_name = f"{prefix}summary.csv" if prefix else "summary.csv"
    write_summary(records, out_dir / summary_name, x=x, group=group)
    rows = summarize(records, x, group)
    paths = []
    plt.rcParams["svg.hashsalt"] = "transnet"
    for case in sorted({r[group] for r in rows}):
        for metric in metrics:
            fig, ax = plt.subplots(figsize=(4.5, 3.5))
            plotted = False
            for method in STYLE:
                pts = sorted((r[x], r[f"mean_{metric}"]) for r in rows
                             if r[group] == case and r["method"] == method)
                if not pts or all(v != v for _, v in pts):
                    continue
                xs, ys = zip(*pts)
                ax.plot(xs, ys, label=method, **STYLE[method])
                plotted = True
            if not plotted:
                plt.close(fig)
                continue
            ax.set_xlabel("L" if x == "L" else x)
            ax.set_ylabel(LABELS.get(metric, metric))
            if case:
                ax.set_title(f"{group} {case}")
            ax.legend(fontsize=8)
            fig.tight_layout()
            tag = f"{group}{str(case).replace('.', '_')}_" if case != "" else ""
            stem = f"{prefix}{tag}{metric}.svg"
            path = out_dir / stem
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            paths.append(path)
    return paths
