"""
How far to lean on the sources
==============================

The regularised eigenspace interpolates between the target's own
eigenspace (lambda = 0) and the source aggregate (lambda large).  This
script traces that path and shows the hold-out scores used to pick lambda.
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from transnet.netgen import ExperimentConfig, build_scenario
from transnet.pipeline import DEFAULT_GRID, PipelineConfig, cv_lambda_scores, prepare, regularize, step1_aggregate
from transnet.spectral import membership_eigenspace, projection_distance

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

for case in (1, 3):
    scen = build_scenario(ExperimentConfig.design(1, case, L=16), seed=3).release()
    prep = prepare(scen, PipelineConfig())
    ubar, w, _ = step1_aggregate(prep.summaries, prep.target_space)
    truth = membership_eigenspace(scen.target_labels, 3)

    lams = np.logspace(-3, 3, 40)
    path = [regularize(prep.target_space, ubar, lam) for lam in lams]
    to_truth = [projection_distance(v, truth) for v in path]
    scores = cv_lambda_scores(prep.target, ubar, 3, DEFAULT_GRID, seed=0)
    best = DEFAULT_GRID[int(np.argmin(scores))]
    print("case %d: dist(U0, truth) %.3f, dist(Ubar, truth) %.3f, CV picks lambda = %g"
          % (case, projection_distance(prep.target_space, truth), projection_distance(ubar, truth), best))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    ax1.semilogx(lams, to_truth, color="tab:red")
    ax1.axhline(projection_distance(ubar, truth), ls="--", color="tab:green", label="source aggregate")
    ax1.axhline(projection_distance(prep.target_space, truth), ls=":", color="tab:gray", label="target only")
    ax1.set_xlabel("lambda")
    ax1.set_ylabel("distance to true eigenspace")
    ax1.legend(fontsize=8)
    ax2.plot(range(len(DEFAULT_GRID)), scores, marker="o")
    ax2.set_xticks(range(len(DEFAULT_GRID)), [str(g) for g in DEFAULT_GRID], fontsize=7)
    ax2.set_xlabel("lambda grid")
    ax2.set_ylabel("hold-out score")
    fig.suptitle("Experiment I, Case %d" % case, fontsize=10)
    fig.tight_layout()
    fig.savefig(out / ("regularization_case%d.png" % case), dpi=120)
