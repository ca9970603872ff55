"""
One-shot summaries instead of raw networks
==========================================

Each source site reduces its released network to a small binary frame: its
top-K eigenspace, a density estimate and its public privacy parameters.
The coordinator never sees a source adjacency matrix.  It reads the frames,
weights and aligns the eigenspaces against the target, and clusters.
"""
import tempfile
from pathlib import Path

import numpy as np

from transnet.federation import decode, local_site_compute, read_summary, write_summary
from transnet.harness.metrics import misclassification_rate
from transnet.netgen import ExperimentConfig, build_scenario
from transnet.pipeline import PipelineConfig, transnet_from_summaries
from transnet.privacy import debias
from transnet.spectral import top_k_eigvecs

scenario = build_scenario(ExperimentConfig.design(3, 1, L=8), seed=7).release()
k = scenario.k
inbox = Path(tempfile.mkdtemp(prefix="tns_"))

# --- at each site -------------------------------------------------------
for l, (net, params) in enumerate(zip(scenario.sources, scenario.source_params), start=1):
    path = write_summary(local_site_compute(net, params, k, l=l), inbox)
    print("site %d sent %s (%d bytes; the adjacency would be %d entries)"
          % (l, path.name, path.stat().st_size, net.n * net.n))

# --- at the coordinator ---------------------------------------------------
summaries = [read_summary(p) for p in sorted(inbox.glob("summary_*.tns"))]
assert all(decode(p.read_bytes()) == s for p, s in zip(sorted(inbox.glob("*.tns")), summaries))

target = debias(scenario.target, scenario.target_params)
result = transnet_from_summaries(target, top_k_eigvecs(target.mat, k), summaries, PipelineConfig(k=k, seed=0))

print("weights   ", np.round(result.weights, 3))
print("E_theta   ", np.round(result.diagnostics["e_theta_hat"], 3))
print("lambda    ", result.lambda_selected)
print("misclassification %.3f" % misclassification_rate(result.labels, scenario.target_labels, k))
