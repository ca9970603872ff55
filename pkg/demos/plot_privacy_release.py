"""
Releasing a network under edge randomized response
==================================================

A data owner flips each edge indicator before sharing the network.  The
receiver undoes the bias on average with an affine correction.  This script
shows both steps on a small two-block network and converts the flip
probability into an edge-privacy budget.
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from transnet.netgen import SbmSpec, balanced_labels, generate_sbm
from transnet.privacy import PrivacyParams, debias, epsilon_to_q, q_to_epsilon, randomized_response

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

# a 60-node network with two assortative blocks
spec = SbmSpec.from_labels(balanced_labels(60, 2), [[0.4, 0.05], [0.05, 0.4]])
a = generate_sbm(spec, seed=1)
print("true density          %.4f" % a.density())

# keep each edge with probability q, each non-edge with probability q'
params = PrivacyParams(0.8, 0.8)
released = randomized_response(a, params, seed=2)
print("released density      %.4f" % released.density())

# the correction (A~ - (1 - q')) / (q + q' - 1) is unbiased for A
a_hat = debias(released, params)
off = ~np.eye(60, dtype=bool)
print("debiased mean entry   %.4f" % a_hat.mat[off].mean())

# averaging many independent releases recovers A entry by entry
draws = np.mean([debias(randomized_response(a, params, seed=s), params).mat for s in range(400)], axis=0)
print("max |mean - A| over 400 releases  %.3f" % np.abs(draws - a.adj)[off].max())

# q and the edge-DP budget are two views of the same knob
for eps in (0.5, 1.0, np.log(19), 5.0):
    q = epsilon_to_q(eps).q
    print("epsilon %.3f  ->  q = q' = %.4f  ->  epsilon %.3f" % (eps, q, q_to_epsilon(PrivacyParams(q, q))))

fig, axes = plt.subplots(1, 3, figsize=(9, 3))
for ax, mat, title in zip(axes, (a.adj, released.adj, draws), ("original", "released (q=0.8)", "mean of 400 debiased")):
    ax.imshow(mat, cmap="Greys", vmin=0, vmax=1)
    ax.set_title(title, fontsize=9)
    ax.set_xticks([])
    ax.set_yticks([])
fig.tight_layout()
fig.savefig(out / "privacy_release.png", dpi=120)
print("wrote", out / "privacy_release.png")
