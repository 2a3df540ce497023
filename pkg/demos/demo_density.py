"""
Per-cluster density estimation
==============================

Fit a Gaussian KDE, evaluate it in log space, and pick a bandwidth by
cross-validated grid search.
"""

import numpy as np

from kdeval import BandwidthSearchSpec, fallback_bandwidth, fit_kde, log_density, select_bandwidth

rng = np.random.default_rng(0)

# a 1-D sample from a standard normal
sample = rng.standard_normal(200)

# cross-validated grid search rejects extreme bandwidths
spec = BandwidthSearchSpec(grid=(0.01, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 5.0), folds=5, seed=0)
h = select_bandwidth(sample, spec)
print(f"selected bandwidth: {h}")

model = fit_kde(sample, h)
for x in (0.0, 1.0, 3.0, 30.0):
    # log-sum-exp evaluation stays finite even far from the data
    print(f"log density at {x:5.1f}: {log_density(model, [x]):10.3f}")

# clusters too small for cross-validation use a Scott-style rule
tiny = rng.standard_normal((3, 2))
print(f"fallback bandwidth for a 3-point cluster: {fallback_bandwidth(tiny):.3f}")
print(f"fallback for coincident points: {fallback_bandwidth(np.zeros((4, 2)))}")
