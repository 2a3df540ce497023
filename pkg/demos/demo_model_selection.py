"""
Choosing the number of clusters
===============================

The two sub-indices pull in opposite directions as K grows: the ambiguous
index rises once clusters start overlapping, while the similarity index
slowly falls.  Their mixture bottoms out at the right K.
"""

import numpy as np

from kdeval import KdiParams, adjusted_rand_index, canonicalize, kdi_index, kmeans
from kdeval.data_io import Dataset

rng = np.random.default_rng(5)
centers = [(0, 0), (12, 0), (0, 12), (12, 12)]
sigmas = [0.4, 0.55, 0.7, 0.85]
points = np.concatenate(
    [np.asarray(c) + s * rng.standard_normal((100, 2)) for c, s in zip(centers, sigmas)]
)
data = Dataset(points, reference_labels=[i for i in range(4) for _ in range(100)], id="four-blobs")
reference = canonicalize(data.reference_labels)

params = KdiParams(seed=7)
print(" K    I_a     I_s     I      ARI")
best = None
for k in range(2, 11):
    partition = kmeans(data, k, seed=11)
    score = kdi_index(data, partition, params)
    ari = adjusted_rand_index(partition, reference)
    marker = ""
    if best is None or score.I < best[0]:
        best = (score.I, k)
        marker = "  <- best so far"
    print(f"{k:2d}  {score.I_a:.4f}  {score.I_s:.4f}  {score.I:.4f}  {ari:.3f}{marker}")

print(f"\nselected K = {best[1]} (smallest mixed index)")
