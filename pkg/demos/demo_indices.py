"""
Scoring one partition with every index
======================================

Classical internal indices (CH higher-better, SC higher-better, DB
smaller-better), the external adjusted Rand index, and the density-based
index with its sub-indices.
"""

import numpy as np

from kdeval import (
    KdiParams,
    adjusted_rand_index,
    calinski_harabasz,
    canonicalize,
    davies_bouldin,
    kdi_index,
    kmeans,
    make_blobs,
    silhouette,
)

data = make_blobs(3, 60, [(0, 0), (9, 0), (0, 9)], sigma=0.8, seed=4)
reference = canonicalize(data.reference_labels, source="reference")

for k in (2, 3, 5):
    partition = kmeans(data, k, seed=1)
    ch = calinski_harabasz(data, partition)
    sc = silhouette(data, partition)
    db = davies_bouldin(data, partition)
    score = kdi_index(data, partition, KdiParams(seed=0))
    ari = adjusted_rand_index(partition, reference)
    print(
        f"K={k}: CH={ch.value:8.1f}  SC={sc.value:.3f}  DB={db.value:.3f}  "
        f"I={score.I:.3f} (Ia={score.I_a:.3f}, Is={score.I_s:.3f}, Ib={score.I_b:.3f})  "
        f"ARI={ari:.3f}"
    )

print()
print("directions: CH/SC higher is better; DB and I smaller is better")
