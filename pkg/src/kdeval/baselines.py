"""Classical internal validity indices (Calinski-Harabasz, Silhouette,
Davies-Bouldin) and the external Adjusted Rand Index.

Each internal index carries its direction: CH and SC are higher-is-better,
DB is smaller-is-better.  Degenerate inputs (zero within-dispersion,
coincident centroids) raise UndefinedScoreError so the harness can rank the
candidate last instead of aborting a run.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

HIGHER_BETTER = "higher_better"
SMALLER_BETTER = "smaller_better"

DIRECTIONS = {
    "ch": HIGHER_BETTER,
    "sc": HIGHER_BETTER,
    "db": SMALLER_BETTER,
    "new": SMALLER_BETTER,
}


class UndefinedScoreError(ValueError):
    """The index is undefined for this partition (degenerate denominator)."""


@dataclass(frozen=True)
class IndexScore:
    name: str
    value: float
    direction: str


def _check_inputs(data, partition):
    X = data.points
    labels = partition.labels
    if labels.shape[0] != X.shape[0]:
        raise ValueError("partition length does not match dataset size")
    return X, labels, partition.K


def _cluster_members(X, labels, K):
    return [X[labels == q] for q in range(K)]


def calinski_harabasz(data, partition):
    """Between/within dispersion ratio scaled by (n - K)/(K - 1)."""
    X, labels, K = _check_inputs(data, partition)
    n = X.shape[0]
    if K < 2 or K > n - 1:
        raise UndefinedScoreError(f"CH needs 2 <= K <= n-1, got K={K}, n={n}")
    global_center = X.mean(axis=0)
    tr_w = 0.0
    tr_b = 0.0
    for members in _cluster_members(X, labels, K):
        center = members.mean(axis=0)
        tr_w += float(((members - center) ** 2).sum())
        tr_b += members.shape[0] * float(((center - global_center) ** 2).sum())
    if tr_w == 0.0:
        raise UndefinedScoreError("CH undefined: zero within-cluster dispersion")
    value = (tr_b / tr_w) * ((n - K) / (K - 1))
    return IndexScore("ch", value, HIGHER_BETTER)


def silhouette(data, partition):
    """Mean per-sample silhouette (b - a) / max(a, b).

    a is the mean distance to the sample's own cluster (excluding itself), b
    the smallest mean distance to another cluster.  Samples in singleton
    clusters contribute 0, as do samples with a = b = 0.
    """
    X, labels, K = _check_inputs(data, partition)
    n = X.shape[0]
    if K < 2 or K > n - 1:
        raise UndefinedScoreError(f"silhouette needs 2 <= K <= n-1, got K={K}, n={n}")
    dist = cdist(X, X)
    sizes = np.bincount(labels, minlength=K)
    # mean distance from each sample to each cluster
    cluster_sums = np.zeros((n, K))
    for q in range(K):
        cluster_sums[:, q] = dist[:, labels == q].sum(axis=1)
    s_values = np.zeros(n)
    for i in range(n):
        q = labels[i]
        if sizes[q] == 1:
            continue
        a = cluster_sums[i, q] / (sizes[q] - 1)
        b = np.inf
        for r in range(K):
            if r == q:
                continue
            b = min(b, cluster_sums[i, r] / sizes[r])
        denom = max(a, b)
        s_values[i] = (b - a) / denom if denom > 0 else 0.0
    return IndexScore("sc", float(s_values.mean()), HIGHER_BETTER)


def davies_bouldin(data, partition):
    """Mean over clusters of the worst (sigma_i + sigma_j) / d(c_i, c_j)."""
    X, labels, K = _check_inputs(data, partition)
    if K < 2:
        raise UndefinedScoreError(f"DB needs K >= 2, got K={K}")
    centroids = np.array([members.mean(axis=0) for members in _cluster_members(X, labels, K)])
    sigma = np.array(
        [
            float(np.linalg.norm(members - centroids[q], axis=1).mean())
            for q, members in enumerate(_cluster_members(X, labels, K))
        ]
    )
    centroid_dist = cdist(centroids, centroids)
    off_diag = centroid_dist[~np.eye(K, dtype=bool)]
    if np.any(off_diag == 0.0):
        raise UndefinedScoreError("DB undefined: coincident centroids")
    total = 0.0
    for i in range(K):
        ratios = [(sigma[i] + sigma[j]) / centroid_dist[i, j] for j in range(K) if j != i]
        total += max(ratios)
    return IndexScore("db", float(total / K), SMALLER_BETTER)


def adjusted_rand_index(p, q):
    """Contingency-table ARI between two partitions of the same points.

    Symmetric, relabel-invariant, and 1.0 exactly when the groupings agree.
    """
    a = np.asarray(p.labels if hasattr(p, "labels") else p, dtype=np.int64)
    b = np.asarray(q.labels if hasattr(q, "labels") else q, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError(f"partition lengths differ: {a.shape} vs {b.shape}")
    n = a.shape[0]
    ka = int(a.max()) + 1
    kb = int(b.max()) + 1
    table = np.zeros((ka, kb), dtype=np.int64)
    np.add.at(table, (a, b), 1)

    def pairs(x):
        return x * (x - 1) // 2

    sum_ij = int(pairs(table).sum())
    sum_a = int(pairs(table.sum(axis=1)).sum())
    sum_b = int(pairs(table.sum(axis=0)).sum())
    total = int(pairs(np.int64(n)))
    if total == 0:
        return 1.0
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        # both partitions trivial (all singletons or a single cluster): identical groupings
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))
