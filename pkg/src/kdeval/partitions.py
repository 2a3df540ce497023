"""Candidate partition generation and canonicalization.

Generators: Lloyd k-means with k-means++ seeding, full-covariance Gaussian
mixture EM, and agglomerative clustering cut at k for the four standard
linkages.  All partitions are canonicalized (cluster ids renumbered by first
occurrence) so equality up to relabeling is a plain array comparison.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import cdist

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 300
EM_MAX_ITER = 200
EM_TOL = 1e-6
EM_REG = 1e-6
EM_MAX_RESTARTS = 5
GMM_INITS = 4  # one k-means init plus random-mean inits, best log-likelihood kept

LINKAGES = ("ward", "complete", "average", "single")
GENERATORS = ("kmeans", "gmm", "agg-ward", "agg-complete", "agg-average", "agg-single")


@dataclass(frozen=True, eq=False)
class Partition:
    """Canonical cluster assignment: labels in 0..K-1, first-occurrence order."""

    labels: np.ndarray
    K: int
    source: str = ""

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.labels.shape[0]

    def key(self):
        """Bytes key for equality-up-to-relabeling (labels are canonical)."""
        return self.labels.tobytes()

    def same_grouping(self, other):
        return self.key() == other.key()


def canonicalize(labels, source=""):
    """Renumber raw labels by first occurrence and wrap them in a Partition."""
    raw = np.asarray(labels).ravel()
    if raw.shape[0] == 0:
        raise ValueError("cannot canonicalize an empty label sequence")
    mapping = {}
    out = np.empty(raw.shape[0], dtype=np.int64)
    for i, value in enumerate(raw.tolist()):
        if value not in mapping:
            mapping[value] = len(mapping)
        out[i] = mapping[value]
    return Partition(labels=out, K=len(mapping), source=source)


def _derive_seed(*parts):
    """Stable sub-seed from integer components."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


def _kpp_init(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)
        centers[j] = X[idx]
        closest = np.minimum(closest, ((X - centers[j]) ** 2).sum(axis=1))
    return centers


def _lloyd(X, centers):
    n, k = X.shape[0], centers.shape[0]
    labels = None
    for _ in range(KMEANS_MAX_ITER):
        sq = cdist(X, centers, "sqeuclidean")
        new_labels = sq.argmin(axis=1)
        counts = np.bincount(new_labels, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            # reseed each empty cluster at the point farthest from its center
            own = sq[np.arange(n), new_labels]
            order = np.argsort(-own)
            for rank, e in enumerate(empties):
                centers[e] = X[order[rank]]
            sq = cdist(X, centers, "sqeuclidean")
            new_labels = sq.argmin(axis=1)
            counts = np.bincount(new_labels, minlength=k)
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        for j in np.flatnonzero(counts > 0):
            centers[j] = X[labels == j].mean(axis=0)
    wcss = float(cdist(X, centers, "sqeuclidean")[np.arange(n), labels].sum())
    return labels, wcss


def kmeans(data, k, seed):
    """Lloyd's algorithm, k-means++ seeding, best of KMEANS_RESTARTS by WCSS.

    Degenerate data (fewer distinct points than k) yields fewer non-empty
    clusters after repair; canonicalization then reports the actual K.
    """
    X = data.points
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k must be in 1..n={X.shape[0]}, got {k}")
    rng = np.random.default_rng(seed)
    best_labels, best_wcss = None, np.inf
    for _ in range(KMEANS_RESTARTS):
        centers = _kpp_init(X, k, rng)
        labels, wcss = _lloyd(X, centers.copy())
        if wcss < best_wcss:
            best_labels, best_wcss = labels, wcss
    return canonicalize(best_labels, source=f"kmeans-k{k}")


def _log_gaussians(X, means, chols):
    """Component-wise multivariate normal log-densities from Cholesky factors."""
    n, d = X.shape
    k = means.shape[0]
    out = np.empty((n, k))
    for j in range(k):
        diff = X - means[j]
        solved = np.linalg.solve(chols[j], diff.T)
        maha = (solved**2).sum(axis=0)
        logdet = 2.0 * np.log(np.diag(chols[j])).sum()
        out[:, j] = -0.5 * (maha + logdet + d * np.log(2.0 * np.pi))
    return out


def _em_init(X, k, seed, kind):
    n, d = X.shape
    rng = np.random.default_rng(_derive_seed(seed, 1))
    means = np.empty((k, d))
    covs = np.empty((k, d, d))
    weights = np.full(k, 1.0 / k)
    if kind == "kmeans":
        init = kmeans(_PointsView(X), k, seed)
        for j in range(k):
            members = X[init.labels == j] if j < init.K else X[rng.integers(n)].reshape(1, -1)
            means[j] = members.mean(axis=0)
            diff = members - means[j]
            covs[j] = diff.T @ diff / members.shape[0] + EM_REG * np.eye(d)
            weights[j] = max(members.shape[0] / n, 1.0 / n)
        weights /= weights.sum()
    else:
        idx = rng.choice(n, size=k, replace=False)
        means[:] = X[idx]
        centered = X - X.mean(axis=0)
        base = centered.T @ centered / n + EM_REG * np.eye(d)
        covs[:] = base
    return means, covs, weights


def _em_once(X, k, seed, init_kind="kmeans"):
    means, covs, weights = _em_init(X, k, seed, init_kind)
    prev_ll = -np.inf
    resp = None
    ll = -np.inf
    for _ in range(EM_MAX_ITER):
        chols = np.linalg.cholesky(covs)
        log_prob = _log_gaussians(X, means, chols) + np.log(weights)
        norm = _logsumexp_rows(log_prob)
        ll = float(norm.sum())
        resp = np.exp(log_prob - norm[:, None])
        if ll - prev_ll < EM_TOL and np.isfinite(prev_ll):
            break
        prev_ll = ll
        nk = resp.sum(axis=0)
        for j in range(k):
            if nk[j] < 1e-12:
                continue  # dead component keeps its parameters
            means[j] = resp[:, j] @ X / nk[j]
            diff = X - means[j]
            covs[j] = (resp[:, j][:, None] * diff).T @ diff / nk[j] + EM_REG * np.eye(X.shape[1])
        weights = np.maximum(nk, 1e-12)
        weights /= weights.sum()
    return resp.argmax(axis=1), ll


def _logsumexp_rows(a):
    m = a.max(axis=1)
    return m + np.log(np.exp(a - m[:, None]).sum(axis=1))


class _PointsView:
    """Minimal Dataset stand-in so generators can share a raw array."""

    def __init__(self, points):
        self.points = points


def gmm_em(data, k, seed):
    """Full-covariance EM with hard assignment by maximum responsibility.

    Runs GMM_INITS initializations (k-means first, then random means) and
    keeps the solution with the best final log-likelihood.  Covariances are
    regularized by EM_REG * I; a singular covariance despite regularization
    triggers a reseeded retry, up to EM_MAX_RESTARTS extra attempts.
    """
    X = data.points
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k must be in 1..n={X.shape[0]}, got {k}")
    results = []
    last_error = None
    attempt = 0
    done = 0
    while done < GMM_INITS and attempt < GMM_INITS + EM_MAX_RESTARTS:
        kind = "kmeans" if done == 0 else "random"
        try:
            labels, ll = _em_once(X, k, _derive_seed(seed, attempt), init_kind=kind)
            results.append((ll, done, labels))
            done += 1
        except np.linalg.LinAlgError as exc:
            last_error = exc
        attempt += 1
    if not results:
        raise RuntimeError(f"EM failed after {attempt} attempts: {last_error}")
    results.sort(key=lambda t: (-t[0], t[1]))
    return canonicalize(results[0][2], source=f"gmm-k{k}")


def _linkage_tree(data, method):
    if method not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}, got {method!r}")
    return linkage(data.points, method=method)


def agglomerative(data, k, linkage_method):
    """Bottom-up merging (Lance-Williams distances) cut at k clusters."""
    X = data.points
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k must be in 1..n={X.shape[0]}, got {k}")
    if k == X.shape[0]:
        return canonicalize(np.arange(X.shape[0]), source=f"agg-{linkage_method}-k{k}")
    tree = _linkage_tree(data, linkage_method)
    labels = fcluster(tree, t=k, criterion="maxclust")
    return canonicalize(labels, source=f"agg-{linkage_method}-k{k}")


def build_candidates(data, k_range, seed, generators=GENERATORS):
    """Run every generator for every k, canonicalize, deduplicate, and append
    the reference partition when the dataset carries one.

    Duplicate groupings keep the first candidate; its source tag accumulates
    the tags of the duplicates it absorbed.  A generator failure at one k is
    recorded as a warning and skipped.  Order is (k, generator order) with
    the reference last, and the result is deterministic given the seed.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("k_range is empty")
    if ks[0] < 1 or ks[-1] > data.n:
        raise ValueError(f"k_range must lie within 1..n={data.n}")
    trees = {}
    for method in LINKAGES:
        if f"agg-{method}" not in generators:
            continue
        try:
            trees[method] = _linkage_tree(data, method)
        except Exception as exc:  # pragma: no cover - scipy failures are exotic
            warnings.warn(f"linkage {method} failed: {exc}")
    seen = {}
    ordered = []
    for k in ks:
        for gi, gen in enumerate(GENERATORS):
            if gen not in generators:
                continue
            cell_seed = _derive_seed(seed, k, gi)
            try:
                if gen == "kmeans":
                    part = kmeans(data, k, cell_seed)
                elif gen == "gmm":
                    part = gmm_em(data, k, cell_seed)
                else:
                    method = gen.split("-", 1)[1]
                    if method not in trees:
                        continue
                    if k == data.n:
                        labels = np.arange(data.n)
                    else:
                        labels = fcluster(trees[method], t=k, criterion="maxclust")
                    part = canonicalize(labels, source=f"{gen}-k{k}")
            except Exception as exc:
                warnings.warn(f"generator {gen} failed for k={k}: {exc}")
                continue
            key = part.key()
            if key in seen:
                pos = seen[key]
                kept = ordered[pos]
                ordered[pos] = Partition(kept.labels, kept.K, kept.source + "+" + part.source)
            else:
                seen[key] = len(ordered)
                ordered.append(part)
    if data.reference_labels is not None:
        ref = canonicalize(data.reference_labels, source="reference")
        key = ref.key()
        if key in seen:
            pos = seen[key]
            kept = ordered[pos]
            ordered[pos] = Partition(kept.labels, kept.K, kept.source + "+reference")
        else:
            ordered.append(ref)
    return ordered


def save_partitions(directory, partitions):
    """Write each partition as one label per line plus a manifest.csv with
    (file, source, k) rows."""
    import os

    os.makedirs(directory, exist_ok=True)
    rows = []
    for i, part in enumerate(partitions):
        fname = f"partition_{i:03d}.txt"
        with open(os.path.join(directory, fname), "w", encoding="utf-8") as fh:
            for label in part.labels:
                fh.write(f"{int(label)}\n")
        rows.append((fname, part.source, part.K))
    with open(os.path.join(directory, "manifest.csv"), "w", encoding="utf-8") as fh:
        fh.write("file,source,k\n")
        for fname, source, k in rows:
            fh.write(f"{fname},{source},{k}\n")


def load_partitions(directory):
    """Read a partition directory written by save_partitions (or any directory
    of one-label-per-line text files; sources then default to the file name)."""
    import os

    manifest = os.path.join(directory, "manifest.csv")
    out = []
    if os.path.exists(manifest):
        with open(manifest, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        for line in lines[1:]:
            fname, source, _k = line.split(",", 2)
            labels = np.loadtxt(os.path.join(directory, fname), dtype=np.int64, ndmin=1)
            out.append(canonicalize(labels, source=source))
    else:
        for fname in sorted(os.listdir(directory)):
            if not fname.endswith(".txt"):
                continue
            labels = np.loadtxt(os.path.join(directory, fname), dtype=np.int64, ndmin=1)
            out.append(canonicalize(labels, source=fname.rsplit(".", 1)[0]))
    if not out:
        raise ValueError(f"no partitions found in {directory}")
    return out
