"""Density-based clustering index: ambiguous, similarity, and boundary
sub-indices plus their published variants.

Each cluster gets its own Gaussian KDE.  The member log-likelihoods define a
closed territory interval; points claimed by two or more territories are
ambiguous.  The similarity side scores how evenly likely a cluster's own
members are.  The main index mixes the two: I = delta*I_a + (1-delta)*I_s,
smaller is better, always in [0, 1].

Cross-cluster reductions use math.fsum so scores are bit-identical under any
relabeling of the clusters.
"""

import math
from dataclasses import dataclass

import numpy as np

from .density import (
    DEFAULT_FOLDS,
    choose_bandwidth,
    fit_kde,
    log_density,
    log_density_many,
)

LIKELIHOOD_FLOOR = 1e-300

AMBIGUOUS_VARIANTS = ("main", "v1", "v2", "v3")
SIMILARITY_VARIANTS = ("main", "v1", "v2", "v3")


@dataclass(frozen=True)
class KdiParams:
    """Hyper-parameters of the index family.

    delta mixes the two sub-indices; alpha1/alpha2 stretch the territory below
    and above the member log-likelihood range (beta1/beta2 replace them when
    the member spread is zero); rho sets the boundary band width.  The v3
    similarity knobs select its center/metric and whether its per-cluster
    distances are min-max scaled (required for a [0,1] value).
    """

    delta: float = 0.5
    alpha1: float = 1.0
    alpha2: float = 1.0
    beta1: float = 1.0
    beta2: float = 1.0
    rho: float = 0.5
    min_cluster_size: int = 3
    ambiguous_variant: str = "main"
    similarity_variant: str = "main"
    mc_samples: int = 20000
    seed: int = 0
    pair_local: bool = True
    boundary_members_only: bool = False
    s_v3_center: str = "mean"
    s_v3_metric: str = "abs"
    s_v3_normalize: bool = True

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")
        for name in ("alpha1", "alpha2", "beta1", "beta2", "rho"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
        if self.ambiguous_variant not in AMBIGUOUS_VARIANTS:
            raise ValueError(f"ambiguous_variant must be one of {AMBIGUOUS_VARIANTS}")
        if self.similarity_variant not in SIMILARITY_VARIANTS:
            raise ValueError(f"similarity_variant must be one of {SIMILARITY_VARIANTS}")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")


@dataclass(frozen=True)
class ClusterDensityProfile:
    """Fitted per-cluster profile: KDE model, member log-likelihoods G_q,
    clamped likelihoods L_q, their spread, and the derived intervals."""

    label: int
    member_indices: np.ndarray
    model: object
    g: np.ndarray
    likelihoods: np.ndarray
    delta_g: float
    territory: tuple
    boundary_band: tuple

    @property
    def n_members(self):
        return self.g.shape[0]


@dataclass(frozen=True)
class KdiScore:
    """Scores for one partition.  I_a and I_s are the selected variants; the
    per_cluster_S / S_omega / ambiguous_count fields always report the main
    definitions regardless of variant."""

    I: float
    I_a: float
    I_s: float
    I_b: float
    ambiguous_count: int
    per_cluster_S: np.ndarray
    S_omega: float


def territory_interval(g_min, g_max, delta_g, alpha1, alpha2, beta1, beta2):
    """Closed territory interval; beta constants replace alpha*spread when the
    member log-likelihoods have zero spread."""
    if delta_g == 0.0:
        return (g_min - beta1, g_max + beta2)
    return (g_min - alpha1 * delta_g, g_max + alpha2 * delta_g)


def fit_profiles(data, partition, params, bw_spec=None):
    """Fit one density profile per cluster.

    Bandwidths come from cross-validated grid search (per-cluster
    scale-relative grid when bw_spec is None), falling back to the Scott-style
    rule for clusters smaller than the fold count.  Deterministic given
    params.seed, and independent of cluster numbering: every cluster uses the
    same seed on its own member set.
    """
    X = data.points
    labels = partition.labels
    if labels.shape[0] != X.shape[0]:
        raise ValueError("partition length does not match dataset size")
    profiles = []
    for q in range(partition.K):
        idx = np.flatnonzero(labels == q)
        pts = X[idx]
        if bw_spec is None:
            h = choose_bandwidth(pts, spec=None, folds=DEFAULT_FOLDS, seed=params.seed)
        else:
            h = choose_bandwidth(pts, spec=bw_spec)
        model = fit_kde(pts, h)
        g = log_density_many(model, pts)
        like = np.maximum(np.exp(g), LIKELIHOOD_FLOOR)
        spread = float(np.std(g))
        g_min = float(g.min())
        g_max = float(g.max())
        profiles.append(
            ClusterDensityProfile(
                label=q,
                member_indices=idx,
                model=model,
                g=g,
                likelihoods=like,
                delta_g=spread,
                territory=territory_interval(
                    g_min, g_max, spread, params.alpha1, params.alpha2, params.beta1, params.beta2
                ),
                boundary_band=(g_min, g_min + params.rho * spread),
            )
        )
    return profiles


def territory_contains(profile, y):
    """True iff the query's log-likelihood under this cluster's estimator lies
    in the (closed) territory interval."""
    value = log_density(profile.model, y)
    lo, hi = profile.territory
    return lo <= value <= hi


def cross_log_density(data, profiles):
    """(n, K) matrix of every point's log-likelihood under every cluster."""
    n = data.points.shape[0]
    out = np.empty((n, len(profiles)))
    for j, profile in enumerate(profiles):
        out[:, j] = log_density_many(profile.model, data.points)
    return out


def _in_territory(log_matrix, profiles):
    out = np.zeros(log_matrix.shape, dtype=bool)
    for j, profile in enumerate(profiles):
        lo, hi = profile.territory
        out[:, j] = (log_matrix[:, j] >= lo) & (log_matrix[:, j] <= hi)
    return out


def ambiguous_flags(log_matrix, intervals):
    """Per-point flags: inside two or more of the given (lo, hi) intervals."""
    hits = np.zeros(log_matrix.shape[0], dtype=np.int64)
    for j, (lo, hi) in enumerate(intervals):
        hits += ((log_matrix[:, j] >= lo) & (log_matrix[:, j] <= hi)).astype(np.int64)
    return hits >= 2


def ambiguous_index(data, profiles, log_matrix=None):
    """Fraction of dataset points lying in at least two territories.

    Returns (I_a, per-point flags).  With a single cluster I_a is 0.
    """
    if not profiles:
        raise ValueError("need at least one profile")
    if log_matrix is None:
        log_matrix = cross_log_density(data, profiles)
    flags = ambiguous_flags(log_matrix, [p.territory for p in profiles])
    return int(flags.sum()) / flags.shape[0], flags


def similarity_index(profiles, n_total, min_cluster_size=3):
    """Main similarity index: I_s = 1 - sum_q S_q / n, where S_q is the sum of
    a cluster's member likelihoods normalized by the cluster maximum, and
    clusters with fewer than min_cluster_size members contribute 0."""
    s_values = []
    for profile in profiles:
        if profile.n_members < min_cluster_size:
            s_values.append(0.0)
            continue
        peak = float(profile.likelihoods.max())
        if peak <= 0.0:  # unreachable with the likelihood floor, kept as a guard
            s_values.append(0.0)
            continue
        s_values.append(float(profile.likelihoods.sum() / peak))
    s_omega = math.fsum(s_values)
    return 1.0 - s_omega / n_total, np.array(s_values)


def boundary_index(data, profiles, rho, log_matrix=None, members_only=False):
    """Boundary index: for each cluster, count points whose log-likelihood
    under that cluster falls in [min(G_q), min(G_q) + rho*spread], then
    average over clusters and dataset size.

    By default the count runs over the whole dataset; members_only restricts
    it to the cluster's own points.
    """
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if log_matrix is None:
        log_matrix = cross_log_density(data, profiles)
    n = log_matrix.shape[0]
    k = len(profiles)
    total = 0
    for j, profile in enumerate(profiles):
        g_min = float(profile.g.min())
        lo, hi = g_min, g_min + rho * profile.delta_g
        column = log_matrix[:, j]
        inside = (column >= lo) & (column <= hi)
        if members_only:
            mask = np.zeros(n, dtype=bool)
            mask[profile.member_indices] = True
            inside = inside & mask
        total += int(inside.sum())
    return total / (k * n)


def pairwise_ambiguous(data, profiles, log_matrix=None, pair_local=True):
    """Symmetric matrix of pairwise ambiguous fractions A_ij.

    A_ij is the fraction of points lying in both territories; with pair_local
    (the default) the fraction is over the members of clusters i and j, else
    over the whole dataset.
    """
    if log_matrix is None:
        log_matrix = cross_log_density(data, profiles)
    in_t = _in_territory(log_matrix, profiles)
    k = len(profiles)
    n = log_matrix.shape[0]
    out = np.zeros((k, k))
    member_masks = []
    for profile in profiles:
        mask = np.zeros(n, dtype=bool)
        mask[profile.member_indices] = True
        member_masks.append(mask)
    for i in range(k):
        for j in range(i + 1, k):
            both = in_t[:, i] & in_t[:, j]
            if pair_local:
                union = member_masks[i] | member_masks[j]
                denom = int(union.sum())
                count = int((both & union).sum())
            else:
                denom = n
                count = int(both.sum())
            value = count / denom if denom else 0.0
            out[i, j] = out[j, i] = value
    return out


def ambiguous_v1(data, profiles, log_matrix=None, pair_local=True):
    """Proportion of cluster pairs whose pairwise ambiguous fraction is positive."""
    k = len(profiles)
    if k < 2:
        return 0.0
    a = pairwise_ambiguous(data, profiles, log_matrix=log_matrix, pair_local=pair_local)
    upper = a[np.triu_indices(k, 1)]
    return int((upper > 0).sum()) / upper.shape[0]


def ambiguous_v2(data, profiles, log_matrix=None, pair_local=True):
    """Mean of the positive pairwise ambiguous fractions; 0 when none are."""
    k = len(profiles)
    if k < 2:
        return 0.0
    a = pairwise_ambiguous(data, profiles, log_matrix=log_matrix, pair_local=pair_local)
    positives = [float(v) for v in a[np.triu_indices(k, 1)] if v > 0]
    if not positives:
        return 0.0
    return math.fsum(positives) / len(positives)


def sampling_box(points, pad_fraction=0.1):
    """Axis-aligned bounding box of the data expanded by pad_fraction per side
    (flat dimensions get a fixed 0.1 pad)."""
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    width = hi - lo
    pad = np.where(width > 0, pad_fraction * width, pad_fraction)
    return lo - pad, hi + pad


def ambiguous_v3(data, profiles, mc_samples, seed):
    """Monte-Carlo territory-area variant: the disputed fraction of the area
    covered by at least one territory, sampled uniformly over the padded
    bounding box of the data."""
    if len(profiles) < 2:
        return 0.0
    lo, hi = sampling_box(data.points)
    rng = np.random.default_rng(seed)
    samples = rng.uniform(lo, hi, size=(int(mc_samples), data.points.shape[1]))
    hits = np.zeros(samples.shape[0], dtype=np.int64)
    for profile in profiles:
        t_lo, t_hi = profile.territory
        values = log_density_many(profile.model, samples)
        hits += ((values >= t_lo) & (values <= t_hi)).astype(np.int64)
    in_any = int((hits >= 1).sum())
    if in_any == 0:
        return 0.0
    return int((hits >= 2).sum()) / in_any


def similarity_v1(profiles, n_total, min_cluster_size=3):
    """Min-max variant: member likelihoods are min-max scaled per cluster
    before summing.  A cluster with all-equal likelihoods scores 1 per member
    (maximally self-similar); small clusters contribute 0."""
    s_values = []
    for profile in profiles:
        if profile.n_members < min_cluster_size:
            s_values.append(0.0)
            continue
        like = profile.likelihoods
        lo = float(like.min())
        hi = float(like.max())
        if hi == lo:
            s_values.append(float(profile.n_members))
        else:
            s_values.append(float(((like - lo) / (hi - lo)).sum()))
    return 1.0 - math.fsum(s_values) / n_total


def similarity_v2(profiles, n_total, min_cluster_size=3):
    """Global-max variant: likelihood sums are normalized by the maximum
    likelihood over all clusters instead of the per-cluster maximum."""
    global_max = max(float(p.likelihoods.max()) for p in profiles)
    s_values = []
    for profile in profiles:
        if profile.n_members < min_cluster_size or global_max <= 0.0:
            s_values.append(0.0)
        else:
            s_values.append(float(profile.likelihoods.sum() / global_max))
    return 1.0 - math.fsum(s_values) / n_total


def similarity_v3(profiles, n_total, center="mean", metric="abs", normalize=False):
    """Dispersion variant: mean distance of member log-likelihoods to their
    center (mean or median), absolute or squared.

    With normalize the distances are min-max scaled per cluster, which bounds
    the result to [0, 1]; the raw value is otherwise unbounded.  Clusters are
    weighted by size (the result is the grand mean over points).
    """
    if center not in ("mean", "median"):
        raise ValueError(f"center must be 'mean' or 'median', got {center!r}")
    if metric not in ("abs", "squared"):
        raise ValueError(f"metric must be 'abs' or 'squared', got {metric!r}")
    contributions = []
    for profile in profiles:
        g = profile.g
        mid = float(np.mean(g)) if center == "mean" else float(np.median(g))
        dists = np.abs(g - mid) if metric == "abs" else (g - mid) ** 2
        if normalize:
            lo = float(dists.min())
            hi = float(dists.max())
            dists = (dists - lo) / (hi - lo) if hi > lo else np.zeros_like(dists)
        contributions.append(float(dists.sum()))
    return math.fsum(contributions) / n_total


def kdi_index(data, partition, params, bw_spec=None, profiles=None, log_matrix=None):
    """Full index for one partition: fit profiles, evaluate the selected
    ambiguous and similarity variants, mix with delta, and attach the boundary
    index.  Deterministic given params.seed.

    profiles/log_matrix may be passed in when already computed (they must then
    match params and the partition).
    """
    if profiles is None:
        profiles = fit_profiles(data, partition, params, bw_spec=bw_spec)
    if log_matrix is None:
        log_matrix = cross_log_density(data, profiles)

    i_a_main, flags = ambiguous_index(data, profiles, log_matrix=log_matrix)
    variant = params.ambiguous_variant
    if variant == "main":
        i_a = i_a_main
    elif variant == "v1":
        i_a = ambiguous_v1(data, profiles, log_matrix=log_matrix, pair_local=params.pair_local)
    elif variant == "v2":
        i_a = ambiguous_v2(data, profiles, log_matrix=log_matrix, pair_local=params.pair_local)
    else:
        i_a = ambiguous_v3(data, profiles, params.mc_samples, params.seed)

    i_s_main, s_values = similarity_index(profiles, data.n, params.min_cluster_size)
    variant = params.similarity_variant
    if variant == "main":
        i_s = i_s_main
    elif variant == "v1":
        i_s = similarity_v1(profiles, data.n, params.min_cluster_size)
    elif variant == "v2":
        i_s = similarity_v2(profiles, data.n, params.min_cluster_size)
    else:
        i_s = similarity_v3(
            profiles,
            data.n,
            center=params.s_v3_center,
            metric=params.s_v3_metric,
            normalize=params.s_v3_normalize,
        )

    i_b = boundary_index(
        data,
        profiles,
        params.rho,
        log_matrix=log_matrix,
        members_only=params.boundary_members_only,
    )
    return KdiScore(
        I=params.delta * i_a + (1.0 - params.delta) * i_s,
        I_a=i_a,
        I_s=i_s,
        I_b=i_b,
        ambiguous_count=int(flags.sum()),
        per_cluster_S=s_values,
        S_omega=math.fsum(float(v) for v in s_values),
    )
