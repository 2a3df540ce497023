"""Per-cluster Gaussian kernel density estimation.

Densities are evaluated in log space via log-sum-exp, so queries far from the
training points still get a finite log-density.  Bandwidths come from a
cross-validated grid search, with a Scott-style fallback for clusters too
small to cross-validate.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist
from scipy.special import logsumexp

LOG_2PI = float(np.log(2.0 * np.pi))

# Default search-space knobs (see BandwidthSearchSpec.auto).
GRID_SIZE = 20
GRID_SPAN = (0.01, 10.0)
DEFAULT_FOLDS = 5
MEDIAN_SUBSAMPLE = 500

# Guard for held-out points whose log-density is non-finite; cannot trigger
# with log-sum-exp on finite inputs but bounds the CV objective regardless.
UNDERFLOW_PENALTY = -1e10


@dataclass(frozen=True)
class DensityModel:
    """Gaussian KDE: training points of shape (m, d) and a bandwidth h > 0."""

    training_points: np.ndarray
    bandwidth: float

    @property
    def m(self):
        return self.training_points.shape[0]

    @property
    def d(self):
        return self.training_points.shape[1]


@dataclass(frozen=True)
class BandwidthSearchSpec:
    """Grid of candidate bandwidths plus the CV fold count and shuffle seed."""

    grid: tuple
    folds: int = DEFAULT_FOLDS
    seed: int = 0

    def __post_init__(self):
        grid = tuple(float(h) for h in self.grid)
        if not grid:
            raise ValueError("bandwidth grid must be non-empty")
        if any(h <= 0 for h in grid):
            raise ValueError("bandwidth candidates must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("bandwidth grid must be strictly increasing")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        object.__setattr__(self, "grid", grid)


def fit_kde(points, h):
    """Build a Gaussian KDE model from the points with bandwidth h."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[0] < 1:
        raise ValueError("cannot fit a KDE on an empty point set")
    h = float(h)
    if not np.isfinite(h) or h <= 0:
        raise ValueError(f"bandwidth must be positive and finite, got {h}")
    return DensityModel(training_points=pts, bandwidth=h)


def log_density_many(model, queries):
    """Log KDE density at each query row, computed with log-sum-exp.

    log f(x) = logsumexp_i(-|x - x_i|^2 / 2h^2) - log m - d*log h - (d/2)*log 2pi
    """
    q = np.asarray(queries, dtype=np.float64)
    if q.ndim == 1:
        q = q.reshape(-1, 1) if model.d == 1 else q.reshape(1, -1)
    if q.shape[1] != model.d:
        raise ValueError(f"query dimension {q.shape[1]} != model dimension {model.d}")
    h = model.bandwidth
    sq = cdist(q, model.training_points, "sqeuclidean")
    exponents = -sq / (2.0 * h * h)
    norm = np.log(model.m) + model.d * np.log(h) + 0.5 * model.d * LOG_2PI
    return logsumexp(exponents, axis=1) - norm


def log_density(model, x):
    """Log KDE density at a single query point."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != model.d:
        raise ValueError(f"query dimension {x.shape[0]} != model dimension {model.d}")
    return float(log_density_many(model, x.reshape(1, -1))[0])


def select_bandwidth(points, spec):
    """Pick the grid bandwidth maximizing mean held-out total log-likelihood.

    Folds are a seeded shuffle of the points; the score of a candidate h is
    the mean over folds of the summed held-out log-densities.  Ties (and
    near-ties are not special-cased) resolve toward the larger bandwidth.
    Raises ValueError when there are fewer points than folds; callers fall
    back to fallback_bandwidth in that case.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    m = pts.shape[0]
    if len(spec.grid) == 1:
        return spec.grid[0]
    if m < spec.folds:
        raise ValueError(f"need at least {spec.folds} points for {spec.folds}-fold CV, got {m}")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(m)
    folds = np.array_split(order, spec.folds)
    best_h = None
    best_score = -np.inf
    for h in spec.grid:
        fold_scores = []
        for held in folds:
            mask = np.ones(m, dtype=bool)
            mask[held] = False
            model = fit_kde(pts[mask], h)
            ll = log_density_many(model, pts[held])
            ll = np.where(np.isfinite(ll), ll, UNDERFLOW_PENALTY)
            fold_scores.append(ll.sum())
        score = float(np.mean(fold_scores))
        if score >= best_score:
            best_score = score
            best_h = h
    return best_h


def fallback_bandwidth(points):
    """Scott-style rule h = sigma_hat * m^(-1/(d+4)) for clusters where CV is
    undefined; coincident or single points get h = 1.0."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    m, d = pts.shape
    if m < 1:
        raise ValueError("need at least one point")
    sigma = float(np.mean(np.std(pts, axis=0)))
    if sigma == 0.0:
        return 1.0
    return sigma * m ** (-1.0 / (d + 4))


def cluster_scale(points, seed=0):
    """Median pairwise distance, computed on a seeded subsample of at most
    MEDIAN_SUBSAMPLE points.  Zero when all points coincide."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    m = pts.shape[0]
    if m < 2:
        return 0.0
    if m > MEDIAN_SUBSAMPLE:
        rng = np.random.default_rng(seed)
        pts = pts[rng.choice(m, MEDIAN_SUBSAMPLE, replace=False)]
    return float(np.median(pdist(pts)))


def auto_search_spec(points, folds=DEFAULT_FOLDS, seed=0):
    """Default scale-relative search spec: GRID_SIZE log-spaced candidates
    spanning GRID_SPAN times the cluster's median pairwise distance.

    Returns None when the scale is degenerate (all points coincident) or the
    cluster is smaller than the fold count; callers then use
    fallback_bandwidth.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[0] < folds:
        return None
    s = cluster_scale(pts, seed=seed)
    if s <= 0.0:
        return None
    grid = np.geomspace(GRID_SPAN[0] * s, GRID_SPAN[1] * s, GRID_SIZE)
    return BandwidthSearchSpec(grid=tuple(grid), folds=folds, seed=seed)


def choose_bandwidth(points, spec=None, folds=DEFAULT_FOLDS, seed=0):
    """Bandwidth for one cluster: CV grid search when feasible, otherwise the
    fallback rule.  With spec=None a scale-relative grid is built first."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if spec is None:
        spec = auto_search_spec(pts, folds=folds, seed=seed)
        if spec is None:
            return fallback_bandwidth(pts)
    if pts.shape[0] < spec.folds:
        return fallback_bandwidth(pts)
    return select_bandwidth(pts, spec)
