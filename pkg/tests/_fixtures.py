"""Shared dataset builders for the test suite."""

import numpy as np

from kdeval.data_io import Dataset

FOUR_BLOB_CENTERS = ((0.0, 0.0), (12.0, 0.0), (0.0, 12.0), (12.0, 12.0))
FOUR_BLOB_SIGMAS = (0.4, 0.55, 0.7, 0.85)


def four_blobs(seed=5, per_cluster=100):
    """Four far-separated Gaussian blobs with unequal spreads (n=400 at the
    default size); reference labels are the generating component."""
    rng = np.random.default_rng(seed)
    pts, labs = [], []
    for i, (center, sigma) in enumerate(zip(FOUR_BLOB_CENTERS, FOUR_BLOB_SIGMAS)):
        pts.append(np.asarray(center) + sigma * rng.standard_normal((per_cluster, 2)))
        labs += [i] * per_cluster
    return Dataset(np.concatenate(pts), reference_labels=labs, id="four-blobs")


def two_rings(seed=9, r1=1.0, r2=3.5, m1=350, m2=450, noise=0.25):
    """Two concentric rings separated by a wide gap; non-convex clusters."""
    rng = np.random.default_rng(seed)
    pts, labs = [], []
    for i, (radius, m) in enumerate([(r1, m1), (r2, m2)]):
        theta = rng.uniform(0, 2 * np.pi, m)
        rad = radius + noise * rng.standard_normal(m)
        pts.append(np.c_[rad * np.cos(theta), rad * np.sin(theta)])
        labs += [i] * m
    return Dataset(np.concatenate(pts), reference_labels=labs, id="two-rings")


def two_chains(seed=3, m=40, gap=6.0):
    """Two parallel point chains joined only through a wide gap; single
    linkage at k=2 recovers them exactly."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 10.0, m)
    a = np.c_[t, 0.05 * rng.standard_normal(m)]
    b = np.c_[t, gap + 0.05 * rng.standard_normal(m)]
    return Dataset(np.concatenate([a, b]), reference_labels=[0] * m + [1] * m, id="two-chains")


def anisotropic_pair(seed=11, m=80):
    """Two elongated parallel Gaussians; k-means splits along the long axis,
    a full-covariance mixture separates them."""
    rng = np.random.default_rng(seed)
    cov = np.array([[9.0, 0.0], [0.0, 0.04]])
    a = rng.multivariate_normal([0.0, 0.0], cov, m)
    b = rng.multivariate_normal([0.0, 1.6], cov, m)
    return Dataset(np.concatenate([a, b]), reference_labels=[0] * m + [1] * m, id="aniso-pair")


def random_dataset(rng, n=None, d=None, k=None):
    """Small random labeled dataset: k loose blobs, for property tests."""
    n = n or int(rng.integers(8, 40))
    d = d or int(rng.integers(1, 4))
    k = k or int(rng.integers(1, 5))
    k = min(k, n // 2) or 1
    centers = rng.uniform(-4.0, 4.0, size=(k, d))
    labels = rng.integers(0, k, size=n)
    labels[:k] = np.arange(k)  # every cluster non-empty
    points = centers[labels] + rng.standard_normal((n, d))
    return Dataset(points, reference_labels=labels, id="random"), labels
