import math

import numpy as np
import pytest

from kdeval.data_io import Dataset, make_blobs
from kdeval.density import BandwidthSearchSpec
from kdeval.kdi import (
    ClusterDensityProfile,
    KdiParams,
    ambiguous_index,
    ambiguous_v1,
    ambiguous_v2,
    ambiguous_v3,
    boundary_index,
    cross_log_density,
    fit_profiles,
    kdi_index,
    pairwise_ambiguous,
    similarity_index,
    similarity_v1,
    similarity_v2,
    similarity_v3,
    territory_contains,
)
from kdeval.partitions import canonicalize

from _oracles import kdi_reference

SPEC = BandwidthSearchSpec(grid=(0.3, 0.6, 1.2), folds=2, seed=0)


def _profiles(ds, labels, params=None, bw=SPEC):
    params = params or KdiParams(seed=0)
    return fit_profiles(ds, canonicalize(labels), params, bw_spec=bw)


def test_params_validation():
    with pytest.raises(ValueError):
        KdiParams(delta=1.5)
    with pytest.raises(ValueError):
        KdiParams(alpha1=-0.1)
    with pytest.raises(ValueError):
        KdiParams(ambiguous_variant="v9")
    with pytest.raises(ValueError):
        KdiParams(mc_samples=0)


def test_coincident_cluster_uses_beta_interval():
    pts = np.concatenate([np.ones((5, 2)), np.zeros((5, 2)) + 10.0])
    ds = Dataset(pts, id="coincident")
    params = KdiParams(beta1=2.5, beta2=0.75, seed=0)
    profiles = _profiles(ds, [0] * 5 + [1] * 5, params)
    for profile in profiles:
        assert profile.delta_g == 0.0
        g = float(profile.g[0])
        lo, hi = profile.territory
        assert lo == pytest.approx(g - 2.5, abs=1e-12)
        assert hi == pytest.approx(g + 0.75, abs=1e-12)


def test_single_cluster_profile():
    ds = make_blobs(1, 12, [(0, 0)], sigma=1.0, seed=1)
    profiles = _profiles(ds, [0] * 12)
    assert len(profiles) == 1
    assert profiles[0].g.shape == (12,)


def test_profiles_match_definitional_oracle():
    rng = np.random.default_rng(2)
    pts = np.concatenate([rng.normal(0, 1, (12, 2)), rng.normal(6, 1, (14, 2))])
    labels = [0] * 12 + [1] * 14
    ds = Dataset(pts, id="two")
    profiles = _profiles(ds, labels)
    hs = [p.model.bandwidth for p in profiles]
    ref = kdi_reference([tuple(p) for p in pts], labels, hs)
    for q, profile in enumerate(profiles):
        assert profile.territory[0] == pytest.approx(ref["territory"][q][0], abs=1e-10)
        assert profile.territory[1] == pytest.approx(ref["territory"][q][1], abs=1e-10)


def test_territory_contains_min_member():
    ds = make_blobs(1, 20, [(0, 0)], sigma=1.0, seed=3)
    profile = _profiles(ds, [0] * 20)[0]
    weakest = ds.points[np.argmin(profile.g)]
    assert territory_contains(profile, weakest)


def test_every_member_inside_own_territory():
    ds = make_blobs(3, 18, [(0, 0), (5, 0), (0, 5)], sigma=0.9, seed=30)
    for profile in _profiles(ds, list(ds.reference_labels)):
        lo, hi = profile.territory
        assert np.all(profile.g >= lo) and np.all(profile.g <= hi)


def test_territory_excludes_far_point():
    ds = make_blobs(2, 15, [(0, 0), (9, 0)], sigma=0.8, seed=4)
    far = np.array([1e6, 1e6])
    for profile in _profiles(ds, [0] * 15 + [1] * 15):
        assert not territory_contains(profile, far)


def test_territory_excludes_ring_mode():
    # exact uniform ring: zero member spread, so the beta bounds apply; the
    # ring center is denser than any member and must fall outside
    theta = np.linspace(0, 2 * np.pi, 100, endpoint=False)
    ds = Dataset(np.c_[np.cos(theta), np.sin(theta)], id="ring")
    params = KdiParams(beta1=1.0, beta2=0.1, seed=0)
    profile = fit_profiles(
        ds, canonicalize([0] * 100), params, bw_spec=BandwidthSearchSpec(grid=(1.0,), folds=2)
    )[0]
    assert profile.delta_g == pytest.approx(0.0, abs=1e-9)
    assert not territory_contains(profile, [0.0, 0.0])


def test_ambiguous_single_cluster_is_zero():
    ds = make_blobs(1, 10, [(0, 0)], sigma=1.0, seed=5)
    profiles = _profiles(ds, [0] * 10)
    i_a, flags = ambiguous_index(ds, profiles)
    assert i_a == 0.0
    assert not flags.any()


def test_ambiguous_far_blobs_zero():
    ds = make_blobs(2, 25, [(0, 0), (50, 50)], sigma=0.5, seed=6)
    profiles = _profiles(ds, list(ds.reference_labels))
    i_a, _ = ambiguous_index(ds, profiles)
    assert i_a == 0.0


def test_ambiguous_interleaved_split_near_one():
    ds = make_blobs(1, 60, [(0, 0)], sigma=1.0, seed=7)
    labels = [i % 2 for i in range(60)]
    profiles = _profiles(ds, labels)
    i_a, _ = ambiguous_index(ds, profiles)
    assert i_a > 0.9


def test_similarity_two_point_cluster_scores_zero():
    pts = np.array([[0.0, 0.0], [0.2, 0.0], [5.0, 5.0], [5.2, 5.0], [5.0, 5.4], [5.3, 5.2]])
    ds = Dataset(pts, id="tiny")
    profiles = _profiles(ds, [0, 0, 1, 1, 1, 1])
    _, s_values = similarity_index(profiles, ds.n, min_cluster_size=3)
    assert s_values[0] == 0.0
    assert s_values[1] > 0.0


def test_similarity_symmetric_square_is_maximal():
    # all four member likelihoods exactly equal, so sum/max = n_q
    ds = Dataset([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], id="square")
    profiles = fit_profiles(
        ds, canonicalize([0] * 4), KdiParams(seed=0), BandwidthSearchSpec(grid=(1.0,), folds=2)
    )
    i_s, s_values = similarity_index(profiles, 4, min_cluster_size=3)
    assert s_values[0] == pytest.approx(4.0, abs=1e-12)
    assert i_s == pytest.approx(0.0, abs=1e-12)


def test_similarity_outlier_raises_index():
    # fixed bandwidth so the comparison isolates the appended outlier
    fixed = BandwidthSearchSpec(grid=(0.4,), folds=2, seed=0)
    rng = np.random.default_rng(8)
    blob = rng.normal(0, 1, (100, 2))
    ds_clean = Dataset(blob, id="clean")
    clean, _ = similarity_index(_profiles(ds_clean, [0] * 100, bw=fixed), 100)
    ds_out = Dataset(np.concatenate([blob, [[40.0, 40.0]]]), id="outlier")
    worse, _ = similarity_index(_profiles(ds_out, [0] * 101, bw=fixed), 101)
    assert worse > clean


def test_kdi_delta_endpoints():
    ds = make_blobs(2, 20, [(0, 0), (6, 0)], sigma=0.9, seed=9)
    labels = list(ds.reference_labels)
    part = canonicalize(labels)
    lo = kdi_index(ds, part, KdiParams(delta=0.0, seed=1), bw_spec=SPEC)
    hi = kdi_index(ds, part, KdiParams(delta=1.0, seed=1), bw_spec=SPEC)
    assert lo.I == lo.I_s
    assert hi.I == hi.I_a


def test_kdi_seed_determinism():
    ds = make_blobs(3, 20, [(0, 0), (7, 0), (0, 7)], sigma=0.8, seed=10)
    part = canonicalize(list(ds.reference_labels))
    a = kdi_index(ds, part, KdiParams(seed=5))
    b = kdi_index(ds, part, KdiParams(seed=5))
    assert (a.I, a.I_a, a.I_s, a.I_b) == (b.I, b.I_a, b.I_s, b.I_b)


def _block_permuted(ds, labels, order):
    """Reorder the dataset cluster-block-wise so first-occurrence
    canonicalization assigns new cluster ids (within-cluster point order is
    preserved)."""
    X = ds.points
    labels = np.asarray(labels)
    parts = [X[labels == q] for q in order]
    new_labels = np.concatenate([np.full(len(p), i) for i, p in enumerate(parts)])
    return Dataset(np.concatenate(parts), id=ds.id + "-perm"), new_labels


def test_kdi_relabel_invariance_bit_exact():
    ds = make_blobs(3, 15, [(0, 0), (4, 0), (0, 4)], sigma=0.9, seed=11)
    labels = list(ds.reference_labels)
    params = KdiParams(seed=3)
    base = kdi_index(ds, canonicalize(labels), params, bw_spec=SPEC)
    for order in ([1, 2, 0], [2, 1, 0], [0, 2, 1]):
        ds2, labels2 = _block_permuted(ds, labels, order)
        other = kdi_index(ds2, canonicalize(labels2), params, bw_spec=SPEC)
        assert other.I == base.I
        assert other.I_a == base.I_a
        assert other.I_s == base.I_s
        assert other.I_b == base.I_b


def test_boundary_rho_zero_counts_minimum_members():
    ds = make_blobs(2, 20, [(0, 0), (30, 30)], sigma=0.6, seed=12)
    profiles = _profiles(ds, list(ds.reference_labels))
    value = boundary_index(ds, profiles, rho=0.0)
    assert value == pytest.approx(1.0 / ds.n, abs=1e-15)


def test_boundary_degenerate_band():
    pts = np.concatenate([np.ones((4, 1)), np.linspace(5, 6, 8).reshape(-1, 1)])
    ds = Dataset(pts, id="deg")
    profiles = _profiles(ds, [0] * 4 + [1] * 8)
    assert profiles[0].delta_g == 0.0
    value = boundary_index(ds, profiles, rho=0.5)
    # coincident cluster: band is the single value min(G); all 4 members (and
    # no one else) sit exactly on it
    assert value >= 4 / (2 * ds.n) - 1e-12


def test_boundary_matches_oracle():
    rng = np.random.default_rng(13)
    pts = np.concatenate([rng.normal(0, 1, (15, 2)), rng.normal(5, 1.5, (18, 2))])
    labels = [0] * 15 + [1] * 18
    ds = Dataset(pts, id="b")
    profiles = _profiles(ds, labels)
    hs = [p.model.bandwidth for p in profiles]
    for rho in (0.5, 1.5):
        ref = kdi_reference([tuple(p) for p in pts], labels, hs, rho=rho)
        assert boundary_index(ds, profiles, rho) == pytest.approx(ref["i_b"], abs=1e-12)


def _one_pair_overlap():
    rng = np.random.default_rng(14)
    base = rng.normal(0, 0.8, (20, 2))
    shifted = base + [0.3, 0.0]  # heavy overlap with base
    far = rng.normal(40, 0.8, (20, 2))
    pts = np.concatenate([base, shifted, far])
    return Dataset(pts, id="pairover"), [0] * 20 + [1] * 20 + [2] * 20


def test_v1_single_cluster_zero():
    ds = make_blobs(1, 10, [(0, 0)], sigma=1.0, seed=15)
    assert ambiguous_v1(ds, _profiles(ds, [0] * 10)) == 0.0


def test_v1_disjoint_blobs_zero():
    ds = make_blobs(2, 20, [(0, 0), (60, 0)], sigma=0.5, seed=16)
    assert ambiguous_v1(ds, _profiles(ds, list(ds.reference_labels))) == 0.0


def test_v1_exactly_one_overlapping_pair():
    ds, labels = _one_pair_overlap()
    profiles = _profiles(ds, labels)
    a = pairwise_ambiguous(ds, profiles)
    assert a[0, 1] > 0 and a[0, 2] == 0 and a[1, 2] == 0
    assert ambiguous_v1(ds, profiles) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_v2_all_zero_pairs():
    ds = make_blobs(2, 20, [(0, 0), (60, 0)], sigma=0.5, seed=17)
    assert ambiguous_v2(ds, _profiles(ds, list(ds.reference_labels))) == 0.0


def test_v2_single_positive_pair_is_its_mean():
    ds, labels = _one_pair_overlap()
    profiles = _profiles(ds, labels)
    a = pairwise_ambiguous(ds, profiles)
    assert ambiguous_v2(ds, profiles) == pytest.approx(a[0, 1], abs=1e-15)


def test_v3_single_cluster_zero():
    ds = make_blobs(1, 10, [(0, 0)], sigma=1.0, seed=18)
    assert ambiguous_v3(ds, _profiles(ds, [0] * 10), 500, seed=1) == 0.0


def test_v3_identical_twin_clusters_one():
    rng = np.random.default_rng(19)
    blob = rng.normal(0, 1, (10, 2))
    ds = Dataset(np.concatenate([blob, blob]), id="twins")
    profiles = _profiles(ds, [0] * 10 + [1] * 10)
    assert ambiguous_v3(ds, profiles, 2000, seed=2) == 1.0


def test_v3_disjoint_blobs_zero():
    ds = make_blobs(2, 25, [(0, 0), (80, 0)], sigma=0.5, seed=20)
    profiles = _profiles(ds, list(ds.reference_labels))
    assert ambiguous_v3(ds, profiles, 20000, seed=3) == 0.0


def test_sv1_all_equal_degenerate_counts_full():
    ds = Dataset([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], id="square")
    profiles = fit_profiles(
        ds, canonicalize([0] * 4), KdiParams(seed=0), BandwidthSearchSpec(grid=(1.0,), folds=2)
    )
    # min-max degenerate: every member counts as 1 -> S_q = n_q -> index 0
    assert similarity_v1(profiles, 4) == pytest.approx(0.0, abs=1e-12)


def test_sv1_small_cluster_zero():
    pts = np.array([[0.0], [0.3], [9.0], [9.1], [9.2], [9.35]])
    ds = Dataset(pts, id="sv1")
    profiles = _profiles(ds, [0, 0, 1, 1, 1, 1])
    hs = [p.model.bandwidth for p in profiles]
    ref = kdi_reference([tuple(p) for p in pts], [0, 0, 1, 1, 1, 1], hs)
    assert similarity_v1(profiles, 6) == pytest.approx(ref["is_v1"], abs=1e-10)


def test_sv2_single_cluster_equals_main():
    ds = make_blobs(1, 15, [(0, 0)], sigma=1.0, seed=21)
    profiles = _profiles(ds, [0] * 15)
    main, _ = similarity_index(profiles, 15)
    assert similarity_v2(profiles, 15) == pytest.approx(main, abs=1e-15)


def test_sv2_penalizes_sparse_cluster_more():
    rng = np.random.default_rng(22)
    dense = rng.normal(0, 0.3, (30, 2))
    sparse = rng.normal(20, 3.0, (30, 2))
    ds = Dataset(np.concatenate([dense, sparse]), id="mix")
    profiles = _profiles(ds, [0] * 30 + [1] * 30)
    main, _ = similarity_index(profiles, 60)
    assert similarity_v2(profiles, 60) > main


def test_sv3_all_equal_zero_dispersion():
    ds = Dataset([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], id="square")
    profiles = fit_profiles(
        ds, canonicalize([0] * 4), KdiParams(seed=0), BandwidthSearchSpec(grid=(1.0,), folds=2)
    )
    assert similarity_v3(profiles, 4) == pytest.approx(0.0, abs=1e-12)


def test_sv3_two_point_hand_value():
    profile = ClusterDensityProfile(
        label=0,
        member_indices=np.array([0, 1]),
        model=None,
        g=np.array([0.0, 2.0]),
        likelihoods=np.exp(np.array([0.0, 2.0])),
        delta_g=1.0,
        territory=(-1.0, 3.0),
        boundary_band=(0.0, 0.5),
    )
    # distances to the mean (1.0) are {1, 1}; raw mean distance = 1.0
    assert similarity_v3([profile], 2, center="mean", metric="abs") == pytest.approx(
        1.0, abs=1e-15
    )
    assert similarity_v3([profile], 2, center="median", metric="squared") == pytest.approx(
        1.0, abs=1e-15
    )
    assert similarity_v3([profile], 2, normalize=True) == pytest.approx(0.0, abs=1e-15)


def test_kdi_variant_selection_changes_fields():
    ds, labels = _one_pair_overlap()
    part = canonicalize(labels)
    main = kdi_index(ds, part, KdiParams(seed=1), bw_spec=SPEC)
    v1 = kdi_index(ds, part, KdiParams(seed=1, ambiguous_variant="v1"), bw_spec=SPEC)
    assert v1.I_a == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert v1.I == pytest.approx(0.5 * v1.I_a + 0.5 * v1.I_s, abs=1e-15)
    assert main.ambiguous_count == v1.ambiguous_count  # main-definition count
