import numpy as np
import pytest
from scipy import stats

from ngca.data import (
    BENCHMARK_LABEL_MAPS,
    DISTRIBUTIONS,
    ArtificialSpec,
    LabeledDataset,
    _rotation_chain,
    artificial_header,
    augment_noise_dims,
    balanced_subsample,
    condition_number,
    load_libsvm,
    load_matrix_csv,
    make_artificial,
    sample_noise,
    sample_signal,
    write_artificial_csv,
    write_libsvm,
)
from ngca.exceptions import LibsvmFormatError
from ngca.numerics import build_whitener, sample_covariance, whiten

N_KS = 10000
ALPHA = 0.01


def test_gauss_mixture_marginals():
    S = sample_signal("gauss_mixture", N_KS, seed=0)

    def mixture_cdf(t):
        return 0.5 * stats.norm.cdf(t - 3.0) + 0.5 * stats.norm.cdf(t + 3.0)

    for j in range(2):
        assert stats.kstest(S[:, j], mixture_cdf).pvalue > ALPHA
    assert S.mean(axis=0) == pytest.approx([0.0, 0.0], abs=0.1)
    assert S.var(axis=0) == pytest.approx([10.0, 10.0], abs=0.3)


def test_dep_super_radius_is_gamma():
    S = sample_signal("dep_super", N_KS, seed=0)
    radius = np.linalg.norm(S, axis=1)
    assert stats.kstest(radius, "gamma", args=(2.0,)).pvalue > ALPHA


def test_dep_sub_uniform_on_disk():
    S = sample_signal("dep_sub", N_KS, seed=2)
    radius = np.linalg.norm(S, axis=1)
    assert radius.max() <= 1.0
    # Area-uniform law on the disk: squared radius is U(0, 1).
    assert stats.kstest(radius**2, "uniform").pvalue > ALPHA


def test_dep_super_sub_marginals():
    S = sample_signal("dep_super_sub", N_KS, seed=3)
    s1, s2 = S[:, 0], S[:, 1]
    assert stats.kstest(s1, "laplace").pvalue > ALPHA
    inside = np.abs(s1) <= np.log(2.0)
    assert abs(inside.mean() - 0.5) <= 3.0 / np.sqrt(N_KS)
    c = np.where(inside, 0.0, -1.0)
    assert stats.kstest(s2 - c, "uniform").pvalue > ALPHA


def test_sample_signal_unknown_distribution():
    with pytest.raises(ValueError):
        sample_signal("cauchy", 10, seed=0)


def test_sample_signal_deterministic():
    for dist in DISTRIBUTIONS:
        a = sample_signal(dist, 50, seed=7)
        b = sample_signal(dist, 50, seed=7)
        assert np.array_equal(a, b)


def test_rotation_chain_is_orthogonal():
    for d in (2, 3, 8):
        Q = _rotation_chain(d)
        assert Q.T @ Q == pytest.approx(np.eye(d), abs=1e-12)


def test_rotation_chain_matches_explicit_product():
    c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)

    def plane(d, i, j):
        R = np.eye(d)
        R[i, i] = R[j, j] = c
        R[i, j] = -s
        R[j, i] = s
        return R

    expected = plane(3, 1, 2) @ plane(3, 0, 2) @ plane(3, 0, 1)
    assert _rotation_chain(3) == pytest.approx(expected)


def test_sample_noise_unit_column_variances():
    N = sample_noise(2.0, 500, seed=0)
    assert N.shape == (500, 8)
    assert N.var(axis=0) == pytest.approx(np.ones(8), abs=1e-12)


def test_sample_noise_isotropic_at_zero_severity():
    N = sample_noise(0.0, 20000, seed=1)
    assert sample_covariance(N) == pytest.approx(np.eye(8), abs=0.05)


def test_sample_noise_conditioning_grows_with_r():
    kappas = [
        condition_number(sample_noise(r, 5000, seed=5)) for r in (0.0, 1.0, 2.0)
    ]
    assert kappas[0] < kappas[1] < kappas[2]


def test_sample_noise_rejects_negative_r():
    with pytest.raises(ValueError):
        sample_noise(-0.5, 10, seed=0)


def test_artificial_spec_validation():
    with pytest.raises(ValueError):
        ArtificialSpec("triangle", 0.0, 100, 0)
    with pytest.raises(ValueError):
        ArtificialSpec("dep_super", -1.0, 100, 0)
    with pytest.raises(ValueError):
        ArtificialSpec("dep_super", 0.0, 0, 0)


def test_make_artificial_shapes_and_basis():
    X, E = make_artificial(ArtificialSpec("dep_sub", 1.0, 300, 6))
    assert X.shape == (300, 10)
    assert E.shape == (10, 2)
    expected = np.zeros((10, 2))
    expected[0, 0] = expected[1, 1] = 1.0
    assert np.array_equal(E, expected)


def test_make_artificial_deterministic():
    spec = ArtificialSpec("gauss_mixture", 2.0, 120, 9)
    X1, _ = make_artificial(spec)
    X2, _ = make_artificial(spec)
    assert np.array_equal(X1, X2)


def test_make_artificial_signal_noise_independent():
    X, _ = make_artificial(ArtificialSpec("dep_super", 0.0, 20000, 3))
    cross = sample_covariance(X)[:2, 2:]
    assert cross == pytest.approx(np.zeros((2, 8)), abs=0.06)


def test_condition_number_diagonal_exact():
    X = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0], [0.0, -2.0]])
    # Sample covariance is diag(0.5, 2): ratio is exactly 4.
    assert condition_number(X) == pytest.approx(4.0)


def test_condition_number_of_whitened_data(rng_fixed):
    X = rng_fixed.normal(size=(400, 3)) @ rng_fixed.normal(size=(3, 3))
    Y = whiten(build_whitener(X), X)
    assert condition_number(Y) == pytest.approx(1.0, abs=1e-8)


def test_condition_number_singular():
    X = np.column_stack([np.arange(5.0), np.arange(5.0)])
    with pytest.raises(ValueError):
        condition_number(X)


def test_load_libsvm_sparse_layout(tmp_path):
    path = tmp_path / "toy.libsvm"
    path.write_text("+1 1:0.5 3:2.0\n-1\n")
    ds = load_libsvm(path)
    assert np.array_equal(ds.X, [[0.5, 0.0, 2.0], [0.0, 0.0, 0.0]])
    assert np.array_equal(ds.labels, [1, -1])


def test_load_libsvm_pads_to_n_features(tmp_path):
    path = tmp_path / "toy.libsvm"
    path.write_text("+1 2:1.5\n")
    ds = load_libsvm(path, n_features=5)
    assert ds.X.shape == (1, 5)
    assert ds.X[0, 1] == 1.5
    with pytest.raises(ValueError):
        load_libsvm(path, n_features=1)


def test_load_libsvm_bad_entry_reports_line(tmp_path):
    path = tmp_path / "bad.libsvm"
    path.write_text("+1 1:1.0\n+1 2:a\n")
    with pytest.raises(LibsvmFormatError) as err:
        load_libsvm(path)
    assert err.value.line_number == 2


def test_load_libsvm_bad_label(tmp_path):
    path = tmp_path / "bad.libsvm"
    path.write_text("x 1:1.0\n")
    with pytest.raises(LibsvmFormatError) as err:
        load_libsvm(path)
    assert err.value.line_number == 1


def test_load_libsvm_nonascending_index(tmp_path):
    path = tmp_path / "bad.libsvm"
    path.write_text("+1 2:1.0 1:2.0\n")
    with pytest.raises(LibsvmFormatError):
        load_libsvm(path)


def test_load_libsvm_label_map_drops_unmapped(tmp_path):
    path = tmp_path / "vehicle.libsvm"
    path.write_text("1 1:1\n2 1:2\n3 1:3\n4 1:4\n5 1:5\n")
    ds = load_libsvm(path, label_map=BENCHMARK_LABEL_MAPS["vehicle"])
    assert np.array_equal(ds.labels, [1, 1, -1, -1])
    assert np.array_equal(ds.X[:, 0], [1.0, 2.0, 3.0, 4.0])


def test_load_libsvm_requires_binary_labels_without_map(tmp_path):
    path = tmp_path / "raw.libsvm"
    path.write_text("3 1:1.0\n")
    with pytest.raises(ValueError):
        load_libsvm(path)


def test_libsvm_round_trip(tmp_path, rng_fixed):
    X = rng_fixed.normal(size=(8, 4))
    labels = np.array([1, -1, 1, 1, -1, -1, 1, -1])
    path = tmp_path / "round.libsvm"
    write_libsvm(path, X, labels)
    ds = load_libsvm(path)
    assert np.array_equal(ds.X, X)
    assert np.array_equal(ds.labels, labels)


def test_labeled_dataset_validation():
    with pytest.raises(ValueError):
        LabeledDataset(np.zeros((3, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        LabeledDataset(np.zeros((2, 2)), np.array([1, 2]))


def test_augment_noise_dims_keeps_originals(rng_fixed):
    X = rng_fixed.normal(size=(30, 4))
    out = augment_noise_dims(X, 9, seed=0)
    assert out.shape == (30, 9)
    assert np.array_equal(out[:, :4], X)
    again = augment_noise_dims(X, 9, seed=0)
    assert np.array_equal(out, again)


def test_augment_noise_dims_noop_at_same_width(rng_fixed):
    X = rng_fixed.normal(size=(10, 3))
    assert np.array_equal(augment_noise_dims(X, 3, seed=1), X)


def test_augment_noise_dims_rejects_shrink(rng_fixed):
    with pytest.raises(ValueError):
        augment_noise_dims(rng_fixed.normal(size=(10, 3)), 2, seed=0)


def _toy_labeled(per_class):
    X = np.arange(2.0 * per_class)[:, None]
    labels = np.array([1] * per_class + [-1] * per_class)
    return LabeledDataset(X, labels)


def test_balanced_subsample_splits():
    train, test = balanced_subsample(_toy_labeled(10), 4, seed=0)
    for split in (train, test):
        assert split.X.shape == (4, 1)
        assert (split.labels == 1).sum() == 2
        assert (split.labels == -1).sum() == 2
    # Rows are drawn without replacement across the two splits.
    assert not set(train.X[:, 0]) & set(test.X[:, 0])


def test_balanced_subsample_deterministic():
    t1, _ = balanced_subsample(_toy_labeled(12), 6, seed=3)
    t2, _ = balanced_subsample(_toy_labeled(12), 6, seed=3)
    assert np.array_equal(t1.X, t2.X)
    assert np.array_equal(t1.labels, t2.labels)


def test_balanced_subsample_insufficient_class():
    with pytest.raises(ValueError):
        balanced_subsample(_toy_labeled(3), 4, seed=0)


def test_balanced_subsample_rejects_odd_n():
    with pytest.raises(ValueError):
        balanced_subsample(_toy_labeled(10), 5, seed=0)


def test_artificial_header_names():
    assert artificial_header() == [
        "s1", "s2", "n3", "n4", "n5", "n6", "n7", "n8", "n9", "n10",
    ]


def test_artificial_csv_round_trip(tmp_path):
    X, _ = make_artificial(ArtificialSpec("dep_super_sub", 1.0, 25, 8))
    path = tmp_path / "artificial.csv"
    write_artificial_csv(X, path)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(artificial_header())
    assert np.array_equal(load_matrix_csv(path), X)


def test_write_artificial_csv_rejects_wrong_width(tmp_path):
    with pytest.raises(ValueError):
        write_artificial_csv(np.zeros((5, 3)), tmp_path / "bad.csv")
