import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from ngca.exceptions import (
    ConstantFeatureError,
    IllConditionedCovarianceError,
    RankDeficiencyError,
    SingularSystemError,
)
from ngca.numerics import (
    GaussianDerivBasis,
    basis_eval,
    basis_gradient,
    basis_partial,
    build_whitener,
    orthonormalize,
    sample_covariance,
    solve_ridge,
    standardize,
    symmetric_eig_topm,
    whiten,
)


def test_standardize_single_column():
    X = np.array([[2.0], [4.0], [6.0]])
    Xs, means, scales = standardize(X)
    assert Xs == pytest.approx(np.array([[-1.2247448713915890], [0.0], [1.2247448713915890]]))
    assert means == pytest.approx([4.0])
    assert scales == pytest.approx([np.sqrt(8.0 / 3.0)])


def test_standardize_output_moments(rng_fixed):
    X = rng_fixed.normal(3.0, 2.5, size=(200, 4))
    Xs, _, _ = standardize(X)
    assert Xs.mean(axis=0) == pytest.approx(np.zeros(4), abs=1e-12)
    assert Xs.std(axis=0) == pytest.approx(np.ones(4))


def test_standardize_constant_column():
    X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    with pytest.raises(ConstantFeatureError) as err:
        standardize(X)
    assert err.value.column == 1


def test_standardize_rejects_vector():
    with pytest.raises(ValueError):
        standardize(np.array([1.0, 2.0, 3.0]))


@given(
    hnp.arrays(
        np.float64,
        st.tuples(st.integers(3, 30), st.integers(1, 5)),
        elements=st.floats(-1e3, 1e3),
    )
)
def test_standardize_idempotent(X):
    # Columns whose spread is at roundoff scale standardize to garbage;
    # the property only holds for genuinely varying columns.
    assume(np.all(X.std(axis=0) > 1e-9 * (1.0 + np.abs(X).max())))
    Xs, _, _ = standardize(X)
    Xss, means, scales = standardize(Xs)
    assert np.allclose(Xss, Xs, atol=1e-8)
    assert means == pytest.approx(np.zeros(X.shape[1]), abs=1e-12)
    assert scales == pytest.approx(np.ones(X.shape[1]))


def test_sample_covariance_two_points():
    X = np.array([[0.0, 0.0], [2.0, 0.0]])
    assert sample_covariance(X) == pytest.approx(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_sample_covariance_divides_by_n(rng_fixed):
    X = rng_fixed.normal(size=(7, 3))
    Xc = X - X.mean(axis=0)
    expected = sum(np.outer(row, row) for row in Xc) / 7
    assert sample_covariance(X) == pytest.approx(expected)


def test_sample_covariance_repeated_row():
    X = np.tile([1.5, -2.0, 3.0], (5, 1))
    assert sample_covariance(X) == pytest.approx(np.zeros((3, 3)))


def test_build_whitener_identity_covariance(rng_fixed):
    X = rng_fixed.normal(size=(5000, 3))
    w = build_whitener(X)
    cov = sample_covariance(X)
    # inv_sqrt_cov squared must invert the covariance.
    assert w.inv_sqrt_cov @ cov @ w.inv_sqrt_cov == pytest.approx(np.eye(3), abs=1e-10)
    assert w.cov_eigenvalues[0] >= w.cov_eigenvalues[-1]


def test_build_whitener_diagonal():
    # Covariance diag(4, 1) exactly: two symmetric points per axis.
    X = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    cov = sample_covariance(X)
    w = build_whitener(X)
    assert w.inv_sqrt_cov @ cov @ w.inv_sqrt_cov == pytest.approx(np.eye(2))
    assert w.cov_eigenvalues == pytest.approx(np.sort(np.linalg.eigvalsh(cov))[::-1])


def test_build_whitener_small_eigenvalue():
    X = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0 + 1e-9]])
    with pytest.raises(IllConditionedCovarianceError) as err:
        build_whitener(X)
    assert err.value.eigenvalue < 1e-12


def test_whiten_gives_identity_covariance(rng_fixed):
    A = np.array([[2.0, 0.5], [0.3, 1.0]])
    X = rng_fixed.normal(size=(400, 2)) @ A.T + np.array([5.0, -3.0])
    w = build_whitener(X)
    Y = whiten(w, X)
    assert Y.mean(axis=0) == pytest.approx(np.zeros(2), abs=1e-12)
    assert sample_covariance(Y) == pytest.approx(np.eye(2), abs=1e-10)


def test_whiten_mean_row_maps_to_zero(rng_fixed):
    X = rng_fixed.normal(size=(50, 3)) + 7.0
    w = build_whitener(X)
    assert whiten(w, X.mean(axis=0)[None, :]) == pytest.approx(np.zeros((1, 3)), abs=1e-12)


def test_whiten_dimension_mismatch(rng_fixed):
    w = build_whitener(rng_fixed.normal(size=(30, 3)))
    with pytest.raises(ValueError):
        whiten(w, np.zeros((4, 2)))


def test_basis_validation():
    centers = np.zeros((2, 3))
    with pytest.raises(ValueError):
        GaussianDerivBasis(centers, 0.0, 0)
    with pytest.raises(ValueError):
        GaussianDerivBasis(centers, 1.0, 3)
    with pytest.raises(ValueError):
        GaussianDerivBasis(np.zeros(3), 1.0, 0)


def test_basis_eval_at_center_is_zero():
    basis = GaussianDerivBasis(np.array([[1.0, 2.0]]), 0.7, 0)
    assert basis_eval(basis, np.array([1.0, 2.0])) == pytest.approx([0.0])


def test_basis_eval_unit_offset():
    # One center at 0, bandwidth 1: psi(x) = -x exp(-x^2/2) in 1-D.
    basis = GaussianDerivBasis(np.array([[0.0]]), 1.0, 0)
    assert basis_eval(basis, np.array([1.0])) == pytest.approx([-np.exp(-0.5)])
    assert basis_eval(basis, np.array([-1.0])) == pytest.approx([np.exp(-0.5)])


def test_basis_eval_decays():
    basis = GaussianDerivBasis(np.array([[0.0]]), 1.0, 0)
    far = basis_eval(basis, np.array([30.0]))
    assert abs(far[0]) < 1e-100


def test_basis_eval_batch_matches_loop(rng_fixed):
    centers = rng_fixed.normal(size=(4, 3))
    basis = GaussianDerivBasis(centers, 1.3, 1)
    X = rng_fixed.normal(size=(6, 3))
    batch = basis_eval(basis, X)
    assert batch.shape == (6, 4)
    for i in range(6):
        assert batch[i] == pytest.approx(basis_eval(basis, X[i]))


def test_basis_partial_at_center():
    # Second derivative of exp(-x^2/2) at x = 0 is -1.
    basis = GaussianDerivBasis(np.array([[0.0]]), 1.0, 0)
    assert basis_partial(basis, np.array([0.0])) == pytest.approx([-1.0])


def test_basis_partial_even_around_center(rng_fixed):
    centers = rng_fixed.normal(size=(3, 2))
    basis = GaussianDerivBasis(centers, 0.9, 0)
    x = rng_fixed.normal(size=2)
    # The second derivative of a radial bump is even in x - c.
    for k, c in enumerate(centers):
        direct = basis_partial(basis, x)[k]
        mirrored = basis_partial(basis, 2.0 * c - x)[k]
        assert direct == pytest.approx(mirrored)


def test_basis_gradient_at_center():
    basis = GaussianDerivBasis(np.array([[0.0, 0.0]]), 1.0, 0)
    G = basis_gradient(basis, np.array([0.0, 0.0]))
    assert G == pytest.approx(np.array([[-1.0, 0.0]]))


def test_basis_gradient_matches_partial_column(rng_fixed):
    centers = rng_fixed.normal(size=(5, 3))
    basis = GaussianDerivBasis(centers, 1.1, 2)
    x = rng_fixed.normal(size=3)
    G = basis_gradient(basis, x)
    assert G[:, 2] == pytest.approx(basis_partial(basis, x))


def test_basis_gradient_finite_differences(rng_fixed):
    centers = rng_fixed.normal(size=(4, 3))
    basis = GaussianDerivBasis(centers, 0.8, 1)
    x = rng_fixed.normal(size=3)
    G = basis_gradient(basis, x)
    eps = 1e-6
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = eps
        fd = (basis_eval(basis, x + e) - basis_eval(basis, x - e)) / (2 * eps)
        assert G[:, axis] == pytest.approx(fd, abs=1e-7)


@given(st.floats(0.3, 3.0), st.integers(0, 2))
def test_basis_partial_is_derivative_of_eval(bandwidth, axis):
    rng = np.random.default_rng(7)
    centers = rng.normal(size=(3, 3))
    basis = GaussianDerivBasis(centers, bandwidth, axis)
    x = rng.normal(size=3)
    eps = 1e-6
    e = np.zeros(3)
    e[axis] = eps
    fd = (basis_eval(basis, x + e) - basis_eval(basis, x - e)) / (2 * eps)
    assert basis_partial(basis, x) == pytest.approx(fd, abs=1e-6)


def test_symmetric_eig_topm_diagonal():
    vals, V = symmetric_eig_topm(np.diag([3.0, 2.0, 1.0]), 2)
    assert vals == pytest.approx([3.0, 2.0])
    assert np.abs(V) == pytest.approx(np.eye(3)[:, :2])
    # Sign convention: largest-magnitude entry positive.
    assert V[0, 0] > 0 and V[1, 1] > 0


def test_symmetric_eig_topm_identity():
    vals, V = symmetric_eig_topm(np.eye(3), 1)
    assert vals == pytest.approx([1.0])
    assert np.linalg.norm(V[:, 0]) == pytest.approx(1.0)


def test_symmetric_eig_topm_scaling_preserves_span(rng_fixed):
    A = rng_fixed.normal(size=(4, 4))
    M = A @ A.T
    _, V1 = symmetric_eig_topm(M, 2)
    _, V2 = symmetric_eig_topm(10.0 * M, 2)
    P1 = V1 @ V1.T
    P2 = V2 @ V2.T
    assert P1 == pytest.approx(P2)


def test_symmetric_eig_topm_rejects_asymmetric():
    M = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        symmetric_eig_topm(M, 1)


def test_symmetric_eig_topm_rejects_bad_m():
    with pytest.raises(ValueError):
        symmetric_eig_topm(np.eye(2), 0)
    with pytest.raises(ValueError):
        symmetric_eig_topm(np.eye(2), 3)


def test_orthonormalize_diagonal_rescale():
    V = np.array([[2.0, 0.0], [0.0, 3.0]])
    Q = orthonormalize(V)
    # Columns are the identity columns, any order and sign.
    assert np.sort(np.abs(Q).argmax(axis=0)) == pytest.approx([0, 1])
    assert np.abs(Q @ Q.T) == pytest.approx(np.eye(2))


def test_orthonormalize_preserves_span(rng_fixed):
    V = rng_fixed.normal(size=(6, 3))
    Q = orthonormalize(V)
    assert Q.T @ Q == pytest.approx(np.eye(3), abs=1e-12)
    # Same column span: projectors agree.
    P_v = V @ np.linalg.pinv(V)
    assert Q @ Q.T @ V == pytest.approx(P_v @ V)


def test_orthonormalize_duplicate_column():
    v = np.array([[1.0], [2.0], [3.0]])
    with pytest.raises(RankDeficiencyError):
        orthonormalize(np.hstack([v, v]))


def test_orthonormalize_rejects_wide():
    with pytest.raises(ValueError):
        orthonormalize(np.ones((2, 3)))


def test_solve_ridge_zero_rhs():
    z = solve_ridge(np.eye(3), np.zeros(3), 0.5)
    assert z == pytest.approx(np.zeros(3))


def test_solve_ridge_identity():
    # (I + I) z = -h gives z = -h/2.
    h = np.array([2.0, -4.0])
    assert solve_ridge(np.eye(2), h, 1.0) == pytest.approx(-h / 2.0)


def test_solve_ridge_residual(rng_fixed):
    A = rng_fixed.normal(size=(5, 5))
    M = A @ A.T
    v = rng_fixed.normal(size=5)
    z = solve_ridge(M, v, 0.1)
    assert (M + 0.1 * np.eye(5)) @ z == pytest.approx(-v)


def test_solve_ridge_singular():
    with pytest.raises(SingularSystemError):
        solve_ridge(np.zeros((2, 2)), np.array([1.0, 1.0]), 0.0)


@given(
    hnp.arrays(np.float64, (8, 3), elements=st.floats(-50, 50)),
)
def test_whitening_round_trip(X):
    try:
        w = build_whitener(X)
    except IllConditionedCovarianceError:
        return
    Y = whiten(w, X)
    cov = sample_covariance(Y)
    assert np.allclose(cov, np.eye(3), atol=1e-6)
