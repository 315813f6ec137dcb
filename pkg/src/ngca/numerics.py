"""Shared numerical primitives.

Conventions used throughout the package:

* covariances and standard deviations divide by ``n``, not ``n - 1``;
* eigenvectors are returned with their largest-magnitude entry positive;
* whitening fails hard when the covariance is ill conditioned, it is
  never regularized.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import (
    ConstantFeatureError,
    IllConditionedCovarianceError,
    RankDeficiencyError,
    SingularSystemError,
)


def standardize(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Scale each column to empirical mean 0 and variance 1.

    Parameters
    ----------
    X : ndarray of shape (n, d)
        Data matrix, one sample per row.

    Returns
    -------
    Xs : ndarray of shape (n, d)
        Standardized data.
    means : ndarray of shape (d,)
        Per-column means.
    scales : ndarray of shape (d,)
        Per-column standard deviations (population convention).

    Raises
    ------
    ConstantFeatureError
        If a column has zero empirical variance.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a 2-D data matrix")
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    zero = np.flatnonzero(scales == 0.0)
    if zero.size:
        raise ConstantFeatureError(int(zero[0]))
    return (X - means) / scales, means, scales


def sample_covariance(X: np.ndarray) -> np.ndarray:
    """Population covariance (divide by n) of the rows of `X`."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("expected a nonempty 2-D data matrix")
    Xc = X - X.mean(axis=0)
    return (Xc.T @ Xc) / X.shape[0]


@dataclass(frozen=True)
class Whitener:
    """Affine map taking data to zero mean and identity covariance.

    Attributes
    ----------
    mean : ndarray of shape (d,)
    inv_sqrt_cov : ndarray of shape (d, d)
        Symmetric inverse square root of the sample covariance.
    cov_eigenvalues : ndarray of shape (d,)
        Covariance spectrum in descending order.
    """

    mean: np.ndarray
    inv_sqrt_cov: np.ndarray
    cov_eigenvalues: np.ndarray


def build_whitener(X: np.ndarray, min_eigenvalue: float = 1e-12) -> Whitener:
    """Fit a whitening transform to `X`.

    Raises
    ------
    IllConditionedCovarianceError
        If the smallest covariance eigenvalue falls below `min_eigenvalue`.
        The offending eigenvalue rides on the exception.
    """
    cov = sample_covariance(X)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if eigvals[0] < min_eigenvalue:
        raise IllConditionedCovarianceError(float(eigvals[0]), float(min_eigenvalue))
    inv_sqrt = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
    return Whitener(
        mean=np.asarray(X, dtype=float).mean(axis=0),
        inv_sqrt_cov=inv_sqrt,
        cov_eigenvalues=eigvals[::-1].copy(),
    )


def whiten(w: Whitener, X: np.ndarray) -> np.ndarray:
    """Apply a fitted whitener to rows of `X`."""
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != w.mean.shape[0]:
        raise ValueError(
            f"data has {X.shape[-1]} columns, whitener expects {w.mean.shape[0]}"
        )
    return (X - w.mean) @ w.inv_sqrt_cov


@dataclass(frozen=True)
class GaussianDerivBasis:
    """Partial derivatives of Gaussian bumps, used as basis functions.

    The k-th basis function is the `deriv_index` partial derivative of
    ``exp(-||x - c_k||^2 / (2 bandwidth^2))``.

    Attributes
    ----------
    centers : ndarray of shape (k, d)
    bandwidth : float
        Positive kernel width, shared by all centers.
    deriv_index : int
        Differentiation axis, 0-based.
    """

    centers: np.ndarray
    bandwidth: float
    deriv_index: int

    def __post_init__(self):
        if self.centers.ndim != 2:
            raise ValueError("centers must be a (k, d) array")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if not 0 <= self.deriv_index < self.centers.shape[1]:
            raise ValueError("deriv_index out of range")


def squared_distances(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, shape (n, k), clipped at 0."""
    sq = (
        (X * X).sum(axis=1)[:, None]
        + (centers * centers).sum(axis=1)[None, :]
        - 2.0 * (X @ centers.T)
    )
    return np.maximum(sq, 0.0)


def gauss_kernel(sqdist: np.ndarray, bandwidth: float) -> np.ndarray:
    """Gaussian kernel values from precomputed squared distances."""
    return np.exp(-sqdist / (2.0 * bandwidth * bandwidth))


def _as_rows(basis: GaussianDerivBasis, x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != basis.centers.shape[1]:
        raise ValueError(
            f"point has {X.shape[1]} coordinates, basis expects"
            f" {basis.centers.shape[1]}"
        )
    return X, single


def basis_eval(basis: GaussianDerivBasis, x: np.ndarray) -> np.ndarray:
    """Evaluate all basis functions at `x`.

    Accepts a single point of shape (d,) or a batch of shape (n, d) and
    returns shape (k,) or (n, k) accordingly.
    """
    X, single = _as_rows(basis, x)
    s2 = basis.bandwidth * basis.bandwidth
    K = gauss_kernel(squared_distances(X, basis.centers), basis.bandwidth)
    diff = X[:, basis.deriv_index, None] - basis.centers[None, :, basis.deriv_index]
    out = -(diff / s2) * K
    return out[0] if single else out


def basis_partial(basis: GaussianDerivBasis, x: np.ndarray) -> np.ndarray:
    """Partial derivative of each basis function along its own axis.

    This is the second partial of the underlying Gaussian bump along
    `deriv_index`. Shapes follow :func:`basis_eval`.
    """
    X, single = _as_rows(basis, x)
    s2 = basis.bandwidth * basis.bandwidth
    K = gauss_kernel(squared_distances(X, basis.centers), basis.bandwidth)
    diff = X[:, basis.deriv_index, None] - basis.centers[None, :, basis.deriv_index]
    out = ((diff * diff / s2 - 1.0) / s2) * K
    return out[0] if single else out


def basis_gradient(basis: GaussianDerivBasis, x: np.ndarray) -> np.ndarray:
    """Full gradient of each basis function at `x`.

    Returns shape (k, d) for a single point, (n, k, d) for a batch.
    """
    X, single = _as_rows(basis, x)
    j = basis.deriv_index
    s2 = basis.bandwidth * basis.bandwidth
    K = gauss_kernel(squared_distances(X, basis.centers), basis.bandwidth)
    diff_all = X[:, None, :] - basis.centers[None, :, :]
    out = (K * diff_all[:, :, j] / (s2 * s2))[:, :, None] * diff_all
    out[:, :, j] -= K / s2
    return out[0] if single else out


def symmetric_eig_topm(M: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Leading eigenpairs of a symmetric matrix.

    Parameters
    ----------
    M : ndarray of shape (d, d)
        Must be symmetric within 1e-10 relative to its largest entry.
    m : int
        Number of leading eigenpairs, 1 <= m <= d.

    Returns
    -------
    eigvals : ndarray of shape (m,)
        Largest eigenvalues in descending order.
    V : ndarray of shape (d, m)
        Matching eigenvectors; each column has its largest-magnitude
        entry positive.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if not 1 <= m <= M.shape[0]:
        raise ValueError("m out of range")
    scale = max(1.0, np.abs(M).max())
    if np.abs(M - M.T).max() > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    eigvals, eigvecs = np.linalg.eigh((M + M.T) / 2.0)
    order = np.argsort(-eigvals, kind="stable")[:m]
    vals = eigvals[order]
    V = eigvecs[:, order].copy()
    for col in range(m):
        lead = np.argmax(np.abs(V[:, col]))
        if V[lead, col] < 0:
            V[:, col] = -V[:, col]
    return vals, V


def orthonormalize(V: np.ndarray) -> np.ndarray:
    """Orthonormal basis for the column span of `V`.

    Uses column-pivoted QR. Columns of the result are orthonormal and
    span the same space as `V`.

    Raises
    ------
    RankDeficiencyError
        If the numerical rank of `V` is below its column count
        (tolerance 1e-10 relative to the largest column norm).
    """
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[1] < 1 or V.shape[0] < V.shape[1]:
        raise ValueError("expected a tall (d, m) matrix with m >= 1")
    m = V.shape[1]
    Q, R, _ = scipy.linalg.qr(V, mode="economic", pivoting=True)
    tol = 1e-10 * np.linalg.norm(V, axis=0).max()
    rank = int(np.sum(np.abs(np.diag(R)) > tol))
    if rank < m:
        raise RankDeficiencyError(f"rank {rank} below column count {m}")
    return Q[:, :m]


def solve_ridge(M: np.ndarray, v: np.ndarray, ridge: float) -> np.ndarray:
    """Solve ``(M + ridge * I) z = -v`` for symmetric PSD `M`.

    Raises
    ------
    SingularSystemError
        If the shifted system is singular or the solution fails a
        residual check at 1e-8 relative accuracy.
    """
    M = np.asarray(M, dtype=float)
    v = np.asarray(v, dtype=float)
    A = M + ridge * np.eye(M.shape[0])
    try:
        z = np.linalg.solve(A, -v)
    except np.linalg.LinAlgError as err:
        raise SingularSystemError(str(err)) from err
    residual = np.linalg.norm(A @ z + v)
    if not residual <= 1e-8 * (1.0 + np.linalg.norm(v)):
        raise SingularSystemError(f"residual {residual:.3e} too large")
    return z
