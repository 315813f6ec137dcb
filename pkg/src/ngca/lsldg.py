"""Least-squares estimation of the log-density gradient.

Each partial derivative of the log density is modeled as a linear
combination of Gaussian-derivative basis functions. The squared-loss
objective admits a closed-form ridge solution per dimension; bandwidth
and ridge strength are chosen by k-fold cross-validation on the
hold-out value of that objective.
"""

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .exceptions import SingularSystemError
from .numerics import (
    GaussianDerivBasis,
    basis_eval,
    basis_gradient,
    basis_partial,
    gauss_kernel,
    solve_ridge,
    squared_distances,
)


@dataclass(frozen=True, eq=False)
class CvGrid:
    """Cross-validation grid shared by the gradient-style estimators.

    Defaults follow common practice for this family of estimators:
    10 log-spaced bandwidths in [1e-1, 1e1], 10 log-spaced ridge
    strengths in [1e-5, 1e1], 5 folds.
    """

    sigma_candidates: np.ndarray = field(
        default_factory=lambda: np.logspace(-1.0, 1.0, 10)
    )
    lambda_candidates: np.ndarray = field(
        default_factory=lambda: np.logspace(-5.0, 1.0, 10)
    )
    fold_count: int = 5
    seed: int = 0

    def __post_init__(self):
        sig = np.asarray(self.sigma_candidates, dtype=float)
        lam = np.asarray(self.lambda_candidates, dtype=float)
        object.__setattr__(self, "sigma_candidates", sig)
        object.__setattr__(self, "lambda_candidates", lam)
        if sig.ndim != 1 or sig.size == 0 or np.any(sig <= 0):
            raise ValueError("sigma_candidates must be positive")
        if lam.ndim != 1 or lam.size == 0 or np.any(lam < 0):
            raise ValueError("lambda_candidates must be nonnegative")
        if self.fold_count < 2:
            raise ValueError("fold_count must be at least 2")


@dataclass(frozen=True, eq=False)
class CvReport:
    """Selected hyperparameters and the full hold-out loss surface."""

    sigma_selected: np.ndarray  # (d,)
    lambda_selected: np.ndarray  # (d,)
    losses: np.ndarray  # (d, n_sigma, n_lambda)


@dataclass(frozen=True, eq=False)
class GradientModel:
    """Fitted log-density gradient model.

    Attributes
    ----------
    centers : ndarray of shape (b, d)
        Gaussian centers, shared across output dimensions.
    bandwidths : ndarray of shape (d,)
        Selected kernel width per output dimension.
    ridges : ndarray of shape (d,)
        Selected ridge strength per output dimension.
    weights : ndarray of shape (b, d)
        Column j holds the coefficients of the j-th partial model.
    """

    centers: np.ndarray
    bandwidths: np.ndarray
    ridges: np.ndarray
    weights: np.ndarray

    def basis(self, j: int) -> GaussianDerivBasis:
        return GaussianDerivBasis(self.centers, float(self.bandwidths[j]), j)


def assemble_G_h(
    X: np.ndarray, basis_j: GaussianDerivBasis
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical Gram matrix and mean basis derivative.

    Returns ``G = mean_i psi(x_i) psi(x_i)^T`` and
    ``h = mean_i d_j psi(x_i)``.
    """
    Psi = basis_eval(basis_j, X)
    dPsi = basis_partial(basis_j, X)
    n = Psi.shape[0]
    return (Psi.T @ Psi) / n, dPsi.mean(axis=0)


def solve_theta(G: np.ndarray, h: np.ndarray, lam: float) -> np.ndarray:
    """Closed-form coefficients: minimizer of the regularized loss.

    Solves ``(G + lam I) theta = -h``.
    """
    return solve_ridge(G, h, lam)


def lsldg_holdout_loss(
    basis_j: GaussianDerivBasis, theta_j: np.ndarray, X_val: np.ndarray
) -> float:
    """Hold-out value of the per-dimension objective.

    The loss is ``mean[g^2 + 2 d_j g]``; up to a constant it tracks the
    squared error against the true log-density partial.
    """
    g = basis_eval(basis_j, X_val) @ theta_j
    dg = basis_partial(basis_j, X_val) @ theta_j
    return float(np.mean(g * g + 2.0 * dg))


def fold_indices(n: int, fold_count: int, generator: np.random.Generator) -> list:
    """Disjoint validation folds: contiguous blocks of one shuffled range."""
    if fold_count > n:
        raise ValueError("more folds than samples")
    perm = generator.permutation(n)
    return np.array_split(perm, fold_count)


def _design(X, centers, sqd, sigma, j):
    """Basis values and own-axis partials for all rows of X at once."""
    s2 = sigma * sigma
    K = gauss_kernel(sqd, sigma)
    diff = X[:, j, None] - centers[None, :, j]
    Psi = -(diff / s2) * K
    dPsi = ((diff * diff / s2 - 1.0) / s2) * K
    return Psi, dPsi

def _ridge_path(G, h, ridges):
    """Solutions of (G + r I) z = -h for every r in `ridges`, shape (L, b)."""
    b = G.shape[0]
    A = G[None, :, :] + ridges[:, None, None] * np.eye(b)[None, :, :]
    B = np.tile(-h, (ridges.size, 1))[:, :, None]
    try:
        return np.linalg.solve(A, B)[:, :, 0]
    except np.linalg.LinAlgError as err:
        raise SingularSystemError(str(err)) from err


def _select(losses, sigmas, lambdas):
    """Grid cell with the lowest loss; ties go to smaller sigma, then lambda."""
    best = losses.min()
    rows, cols = np.nonzero(losses == best)
    order = np.lexsort((lambdas[cols], sigmas[rows]))
    pick = order[0]
    return rows[pick], cols[pick]


def lsldg_cv(X: np.ndarray, centers: np.ndarray, grid: CvGrid) -> CvReport:
    """Cross-validate bandwidth and ridge strength for every dimension.

    Folds are contiguous blocks of a single seeded shuffle, shared by
    all dimensions and all grid cells.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    folds = fold_indices(n, grid.fold_count, rng.substream(grid.seed, rng.LSLDG_FOLDS))
    sigmas = grid.sigma_candidates
    lambdas = grid.lambda_candidates
    losses = np.zeros((d, sigmas.size, lambdas.size))
    sqd = squared_distances(X, centers)
    for j in range(d):
        for si, sigma in enumerate(sigmas):
            Psi, dPsi = _design(X, centers, sqd, sigma, j)
            S_full = Psi.T @ Psi
            h_full = dPsi.sum(axis=0)
            fold_losses = np.zeros(lambdas.size)
            for val in folds:
                Psi_val = Psi[val]
                dPsi_val = dPsi[val]
                n_tr = n - val.size
                G_tr = (S_full - Psi_val.T @ Psi_val) / n_tr
                h_tr = (h_full - dPsi_val.sum(axis=0)) / n_tr
                Theta = _ridge_path(G_tr, h_tr, lambdas)
                g_val = Psi_val @ Theta.T
                dg_val = dPsi_val @ Theta.T
                fold_losses += (g_val * g_val + 2.0 * dg_val).mean(axis=0)
            losses[j, si] = fold_losses / len(folds)
    sig_sel = np.empty(d)
    lam_sel = np.empty(d)
    for j in range(d):
        si, li = _select(losses[j], sigmas, lambdas)
        sig_sel[j] = sigmas[si]
        lam_sel[j] = lambdas[li]
    return CvReport(sig_sel, lam_sel, losses)


def fit_lsldg(X: np.ndarray, grid: CvGrid, b: int = 100) -> GradientModel:
    """Fit the log-density gradient on `X`.

    Samples `b` centers from the rows of `X` without replacement,
    cross-validates per dimension, then solves each dimension on the
    full data at the selected hyperparameters.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if b > n:
        raise ValueError(f"cannot sample {b} centers from {n} points")
    idx = rng.substream(grid.seed, rng.LSLDG_CENTERS).choice(n, size=b, replace=False)
    centers = X[idx]
    report = lsldg_cv(X, centers, grid)
    weights = np.empty((b, d))
    for j in range(d):
        basis_j = GaussianDerivBasis(centers, float(report.sigma_selected[j]), j)
        G, h = assemble_G_h(X, basis_j)
        weights[:, j] = solve_theta(G, h, float(report.lambda_selected[j]))
    return GradientModel(centers, report.sigma_selected, report.lambda_selected, weights)


def predict_gradient(model: GradientModel, x: np.ndarray) -> np.ndarray:
    """Estimated log-density gradient at `x` ((d,) point or (n, d) batch)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    out = np.empty_like(X)
    for j in range(X.shape[1]):
        out[:, j] = basis_eval(model.basis(j), X) @ model.weights[:, j]
    return out[0] if single else out


def predict_gradient_jacobian(model: GradientModel, x: np.ndarray) -> np.ndarray:
    """Jacobian of the estimated gradient at a single point, shape (d, d).

    Row j is the gradient of the j-th fitted partial model.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a single point")
    d = x.shape[0]
    J = np.empty((d, d))
    for j in range(d):
        J[j] = model.weights[:, j] @ basis_gradient(model.basis(j), x)
    return J


def gradient_jacobian_dot(model: GradientModel, X: np.ndarray) -> np.ndarray:
    """Rows of the gradient Jacobian dotted with the evaluation point.

    Returns A with ``A[i, j] = grad(model_j)(x_i) . x_i``, evaluated
    without materializing per-point Jacobians.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    C = model.centers
    sqd = squared_distances(X, C)
    P = (X * X).sum(axis=1)[:, None] - X @ C.T
    A = np.empty((n, d))
    for j in range(d):
        sigma = float(model.bandwidths[j])
        s2 = sigma * sigma
        K = gauss_kernel(sqd, sigma)
        diff = X[:, j, None] - C[None, :, j]
        term = K * (diff * P / (s2 * s2) - X[:, j, None] / s2)
        A[:, j] = term @ model.weights[:, j]
    return A
