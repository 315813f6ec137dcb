"""Whitening-free non-Gaussian subspace estimation.

Works directly on standardized data. The field
``v(x) = grad log p(x) - hess log p(x) x`` spans the non-Gaussian
subspace without any whitening step, so the method stays usable when
the covariance is too ill conditioned to invert. Each component of v
is fitted by least squares with a plug-in estimate of the log-density
gradient supplying the Hessian-times-x term through integration by
parts.
"""

from dataclasses import dataclass

import numpy as np

from . import rng
from .lsldg import (
    CvGrid,
    CvReport,
    GradientModel,
    _design,
    _ridge_path,
    _select,
    fit_lsldg,
    fold_indices,
    gradient_jacobian_dot,
)
from .lsngca import SubspaceEstimate
from .numerics import (
    GaussianDerivBasis,
    basis_eval,
    basis_partial,
    solve_ridge,
    squared_distances,
    symmetric_eig_topm,
)


@dataclass(frozen=True, eq=False)
class VectorFieldModel:
    """Fitted model of the whitening-free field v.

    Attributes
    ----------
    centers : ndarray of shape (t, d)
    bandwidths : ndarray of shape (d,)
    ridges : ndarray of shape (d,)
    weights : ndarray of shape (t, d)
        Column j holds the coefficients of the j-th component model.
    plug_in : GradientModel
        The frozen log-density gradient estimate used in fitting.
    """

    centers: np.ndarray
    bandwidths: np.ndarray
    ridges: np.ndarray
    weights: np.ndarray
    plug_in: GradientModel

    def basis(self, j: int) -> GaussianDerivBasis:
        return GaussianDerivBasis(self.centers, float(self.bandwidths[j]), j)


def assemble_S_t(
    X: np.ndarray, basis_j: GaussianDerivBasis, g: GradientModel
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical Gram matrix and linear term for one component of v.

    ``S = mean_i phi(x_i) phi(x_i)^T`` and
    ``t = mean_i [d_j phi(x_i) + phi(x_i) (grad g_j(x_i) . x_i)]``,
    with the plug-in gradient model `g` supplying the Jacobian term.
    """
    X = np.asarray(X, dtype=float)
    Phi = basis_eval(basis_j, X)
    dPhi = basis_partial(basis_j, X)
    a = gradient_jacobian_dot(g, X)[:, basis_j.deriv_index]
    n = Phi.shape[0]
    S = (Phi.T @ Phi) / n
    t = (dPhi + Phi * a[:, None]).mean(axis=0)
    return S, t


def solve_alpha(S: np.ndarray, t: np.ndarray, gamma: float) -> np.ndarray:
    """Closed-form coefficients: solves ``(S + gamma I) alpha = -t``."""
    return solve_ridge(S, t, gamma)


def wf_holdout_loss(
    basis_j: GaussianDerivBasis,
    alpha_j: np.ndarray,
    g: GradientModel,
    X_val: np.ndarray,
) -> float:
    """Hold-out value of the objective for one component of v."""
    X_val = np.asarray(X_val, dtype=float)
    w = basis_eval(basis_j, X_val) @ alpha_j
    dw = basis_partial(basis_j, X_val) @ alpha_j
    a = gradient_jacobian_dot(g, X_val)[:, basis_j.deriv_index]
    return float(np.mean(w * w + 2.0 * dw + 2.0 * w * a))


def wf_cv(
    X: np.ndarray, centers: np.ndarray, g: GradientModel, grid: CvGrid
) -> CvReport:
    """Cross-validate bandwidth and ridge strength for every component.

    The plug-in gradient model `g` is frozen: it is evaluated on all of
    `X` once and never refitted per fold.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    folds = fold_indices(n, grid.fold_count, rng.substream(grid.seed, rng.WF_FOLDS))
    sigmas = grid.sigma_candidates
    gammas = grid.lambda_candidates
    losses = np.zeros((d, sigmas.size, gammas.size))
    sqd = squared_distances(X, centers)
    A = gradient_jacobian_dot(g, X)
    for j in range(d):
        a = A[:, j]
        for si, sigma in enumerate(sigmas):
            Phi, dPhi = _design(X, centers, sqd, sigma, j)
            S_full = Phi.T @ Phi
            t_full = dPhi.sum(axis=0) + Phi.T @ a
            fold_losses = np.zeros(gammas.size)
            for val in folds:
                Phi_val = Phi[val]
                dPhi_val = dPhi[val]
                a_val = a[val]
                n_tr = n - val.size
                S_tr = (S_full - Phi_val.T @ Phi_val) / n_tr
                t_tr = (t_full - dPhi_val.sum(axis=0) - Phi_val.T @ a_val) / n_tr
                Alpha = _ridge_path(S_tr, t_tr, gammas)
                w_val = Phi_val @ Alpha.T
                dw_val = dPhi_val @ Alpha.T
                fold_losses += (
                    w_val * w_val + 2.0 * dw_val + 2.0 * w_val * a_val[:, None]
                ).mean(axis=0)
            losses[j, si] = fold_losses / len(folds)
    sig_sel = np.empty(d)
    gam_sel = np.empty(d)
    for j in range(d):
        si, gi = _select(losses[j], sigmas, gammas)
        sig_sel[j] = sigmas[si]
        gam_sel[j] = gammas[gi]
    return CvReport(sig_sel, gam_sel, losses)


def fit_wf(X: np.ndarray, grid: CvGrid, t: int = 100) -> VectorFieldModel:
    """Fit the whitening-free field on standardized data `X`.

    Fits the plug-in gradient model first (its own cross-validation,
    `t` centers), freezes it, then cross-validates and solves each
    component of v on the full data.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if t > n:
        raise ValueError(f"cannot sample {t} centers from {n} points")
    plug_in = fit_lsldg(X, grid, b=t)
    idx = rng.substream(grid.seed, rng.WF_CENTERS).choice(n, size=t, replace=False)
    centers = X[idx]
    report = wf_cv(X, centers, plug_in, grid)
    weights = np.empty((t, d))
    for j in range(d):
        basis_j = GaussianDerivBasis(centers, float(report.sigma_selected[j]), j)
        S, t_vec = assemble_S_t(X, basis_j, plug_in)
        weights[:, j] = solve_alpha(S, t_vec, float(report.lambda_selected[j]))
    return VectorFieldModel(
        centers, report.sigma_selected, report.lambda_selected, weights, plug_in
    )


def predict_v(model: VectorFieldModel, x: np.ndarray) -> np.ndarray:
    """Estimated field v at `x` ((d,) point or (n, d) batch)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    out = np.empty_like(X)
    for j in range(X.shape[1]):
        out[:, j] = basis_eval(model.basis(j), X) @ model.weights[:, j]
    return out[0] if single else out


def wf_fit_subspace(
    X: np.ndarray, m: int, grid: CvGrid, t: int = 100
) -> SubspaceEstimate:
    """Estimate an m-dimensional non-Gaussian subspace without whitening.

    `X` must already be standardized; the returned basis lives in those
    coordinates directly, no back-mapping is involved.
    """
    model = fit_wf(X, grid, t)
    V = predict_v(model, X)
    _, B = symmetric_eig_topm(V.T @ V, m)
    return SubspaceEstimate(B, "wf_lsngca")
