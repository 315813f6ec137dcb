"""Non-Gaussian subspace estimation on whitened data.

After whitening, the non-Gaussian directions are spanned by
``u(y) = grad log p(y) + y``: the Gaussian part of the score cancels
against the identity term. The span is recovered from the leading
eigenvectors of the second moment of u over the sample, then mapped
back through the whitening transform.
"""

from dataclasses import dataclass

import numpy as np

from .lsldg import CvGrid, GradientModel, fit_lsldg, predict_gradient
from .numerics import (
    build_whitener,
    orthonormalize,
    standardize,
    symmetric_eig_topm,
    whiten,
)

METHOD_TAGS = ("lsngca", "wf_lsngca", "mipp", "pca")


@dataclass(frozen=True, eq=False)
class SubspaceEstimate:
    """Orthonormal basis of an estimated non-Gaussian subspace.

    Attributes
    ----------
    basis : ndarray of shape (d, m)
        Columns are orthonormal within 1e-10.
    method_tag : str
        Which estimator produced the basis.
    """

    basis: np.ndarray
    method_tag: str

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        object.__setattr__(self, "basis", B)
        if B.ndim != 2 or not 1 <= B.shape[1] <= B.shape[0]:
            raise ValueError("basis must be a tall (d, m) matrix")
        gram = B.T @ B
        if np.abs(gram - np.eye(B.shape[1])).max() > 1e-10:
            raise ValueError("basis columns are not orthonormal")
        if self.method_tag not in METHOD_TAGS:
            raise ValueError(f"unknown method tag {self.method_tag!r}")


def compute_u(Y: np.ndarray, g: GradientModel) -> np.ndarray:
    """Score-plus-identity field on whitened data, shape (n, d)."""
    Y = np.asarray(Y, dtype=float)
    return predict_gradient(g, Y) + Y


def lsngca_fit(X: np.ndarray, m: int, grid: CvGrid, b: int = 100) -> SubspaceEstimate:
    """Estimate an m-dimensional non-Gaussian subspace of `X`.

    Pipeline: standardize, whiten (hard failure when the covariance is
    ill conditioned), fit the log-density gradient on the whitened
    data, eigendecompose the second moment of u, map the leading
    eigenvectors back through the whitener, re-orthonormalize.

    The returned basis lives in the standardized coordinates of `X`.
    """
    Xs, _, _ = standardize(X)
    w = build_whitener(Xs)
    Y = whiten(w, Xs)
    g = fit_lsldg(Y, grid, b)
    U = compute_u(Y, g)
    _, V = symmetric_eig_topm(U.T @ U, m)
    return SubspaceEstimate(orthonormalize(w.inv_sqrt_cov @ V), "lsngca")
