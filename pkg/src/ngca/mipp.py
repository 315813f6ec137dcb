"""Projection pursuit over a grid of index functions.

Runs a bank of fixed-point pursuits on whitened data, one per
nonlinearity, turns each converged direction into a scale-normalized
index vector, thresholds by norm, and extracts the leading principal
directions of the survivors. The result is mapped back through the
whitening transform.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import rng
from .exceptions import (
    DegenerateDirectionError,
    DegenerateSignalError,
    NoSurvivorsError,
)
from .lsngca import SubspaceEstimate
from .numerics import build_whitener, orthonormalize, standardize, symmetric_eig_topm, whiten

FAMILIES = ("gauss_pow3", "tanh", "sin", "cos")

# Closed parameter range per family; grids are evenly spaced inside.
PARAM_RANGES = {
    "gauss_pow3": (0.5, 5.0),
    "tanh": (0.05, 5.0),
    "sin": (0.05, 4.0),
    "cos": (0.05, 4.0),
}


@dataclass(frozen=True, eq=False)
class NgifSpec:
    """One index function: a nonlinearity plus a unit direction.

    Attributes
    ----------
    family : str
        One of ``FAMILIES``.
    param : float
        Family parameter (kernel width or frequency).
    w : ndarray of shape (d,)
        Current direction, unit Euclidean norm.
    """

    family: str
    param: float
    w: np.ndarray

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        lo, hi = PARAM_RANGES[self.family]
        if not lo <= self.param <= hi:
            raise ValueError(f"param {self.param} outside [{lo}, {hi}]")
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if w.ndim != 1 or abs(np.linalg.norm(w) - 1.0) > 1e-8:
            raise ValueError("w must be a unit vector")


@dataclass(frozen=True)
class MippConfig:
    per_family_count: int = 1000
    fastica_iters: int = 10
    tau: float = 1.6
    seed: int = 0

    def __post_init__(self):
        if self.per_family_count < 1:
            raise ValueError("per_family_count must be positive")
        if self.fastica_iters < 1:
            raise ValueError("fastica_iters must be positive")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")


def _family_eval(family: str, param, Z):
    """Value and derivative of a family nonlinearity, broadcasting over Z."""
    if family == "gauss_pow3":
        E = np.exp(-(Z * Z) / (2.0 * param * param))
        return Z**3 * E, (3.0 * Z * Z - Z**4 / (param * param)) * E
    if family == "tanh":
        s = np.tanh(param * Z)
        return s, param * (1.0 - s * s)
    if family == "sin":
        return np.sin(param * Z), param * np.cos(param * Z)
    if family == "cos":
        return np.cos(param * Z), -param * np.sin(param * Z)
    raise ValueError(f"unknown family {family!r}")


def ngif_eval(spec: NgifSpec, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nonlinearity value and derivative at projections `z`."""
    z = np.asarray(z, dtype=float)
    return _family_eval(spec.family, spec.param, z)


def ngif_grid(config: MippConfig, d: int) -> list[NgifSpec]:
    """Full bank of index functions for data dimension `d`.

    Parameters are evenly spaced over each family's closed range
    (endpoints included); each spec gets an independent seeded random
    initial direction, uniform on the unit sphere.
    """
    generator = rng.substream(config.seed, rng.MIPP_INIT)
    specs = []
    for family in FAMILIES:
        lo, hi = PARAM_RANGES[family]
        if config.per_family_count == 1:
            params = np.array([lo])
        else:
            params = np.linspace(lo, hi, config.per_family_count)
        for param in params:
            w = generator.standard_normal(d)
            w /= np.linalg.norm(w)
            specs.append(NgifSpec(family, float(param), w))
    return specs


def fastica_update(Y: np.ndarray, spec: NgifSpec) -> NgifSpec:
    """One fixed-point iteration on whitened data.

    Raises
    ------
    DegenerateDirectionError
        If the unnormalized update has norm below 1e-12.
    """
    Y = np.asarray(Y, dtype=float)
    s, ds = ngif_eval(spec, Y @ spec.w)
    update = Y.T @ s - ds.sum() * spec.w
    norm = np.linalg.norm(update)
    if norm < 1e-12:
        raise DegenerateDirectionError(f"update norm {norm:.3e}")
    return replace(spec, w=update / norm)


def compute_beta(Y: np.ndarray, spec: NgifSpec) -> np.ndarray:
    """Raw index vector ``mean_i [y_i s(w.y_i) - s'(w.y_i) w]``.

    On purely Gaussian whitened data this is a Stein identity residual
    and shrinks to zero as the sample grows.
    """
    Y = np.asarray(Y, dtype=float)
    s, ds = ngif_eval(spec, Y @ spec.w)
    return (Y.T @ s - ds.sum() * spec.w) / Y.shape[0]


def normalize_beta(Y: np.ndarray, spec: NgifSpec, beta: np.ndarray) -> np.ndarray:
    """Scale an index vector by the standard error of its estimate.

    Divides by ``sqrt((mean ||y s - s' w||^2 - ||beta||^2) / n)``, the
    estimated sampling noise of the mean in `beta`. Under a Gaussian
    null the scaled norm is O(1) regardless of n, so a fixed threshold
    separates noise directions from genuine signal.

    Raises
    ------
    DegenerateSignalError
        If the radicand is at or below 1e-12; the vector carries no
        usable scale and must be dropped.
    """
    Y = np.asarray(Y, dtype=float)
    beta = np.asarray(beta, dtype=float)
    s, ds = ngif_eval(spec, Y @ spec.w)
    M = Y * s[:, None] - ds[:, None] * spec.w[None, :]
    radicand = (M * M).sum(axis=1).mean() - beta @ beta
    if radicand <= 1e-12:
        raise DegenerateSignalError(f"radicand {radicand:.3e}")
    return beta / np.sqrt(radicand / Y.shape[0])


def _pursue_family(Y, family, params, W, iters):
    """Vectorized pursuit of every spec in one family.

    W holds one unit column per spec. Returns the normalized index
    vectors (columns), plus a boolean mask of specs that degenerated.
    """
    n = Y.shape[0]
    dead = np.zeros(params.size, dtype=bool)
    for _ in range(iters):
        S, dS = _family_eval(family, params[None, :], Y @ W)
        U = Y.T @ S - W * dS.sum(axis=0)[None, :]
        norms = np.linalg.norm(U, axis=0)
        dead |= norms < 1e-12
        safe = np.where(dead, 1.0, norms)
        W = np.where(dead[None, :], W, U / safe[None, :])
    S, dS = _family_eval(family, params[None, :], Y @ W)
    B = (Y.T @ S - W * dS.sum(axis=0)[None, :]) / n
    # mean ||y_i s - s' w||^2 per spec, using ||w|| = 1.
    ynorm2 = (Y * Y).sum(axis=1)
    msq = (S * S * ynorm2[:, None] + dS * dS - 2.0 * S * dS * (Y @ W)).mean(axis=0)
    radicand = msq - (B * B).sum(axis=0)
    dead |= radicand <= 1e-12
    safe = np.where(dead, 1.0, radicand)
    return B / np.sqrt(safe / n)[None, :], dead


def mipp_fit(X: np.ndarray, m: int, config: MippConfig) -> SubspaceEstimate:
    """Estimate an m-dimensional non-Gaussian subspace of `X`.

    Pipeline: standardize, whiten, pursue the full bank of index
    functions, normalize, keep vectors with norm >= ``config.tau``,
    take the leading principal directions of the survivors, map back
    through the whitener, re-orthonormalize.

    The returned basis lives in the standardized coordinates of `X`.

    Raises
    ------
    NoSurvivorsError
        If no index vector reaches the threshold.
    """
    Xs, _, _ = standardize(X)
    wh = build_whitener(Xs)
    Y = whiten(wh, Xs)
    d = Y.shape[1]
    specs = ngif_grid(config, d)
    columns = []
    for family in FAMILIES:
        group = [s for s in specs if s.family == family]
        params = np.array([s.param for s in group])
        W = np.stack([s.w for s in group], axis=1)
        B, dead = _pursue_family(Y, family, params, W, config.fastica_iters)
        columns.append(B[:, ~dead])
    B_all = np.concatenate(columns, axis=1)
    norms = np.linalg.norm(B_all, axis=0)
    survivors = B_all[:, norms >= config.tau]
    if survivors.shape[1] == 0:
        raise NoSurvivorsError(config.tau, float(norms.max(initial=0.0)))
    _, V = symmetric_eig_topm(survivors @ survivors.T, m)
    return SubspaceEstimate(orthonormalize(wh.inv_sqrt_cov @ V), "mipp")
