"""Data generation and IO.

Synthetic benchmark: a 2-D non-Gaussian signal embedded in the first
two coordinates, plus an 8-D Gaussian noise block whose conditioning
is controlled by a severity knob r. At r = 0 the noise is isotropic;
larger r spreads the noise spectrum over [1e-2r, 1e2r] before a fixed
chain of plane rotations mixes the components and each noise column is
rescaled to unit variance.
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import rng
from .exceptions import LibsvmFormatError
from .numerics import sample_covariance, standardize

DISTRIBUTIONS = ("gauss_mixture", "dep_super", "dep_sub", "dep_super_sub")

D_SIGNAL = 2
D_NOISE = 8


@dataclass(frozen=True)
class ArtificialSpec:
    """Recipe for one synthetic dataset."""

    dist: str
    r: float
    n: int
    seed: int

    def __post_init__(self):
        if self.dist not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.dist!r}")
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if self.n < 1:
            raise ValueError("n must be positive")


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature matrix with binary labels in {-1, +1}."""

    X: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "labels", labels)
        if X.ndim != 2 or labels.ndim != 1 or X.shape[0] != labels.shape[0]:
            raise ValueError("X and labels must have matching first dimension")
        if labels.size and not np.isin(labels, (-1, 1)).all():
            raise ValueError("labels must be -1 or +1")


def sample_signal(dist: str, n: int, seed: int) -> np.ndarray:
    """Draw n samples of the 2-D non-Gaussian signal `dist`.

    gauss_mixture
        Coordinates iid from an equal mixture of N(-3, 1) and N(3, 1).
    dep_super
        Super-Gaussian, density proportional to exp(-||s||): uniform
        direction with Gamma(2, 1) radius.
    dep_sub
        Sub-Gaussian, uniform on the unit disk: uniform direction,
        sqrt-law radius.
    dep_super_sub
        Mixed: first coordinate standard Laplace (inverse CDF); second
        uniform on [c, c + 1] with c = 0 when |s1| <= log 2 and c = -1
        otherwise.
    """
    generator = rng.substream(seed, rng.SIGNAL)
    if dist == "gauss_mixture":
        shift = 3.0 * (2.0 * generator.integers(0, 2, size=(n, 2)) - 1.0)
        return generator.standard_normal((n, 2)) + shift
    if dist == "dep_super":
        radius = generator.gamma(2.0, 1.0, size=n)
        angle = generator.uniform(0.0, 2.0 * np.pi, size=n)
        return radius[:, None] * np.column_stack([np.cos(angle), np.sin(angle)])
    if dist == "dep_sub":
        radius = np.sqrt(generator.uniform(0.0, 1.0, size=n))
        angle = generator.uniform(0.0, 2.0 * np.pi, size=n)
        return radius[:, None] * np.column_stack([np.cos(angle), np.sin(angle)])
    if dist == "dep_super_sub":
        # Clip away from 0 and 1 so the inverse CDF stays finite.
        u = np.clip(generator.uniform(0.0, 1.0, size=n), 1e-300, 1.0 - 1e-16)
        s1 = np.where(u < 0.5, np.log(2.0 * u), -np.log(2.0 - 2.0 * u))
        c = np.where(np.abs(s1) <= np.log(2.0), 0.0, -1.0)
        s2 = c + generator.uniform(0.0, 1.0, size=n)
        return np.column_stack([s1, s2])
    raise ValueError(f"unknown distribution {dist!r}")


def _rotation_chain(d: int) -> np.ndarray:
    """Composite of plane rotations by pi/4 over all coordinate pairs.

    Pairs are visited in lexicographic order and applied successively.
    """
    c = np.cos(np.pi / 4.0)
    s = np.sin(np.pi / 4.0)
    Q = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            R = np.eye(d)
            R[i, i] = c
            R[j, j] = c
            R[i, j] = -s
            R[j, i] = s
            Q = R @ Q
    return Q


def sample_noise(r: float, n: int, seed: int) -> np.ndarray:
    """Gaussian noise block with conditioning severity `r`, shape (n, 8).

    Variances are log-spaced over [1e-2r, 1e2r], the components are
    mixed by a fixed rotation chain, and every column is rescaled to
    empirical unit variance.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    generator = rng.substream(seed, rng.NOISE)
    exponents = np.linspace(-2.0 * r, 2.0 * r, D_NOISE)
    stds = np.sqrt(10.0**exponents)
    Z = generator.standard_normal((n, D_NOISE)) * stds
    N = Z @ _rotation_chain(D_NOISE).T
    return standardize(N)[0]


def make_artificial(spec: ArtificialSpec) -> tuple[np.ndarray, np.ndarray]:
    """Synthetic dataset and the true subspace basis.

    Returns (X, E) where X has shape (n, 10), signal in the first two
    columns, and E is the 10 x 2 basis spanning them. Coordinatewise
    standardization preserves that span, so estimates fitted on
    standardized X are still compared against E.
    """
    S = sample_signal(spec.dist, spec.n, spec.seed)
    N = sample_noise(spec.r, spec.n, spec.seed)
    X = np.column_stack([S, N])
    E = np.zeros((D_SIGNAL + D_NOISE, D_SIGNAL))
    E[0, 0] = 1.0
    E[1, 1] = 1.0
    return X, E


def condition_number(X: np.ndarray) -> float:
    """Ratio of extreme eigenvalues of the sample covariance of `X`."""
    eigvals = np.linalg.eigvalsh(sample_covariance(X))
    if eigvals[0] <= 0:
        raise ValueError(f"covariance is singular (min eigenvalue {eigvals[0]:.3e})")
    return float(eigvals[-1] / eigvals[0])


# Label maps for public benchmark sets, keyed by dataset name. Values
# map raw labels to +1/-1; rows with unmapped labels are dropped.
BENCHMARK_LABEL_MAPS = {
    "vehicle": {1.0: 1, 2.0: 1, 3.0: -1, 4.0: -1},
    "shuttle": {1.0: 1, 4.0: -1},
    "susy": {1.0: 1, 0.0: -1},
    "svmguide1": {1.0: 1, 0.0: -1},
}


def load_libsvm(
    path, n_features: int | None = None, label_map: dict | None = None
) -> LabeledDataset:
    """Read a dense matrix from sparse label/index:value text.

    Indices are 1-based and must be strictly ascending within a line.
    Missing indices are zero. With `label_map`, raw labels are mapped
    to +1/-1 and rows with unmapped labels are dropped; without it,
    raw labels must already be +1/-1.

    Raises
    ------
    LibsvmFormatError
        On any malformed line, carrying the 1-based line number.
    """
    labels = []
    rows = []
    max_index = 0
    with open(path) as fh:
        for line_number, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            try:
                raw = float(tokens[0])
            except ValueError:
                raise LibsvmFormatError(line_number, f"bad label {tokens[0]!r}")
            entries = []
            previous = 0
            for token in tokens[1:]:
                index_text, _, value_text = token.partition(":")
                try:
                    index = int(index_text)
                    value = float(value_text)
                except ValueError:
                    raise LibsvmFormatError(line_number, f"bad entry {token!r}")
                if index <= previous:
                    raise LibsvmFormatError(
                        line_number, f"index {index} not ascending"
                    )
                previous = index
                entries.append((index, value))
            max_index = max(max_index, previous)
            labels.append(raw)
            rows.append(entries)
    d = max_index if n_features is None else n_features
    if n_features is not None and max_index > n_features:
        raise ValueError(f"index {max_index} exceeds n_features={n_features}")
    X = np.zeros((len(rows), d))
    for i, entries in enumerate(rows):
        for index, value in entries:
            X[i, index - 1] = value
    y = np.asarray(labels)
    if label_map is not None:
        mapped = np.array([label_map.get(v, 0) for v in y])
        keep = mapped != 0
        return LabeledDataset(X[keep], mapped[keep])
    if y.size and not np.isin(y, (-1.0, 1.0)).all():
        raise ValueError("labels must be -1/+1 unless a label_map is given")
    return LabeledDataset(X, y.astype(int))


def write_libsvm(path, X: np.ndarray, labels: np.ndarray) -> None:
    """Write a dense matrix as label/index:value lines (1-based indices)."""
    X = np.asarray(X, dtype=float)
    with open(path, "w") as fh:
        for row, label in zip(X, labels):
            features = " ".join(f"{k + 1}:{v:.17g}" for k, v in enumerate(row))
            fh.write(f"{int(label):+d} {features}\n".rstrip() + "\n")


def augment_noise_dims(X: np.ndarray, d_target: int, seed: int) -> np.ndarray:
    """Append standard normal columns until `X` has `d_target` of them."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if d_target < d:
        raise ValueError(f"d_target={d_target} below data dimension {d}")
    extra = rng.substream(seed, rng.AUGMENT).standard_normal((n, d_target - d))
    return np.column_stack([X, extra])


def balanced_subsample(
    ds: LabeledDataset, n: int, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Disjoint class-balanced train and test splits of `n` rows each.

    Each split holds n/2 rows per class, so every class needs at least
    `n` rows in `ds`.
    """
    if n < 2 or n % 2:
        raise ValueError("n must be a positive even number")
    half = n // 2
    generator = rng.substream(seed, rng.SUBSAMPLE)
    train_parts = []
    test_parts = []
    for label in (1, -1):
        members = np.flatnonzero(ds.labels == label)
        if members.size < n:
            raise ValueError(
                f"class {label:+d} has {members.size} rows, needs {n}"
            )
        perm = generator.permutation(members)
        train_parts.append(perm[:half])
        test_parts.append(perm[half:n])
    train = np.concatenate(train_parts)
    test = np.concatenate(test_parts)
    return (
        LabeledDataset(ds.X[train], ds.labels[train]),
        LabeledDataset(ds.X[test], ds.labels[test]),
    )


def artificial_header() -> list[str]:
    return ["s1", "s2"] + [f"n{k}" for k in range(3, D_SIGNAL + D_NOISE + 1)]


def write_artificial_csv(X: np.ndarray, path) -> None:
    """Write a synthetic dataset with its standard column header."""
    X = np.asarray(X, dtype=float)
    if X.shape[1] != D_SIGNAL + D_NOISE:
        raise ValueError(f"expected {D_SIGNAL + D_NOISE} columns")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(artificial_header())
        for row in X:
            writer.writerow([f"{v:.17g}" for v in row])


def load_matrix_csv(path) -> np.ndarray:
    """Read a numeric matrix written with a single header line."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
