"""Experiment orchestration: synthetic sweeps, benchmark projections, plots.

Every run in a sweep is a pure function of (distribution, r, method,
seed, config), so runs may execute concurrently; rows are assembled in
a fixed order regardless of scheduling. Summaries report medians and
interquartile ranges over seeds.
"""

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .data import (
    DISTRIBUTIONS,
    ArtificialSpec,
    LabeledDataset,
    augment_noise_dims,
    balanced_subsample,
    condition_number,
    make_artificial,
    write_libsvm,
)
from .exceptions import IllConditionedCovarianceError, NoSurvivorsError
from .lsldg import CvGrid
from .lsngca import SubspaceEstimate, lsngca_fit
from .mipp import MippConfig, mipp_fit
from .numerics import sample_covariance, standardize, symmetric_eig_topm
from .wf_lsngca import wf_fit_subspace

METHODS = ("pca", "mipp", "lsngca", "wf_lsngca")

RESULT_COLUMNS = (
    "method",
    "distribution",
    "r",
    "seed",
    "subspace_error",
    "status",
    "wall_time_seconds",
)

SUMMARY_COLUMNS = (
    "method",
    "distribution",
    "r",
    "runs",
    "ok",
    "median_error",
    "iqr_error",
)


def subspace_error(E_true: np.ndarray, E_hat: np.ndarray) -> float:
    """Mean squared residual of estimated directions off the true span.

    Both arguments are (d, m) with orthonormal columns (checked within
    1e-8). The value is ``mean_i ||e_hat_i - P e_hat_i||^2`` with P the
    projector onto the true subspace; it ranges over [0, 1].
    """
    E_true = np.asarray(E_true, dtype=float)
    E_hat = np.asarray(E_hat, dtype=float)
    if E_true.shape != E_hat.shape or E_true.ndim != 2:
        raise ValueError("bases must share one (d, m) shape")
    m = E_true.shape[1]
    for name, E in (("true", E_true), ("estimated", E_hat)):
        if np.abs(E.T @ E - np.eye(m)).max() > 1e-8:
            raise ValueError(f"{name} basis columns are not orthonormal")
    R = E_hat - E_true @ (E_true.T @ E_hat)
    return float((R * R).sum() / m)


def pca_baseline(X: np.ndarray, m: int) -> SubspaceEstimate:
    """Top principal directions of `X` (expects standardized input)."""
    _, V = symmetric_eig_topm(sample_covariance(X), m)
    return SubspaceEstimate(V, "pca")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Full description of one synthetic sweep."""

    distributions: tuple = DISTRIBUTIONS
    r_values: tuple = (0.0, 1.0, 2.0, 3.0, 4.0)
    n: int = 2000
    methods: tuple = ("mipp", "lsngca", "wf_lsngca")
    seeds: tuple = tuple(range(10))
    m: int = 2
    basis_count: int = 100
    cv: CvGrid = field(default_factory=CvGrid)
    mipp: MippConfig = field(default_factory=MippConfig)
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        for dist in self.distributions:
            if dist not in DISTRIBUTIONS:
                raise ValueError(f"unknown distribution {dist!r}")
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass(frozen=True)
class RunResult:
    method: str
    distribution: str
    r: float
    seed: int
    subspace_error: float | None
    status: str  # ok, whitening_failed or no_survivors
    wall_time_seconds: float


def fit_method(
    method: str,
    Xs: np.ndarray,
    m: int,
    cv: CvGrid,
    mipp_config: MippConfig,
    basis_count: int = 100,
) -> SubspaceEstimate:
    """Dispatch one subspace estimator on standardized data."""
    if method == "pca":
        return pca_baseline(Xs, m)
    if method == "lsngca":
        return lsngca_fit(Xs, m, cv, basis_count)
    if method == "wf_lsngca":
        return wf_fit_subspace(Xs, m, cv, basis_count)
    if method == "mipp":
        return mipp_fit(Xs, m, mipp_config)
    raise ValueError(f"unknown method {method!r}")


def _one_run(task, config) -> RunResult:
    dist, r, method, seed = task
    X, E_true = make_artificial(ArtificialSpec(dist, r, config.n, seed))
    Xs, _, _ = standardize(X)
    cv = replace(config.cv, seed=seed)
    mipp_config = replace(config.mipp, seed=seed)
    start = time.perf_counter()
    status = "ok"
    error = None
    try:
        estimate = fit_method(method, Xs, config.m, cv, mipp_config, config.basis_count)
    except IllConditionedCovarianceError:
        status = "whitening_failed"
    except NoSurvivorsError:
        status = "no_survivors"
    else:
        error = subspace_error(E_true, estimate.basis)
    return RunResult(method, dist, r, seed, error, status, time.perf_counter() - start)


def run_synthetic(config: ExperimentConfig, verbose: bool = False) -> list:
    """Execute the full cross-product sweep and write result CSVs.

    Returns the result rows in (distribution, r, method, seed) order.
    Writes ``results.csv`` (one row per run) and ``summary.csv``
    (median and IQR per cell) under ``config.output_dir``.
    """
    tasks = [
        (dist, r, method, seed)
        for dist in config.distributions
        for r in config.r_values
        for method in config.methods
        for seed in config.seeds
    ]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda t: _one_run(t, config), tasks))
    else:
        results = []
        for task in tasks:
            result = _one_run(task, config)
            if verbose:
                err = "" if result.subspace_error is None else f"{result.subspace_error:.4f}"
                print(
                    f"{result.method} {result.distribution} r={result.r:g} "
                    f"seed={result.seed} status={result.status} error={err} "
                    f"({result.wall_time_seconds:.1f}s)",
                    flush=True,
                )
            results.append(result)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_results_csv(results, out / "results.csv")
    write_summary_csv(summarize(results), out / "summary.csv")
    return results


def summarize(results) -> list:
    """Per-cell medians and IQRs over seeds, in first-seen cell order."""
    cells = {}
    for row in results:
        key = (row.method, row.distribution, row.r)
        cells.setdefault(key, []).append(row)
    summary = []
    for (method, dist, r), rows in cells.items():
        errors = np.array(
            [row.subspace_error for row in rows if row.status == "ok"], dtype=float
        )
        entry = {
            "method": method,
            "distribution": dist,
            "r": r,
            "runs": len(rows),
            "ok": errors.size,
            "median_error": float(np.median(errors)) if errors.size else None,
            "iqr_error": (
                float(np.percentile(errors, 75) - np.percentile(errors, 25))
                if errors.size
                else None
            ),
        }
        summary.append(entry)
    return summary


def _fmt(value) -> str:
    return "" if value is None else f"{value:.17g}"


def write_results_csv(results, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in results:
            writer.writerow(
                [
                    row.method,
                    row.distribution,
                    _fmt(row.r),
                    row.seed,
                    _fmt(row.subspace_error),
                    row.status,
                    f"{row.wall_time_seconds:.6f}",
                ]
            )


def write_summary_csv(summary, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for entry in summary:
            writer.writerow(
                [
                    entry["method"],
                    entry["distribution"],
                    _fmt(entry["r"]),
                    entry["runs"],
                    entry["ok"],
                    _fmt(entry["median_error"]),
                    _fmt(entry["iqr_error"]),
                ]
            )


def load_results_csv(path) -> list:
    """Read a results CSV back into RunResult rows.

    Raises
    ------
    ValueError
        If the header does not match the fixed schema or the file has
        no data rows.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(RESULT_COLUMNS):
            raise ValueError(f"unexpected header {header!r}")
        rows = []
        for record in reader:
            if len(record) != len(RESULT_COLUMNS):
                raise ValueError(f"bad row {record!r}")
            method, dist, r, seed, error, status, wall = record
            rows.append(
                RunResult(
                    method,
                    dist,
                    float(r),
                    int(seed),
                    float(error) if error else None,
                    status,
                    float(wall),
                )
            )
    if not rows:
        raise ValueError("results file has no data rows")
    return rows


def run_benchmark_projection(
    dataset: LabeledDataset,
    d_target: int,
    m: int,
    methods,
    n: int,
    seed: int,
    output_dir,
    cv: CvGrid | None = None,
    mipp_config: MippConfig | None = None,
) -> dict:
    """Project a labeled benchmark onto each method's estimated subspace.

    Standardizes, pads with Gaussian noise columns up to `d_target`,
    draws disjoint class-balanced train/test splits of `n` rows each,
    fits every method on the train features, and writes projected
    train/test files in sparse label/index:value format.

    Returns {method: (train_path, test_path)}.
    """
    cv = replace(cv if cv is not None else CvGrid(), seed=seed)
    mipp_config = replace(
        mipp_config if mipp_config is not None else MippConfig(), seed=seed
    )
    Xs, _, _ = standardize(dataset.X)
    Xa = augment_noise_dims(Xs, d_target, seed)
    train, test = balanced_subsample(LabeledDataset(Xa, dataset.labels), n, seed)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for method in methods:
        basis_count = min(100, n)
        estimate = fit_method(method, train.X, m, cv, mipp_config, basis_count)
        train_path = out / f"{method}_train.libsvm"
        test_path = out / f"{method}_test.libsvm"
        write_libsvm(train_path, train.X @ estimate.basis, train.labels)
        write_libsvm(test_path, test.X @ estimate.basis, test.labels)
        paths[method] = (train_path, test_path)
    return paths


def _median_condition_numbers(rows, n: int) -> dict:
    """Median condition number of standardized data per (dist, r) cell."""
    cells = {}
    for row in rows:
        cells.setdefault((row.distribution, row.r), set()).add(row.seed)
    out = {}
    for (dist, r), seeds in sorted(cells.items()):
        kappas = []
        for seed in sorted(seeds):
            X, _ = make_artificial(ArtificialSpec(dist, r, n, seed))
            kappas.append(condition_number(standardize(X)[0]))
        out[(dist, r)] = float(np.median(kappas))
    return out


def emit_plots(csv_path, output_dir, n: int = 2000) -> list:
    """Render median-error curves and a conditioning curve from a results CSV.

    One error plot per distribution present (median with IQR band per
    method, against r) plus one condition-number-versus-r plot covering
    all distributions. The plotted points are exactly the summary rows
    recomputed from the CSV. Returns the written paths.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = load_results_csv(csv_path)
    summary = summarize(rows)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    distributions = []
    for row in rows:
        if row.distribution not in distributions:
            distributions.append(row.distribution)
    for dist in distributions:
        fig, ax = plt.subplots(figsize=(5.0, 3.5))
        methods = []
        for entry in summary:
            if entry["distribution"] == dist and entry["method"] not in methods:
                methods.append(entry["method"])
        for method in methods:
            points = [
                e
                for e in summary
                if e["distribution"] == dist
                and e["method"] == method
                and e["median_error"] is not None
            ]
            points.sort(key=lambda e: e["r"])
            rs = [e["r"] for e in points]
            med = np.array([e["median_error"] for e in points])
            iqr = np.array([e["iqr_error"] for e in points])
            ax.plot(rs, med, marker="o", label=method)
            ax.fill_between(rs, med - iqr / 2, med + iqr / 2, alpha=0.2)
        ax.set_xlabel("r")
        ax.set_ylabel("subspace error")
        ax.set_title(dist)
        ax.legend()
        fig.tight_layout()
        path = out / f"error_{dist}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    kappas = _median_condition_numbers(rows, n)
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    for dist in distributions:
        pairs = sorted((r, k) for (d2, r), k in kappas.items() if d2 == dist)
        ax.plot([p[0] for p in pairs], [p[1] for p in pairs], marker="o", label=dist)
    ax.set_xlabel("r")
    ax.set_ylabel("condition number")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    path = out / "condition_number.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
