"""Command-line entry points.

Subcommands: ``generate`` (synthetic data to CSV), ``fit`` (one method
on one dataset, basis to text), ``eval-synthetic`` (full sweep to
results/summary CSVs), ``project-benchmark`` (labeled data projected
onto each estimated subspace), ``plot`` (figures from a results CSV).

``eval-synthetic`` reads an INI-style config file with sections
[experiment], [cv] and [mipp] mirroring ExperimentConfig; every field
can also be set by a same-named flag, which wins over the file. All
stochastic commands require --seed.
"""

import argparse
import configparser
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .data import (
    BENCHMARK_LABEL_MAPS,
    DISTRIBUTIONS,
    ArtificialSpec,
    LabeledDataset,
    load_libsvm,
    load_matrix_csv,
    make_artificial,
    write_artificial_csv,
)
from .harness import (
    METHODS,
    ExperimentConfig,
    emit_plots,
    fit_method,
    run_benchmark_projection,
    run_synthetic,
)
from .lsldg import CvGrid
from .mipp import MippConfig
from .numerics import standardize


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(",", " ").split())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.replace(",", " ").split())


def _names(text: str) -> tuple:
    return tuple(v for v in text.replace(",", " ").split())


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be nonnegative")
    return value


def _read_config_file(path) -> dict:
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    values = {}
    for section in parser.sections():
        if section not in ("experiment", "cv", "mipp"):
            raise ValueError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            values[key] = value
    return values


_LIST_FIELDS = {
    "distributions": _names,
    "methods": _names,
    "r_values": _floats,
    "seeds": _ints,
    "sigma_candidates": _floats,
    "lambda_candidates": _floats,
}
_INT_FIELDS = ("n", "m", "basis_count", "fold_count", "per_family_count",
               "fastica_iters", "num_seeds", "workers")
_FLOAT_FIELDS = ("tau",)


def _coerce(key: str, value):
    if isinstance(value, str):
        if key in _LIST_FIELDS:
            return _LIST_FIELDS[key](value)
        if key in _INT_FIELDS:
            return int(value)
        if key in _FLOAT_FIELDS:
            return float(value)
    return value


def _build_experiment_config(args) -> ExperimentConfig:
    values = {}
    if args.config:
        for key, value in _read_config_file(args.config).items():
            values[key] = _coerce(key, value)
    for key in (
        "distributions", "r_values", "n", "methods", "seeds", "m", "basis_count",
        "sigma_candidates", "lambda_candidates", "fold_count", "per_family_count",
        "fastica_iters", "tau", "output_dir", "workers", "num_seeds",
    ):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = _coerce(key, flag)
    if "seeds" not in values:
        count = values.pop("num_seeds", 10)
        values["seeds"] = tuple(range(args.seed, args.seed + count))
    else:
        values.pop("num_seeds", None)
    cv = CvGrid(
        sigma_candidates=np.asarray(
            values.pop("sigma_candidates", CvGrid().sigma_candidates)
        ),
        lambda_candidates=np.asarray(
            values.pop("lambda_candidates", CvGrid().lambda_candidates)
        ),
        fold_count=values.pop("fold_count", 5),
        seed=args.seed,
    )
    mipp = MippConfig(
        per_family_count=values.pop("per_family_count", 1000),
        fastica_iters=values.pop("fastica_iters", 10),
        tau=values.pop("tau", 1.6),
        seed=args.seed,
    )
    return ExperimentConfig(cv=cv, mipp=mipp, **values)


def _grid_from_args(args) -> CvGrid:
    grid = CvGrid(seed=args.seed)
    if getattr(args, "sigma_candidates", None):
        grid = replace(grid, sigma_candidates=np.asarray(_floats(args.sigma_candidates)))
    if getattr(args, "lambda_candidates", None):
        grid = replace(grid, lambda_candidates=np.asarray(_floats(args.lambda_candidates)))
    if getattr(args, "fold_count", None):
        grid = replace(grid, fold_count=args.fold_count)
    return grid


def _mipp_from_args(args) -> MippConfig:
    config = MippConfig(seed=args.seed)
    if getattr(args, "per_family_count", None):
        config = replace(config, per_family_count=args.per_family_count)
    if getattr(args, "fastica_iters", None):
        config = replace(config, fastica_iters=args.fastica_iters)
    if getattr(args, "tau", None) is not None:
        config = replace(config, tau=args.tau)
    return config


def _parse_label_map(text: str) -> dict:
    if text.lower() in BENCHMARK_LABEL_MAPS:
        return BENCHMARK_LABEL_MAPS[text.lower()]
    mapping = {}
    for pair in text.split(","):
        raw, _, target = pair.partition(":")
        mapping[float(raw)] = int(target)
    return mapping


def _cmd_generate(args) -> int:
    X, _ = make_artificial(ArtificialSpec(args.dist, args.r, args.n, args.seed))
    write_artificial_csv(X, args.out)
    print(args.out)
    return 0


def _cmd_fit(args) -> int:
    X = load_matrix_csv(args.data)
    Xs, _, _ = standardize(X)
    estimate = fit_method(
        args.method, Xs, args.m, _grid_from_args(args), _mipp_from_args(args),
        args.basis_count or 100,
    )
    np.savetxt(args.out, estimate.basis, fmt="%.17g", delimiter=" ")
    print(args.out)
    return 0


def _cmd_eval_synthetic(args) -> int:
    config = _build_experiment_config(args)
    run_synthetic(config, verbose=not args.quiet)
    print(str(Path(config.output_dir) / "results.csv"))
    return 0


def _cmd_project_benchmark(args) -> int:
    label_map = _parse_label_map(args.label_map) if args.label_map else None
    parts = [
        load_libsvm(path, n_features=args.n_features, label_map=label_map)
        for path in args.input
    ]
    d = max(part.X.shape[1] for part in parts)
    X = np.concatenate(
        [np.pad(part.X, ((0, 0), (0, d - part.X.shape[1]))) for part in parts]
    )
    labels = np.concatenate([part.labels for part in parts])
    paths = run_benchmark_projection(
        LabeledDataset(X, labels),
        args.d_target,
        args.m,
        _names(args.methods),
        args.n,
        args.seed,
        args.output_dir,
        cv=_grid_from_args(args),
        mipp_config=_mipp_from_args(args),
    )
    for method, (train_path, test_path) in paths.items():
        print(f"{method} {train_path} {test_path}")
    return 0


def _cmd_plot(args) -> int:
    for path in emit_plots(args.results, args.output_dir, n=args.n):
        print(path)
    return 0


def _add_grid_flags(parser):
    parser.add_argument("--sigma-candidates", dest="sigma_candidates")
    parser.add_argument("--lambda-candidates", dest="lambda_candidates")
    parser.add_argument("--fold-count", dest="fold_count", type=int)
    parser.add_argument("--basis-count", dest="basis_count", type=int)
    parser.add_argument("--per-family-count", dest="per_family_count", type=int)
    parser.add_argument("--fastica-iters", dest="fastica_iters", type=int)
    parser.add_argument("--tau", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ngca", description="Non-Gaussian subspace estimation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write one synthetic dataset as CSV")
    p.add_argument("--dist", required=True, choices=DISTRIBUTIONS)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=_nonnegative, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("fit", help="fit one method, write the basis as text")
    p.add_argument("--data", required=True, help="CSV with a single header row")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--seed", type=_nonnegative, required=True)
    p.add_argument("--out", required=True)
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("eval-synthetic", help="run a sweep, write result CSVs")
    p.add_argument("--config", help="INI file with [experiment]/[cv]/[mipp]")
    p.add_argument("--distributions")
    p.add_argument("--r-values", dest="r_values")
    p.add_argument("--n", type=int)
    p.add_argument("--methods")
    p.add_argument("--seeds")
    p.add_argument("--num-seeds", dest="num_seeds", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=_nonnegative, required=True)
    p.add_argument("--quiet", action="store_true")
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_eval_synthetic)

    p = sub.add_parser(
        "project-benchmark", help="project labeled data onto estimated subspaces"
    )
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--label-map", dest="label_map",
                   help="dataset name or raw:mapped pairs")
    p.add_argument("--n-features", dest="n_features", type=int)
    p.add_argument("--d-target", dest="d_target", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--methods", default="pca,mipp,lsngca,wf_lsngca")
    p.add_argument("--seed", type=_nonnegative, required=True)
    p.add_argument("--output-dir", dest="output_dir", required=True)
    _add_grid_flags(p)
    p.set_defaults(func=_cmd_project_benchmark)

    p = sub.add_parser("plot", help="figures from a results CSV")
    p.add_argument("--results", required=True)
    p.add_argument("--output-dir", dest="output_dir", required=True)
    p.add_argument("--n", type=int, default=2000,
                   help="sample size for the conditioning curve")
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
