"""Run the synthetic benchmark sweep and write result CSVs.

The default configuration is the full experiment: four signal
distributions, r in {0,...,4}, three subspace methods, ten seeds at
n = 2000. That takes a while on one core; --quick cuts it down to a
smoke-test sweep for a fast end-to-end check.
"""

import argparse
import time

from ngca.harness import ExperimentConfig, run_synthetic


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", default="results")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument(
        "--quick",
        action="store_true",
        help="two distributions, r in {0, 2}, three seeds, n = 500",
    )
    args = parser.parse_args()

    overrides = dict(output_dir=args.output_dir, workers=args.workers)
    if args.quick:
        overrides.update(
            distributions=("gauss_mixture", "dep_super"),
            r_values=(0.0, 2.0),
            seeds=(0, 1, 2),
            n=500,
        )
    config = ExperimentConfig(**overrides)

    start = time.perf_counter()
    rows = run_synthetic(config, verbose=True)
    elapsed = time.perf_counter() - start
    failed = sum(r.status != "ok" for r in rows)
    print(
        f"{len(rows)} runs ({failed} failed) in {elapsed:.0f}s; "
        f"results under {args.output_dir}/"
    )


if __name__ == "__main__":
    main()
