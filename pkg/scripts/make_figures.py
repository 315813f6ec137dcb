"""Render the error-versus-r and conditioning figures from a results CSV."""

import argparse

from ngca.harness import emit_plots


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--results", default="results/results.csv")
    parser.add_argument("--output-dir", default="figures")
    parser.add_argument(
        "--n",
        type=int,
        default=2000,
        help="sample size used when recomputing condition numbers",
    )
    args = parser.parse_args()
    for path in emit_plots(args.results, args.output_dir, n=args.n):
        print(path)


if __name__ == "__main__":
    main()
