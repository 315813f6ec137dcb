"""Project a labeled benchmark onto each method's estimated subspace.

Reads a sparse label/index:value file, standardizes it, pads with
Gaussian noise columns up to --d-target, fits every method on a
class-balanced train split, and writes projected train/test files
ready for a downstream classifier.
"""

import argparse

from ngca.data import BENCHMARK_LABEL_MAPS, load_libsvm
from ngca.harness import run_benchmark_projection


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True)
    parser.add_argument(
        "--label-map",
        choices=sorted(BENCHMARK_LABEL_MAPS),
        help="named raw-label mapping; omit if labels are already +1/-1",
    )
    parser.add_argument("--d-target", type=int, required=True)
    parser.add_argument("--m", type=int, default=2)
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--methods", default="pca,mipp,lsngca,wf_lsngca")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output-dir", default="projected")
    args = parser.parse_args()

    label_map = BENCHMARK_LABEL_MAPS[args.label_map] if args.label_map else None
    dataset = load_libsvm(args.input, label_map=label_map)
    paths = run_benchmark_projection(
        dataset,
        d_target=args.d_target,
        m=args.m,
        methods=tuple(args.methods.split(",")),
        n=args.n,
        seed=args.seed,
        output_dir=args.output_dir,
    )
    for method, (train_path, test_path) in paths.items():
        print(f"{method}: {train_path} {test_path}")


if __name__ == "__main__":
    main()
