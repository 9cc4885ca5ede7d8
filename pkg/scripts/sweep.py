"""Learning-rate x momentum sweep on the synthetic benchmark.

Writes one CSV row per grid point with the final MSE of each branch after
a fixed epoch budget, the tabular counterpart of an MSE-vs-rate plot.
"""

import argparse
from dataclasses import replace

from hybridface import pipeline, synthetic
from hybridface.mlp import MlpConfig
from hybridface.pipeline import SystemConfig
from hybridface.preprocess import PreprocessConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=200)
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args()
    split, _ = synthetic.open_set_benchmark(synthetic.SyntheticFaces(seed=args.seed))
    cfg = replace(SystemConfig(preprocess=PreprocessConfig(16, 16)),
                  mlp=MlpConfig(max_epochs=args.epochs, target_mse=None))
    grid = [(lr, mom) for lr in (0.1, 0.2, 0.3, 0.5, 0.8) for mom in (0.0, 0.5, 0.9)]
    rows = pipeline.sweep_hyperparams(split, grid, cfg)
    with open(args.out, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    print("\n".join(rows))


if __name__ == "__main__":
    main()
