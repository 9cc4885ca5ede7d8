"""Known/unknown evaluation on the ORL database over several network seeds.

    python scripts/orl_experiment.py /data/orl --seeds 3

Expects s1..s40 directories holding 1.pgm..10.pgm. Prints one accuracy
table per seed in the PCA / ICA / HYBRID layout.
"""

import argparse
import time
from dataclasses import replace

from hybridface import pipeline
from hybridface.dataset_io import load_split, orl_manifest
from hybridface.mlp import MlpConfig
from hybridface.pipeline import SystemConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("root")
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--pattern", default="s{subject}/{pose}.pgm")
    args = ap.parse_args()
    split = load_split(orl_manifest(args.root, args.pattern))
    for seed in range(args.seeds):
        start = time.perf_counter()
        model = pipeline.train_system(split, replace(SystemConfig(), mlp=MlpConfig(seed=seed)))
        report = pipeline.evaluate(model, split)
        epochs = {k: r.epochs_run for k, r in model.reports.items()}
        print(f"seed {seed}: m'={model.eigen.m_prime}, epochs {epochs}, "
              f"{time.perf_counter() - start:.0f}s")
        print(report.to_text())


if __name__ == "__main__":
    main()
