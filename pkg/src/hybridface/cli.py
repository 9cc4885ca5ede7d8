"""Command line interface: train, classify, evaluate, sweep, calibrate."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import modelio, pipeline
from .dataset_io import load_split, read_manifest, read_pgm
from .errors import HybridFaceError
from .fusion import FusionConfig
from .ica import IcaConfig
from .mlp import MlpConfig
from .pipeline import SystemConfig
from .preprocess import PreprocessConfig

EXIT_DENIED = 3


def parse_values(text: str) -> list[float]:
    """Comma list of numbers and inclusive ``start:stop:step`` ranges."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            start, stop, step = (float(v) for v in part.split(":"))
            if step <= 0:
                raise ValueError(f"range step must be positive in {part!r}")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            values.extend(round(start + i * step, 12) for i in range(n))
        else:
            values.append(float(part))
    return values


def parse_grid(text: str) -> list[tuple[float, float]]:
    """``A x B`` where A and B are value lists; returns the cross product."""
    try:
        left, right = text.lower().split("x")
        grid = [(a, b) for a in parse_values(left) for b in parse_values(right)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None
    if not grid:
        raise argparse.ArgumentTypeError(f"grid {text!r} is empty")
    return grid


def parse_size(text: str):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like WxH, got {text!r}") from None
    return w, h


def _add_training_args(p):
    p.add_argument("--size", type=parse_size, default=(46, 56), help="resize target WxH")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--no-equalize", action="store_true")
    p.add_argument("--mprime", type=int, default=None, help="eigenfaces kept (default: 95%% energy)")
    p.add_argument("--hidden", type=int, default=70)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--momentum", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--target-mse", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ica-lr", type=float, default=IcaConfig.learn_rate)
    p.add_argument("--ica-passes", type=int, default=IcaConfig.max_passes)
    p.add_argument("--ica-dims", type=int, default=None, help="PCA dims fed to ICA (default: mprime)")
    p.add_argument("--ica-extended", action="store_true", help="sub-Gaussian capable infomax rule")
    p.add_argument("--threshold-pca", type=float, default=0.5)
    p.add_argument("--threshold-ica", type=float, default=0.5)
    p.add_argument("--sequential", action="store_true", help="train branches one after the other")


def config_from_args(args) -> SystemConfig:
    w, h = args.size
    return SystemConfig(
        preprocess=PreprocessConfig(w, h, args.gamma, not args.no_equalize),
        m_prime=args.mprime,
        ica=IcaConfig(learn_rate=args.ica_lr, max_passes=args.ica_passes,
                      pca_prewhiten_dims=args.ica_dims, extended=args.ica_extended),
        mlp=MlpConfig(hidden_units=args.hidden, learn_rate=args.lr, momentum=args.momentum,
                      max_epochs=args.epochs, target_mse=args.target_mse, seed=args.seed),
        fusion=FusionConfig(args.threshold_pca, args.threshold_ica),
        concurrent=not args.sequential,
    )


def cmd_train(args):
    split = load_split(read_manifest(args.manifest))
    model = pipeline.train_system(split, config_from_args(args))
    modelio.save_model(model, args.out)
    for name, rep in model.reports.items():
        print(f"{name}: {model.eigen.m_prime if name == 'PCA' else model.ica.n_components} features, "
              f"{rep.epochs_run} epochs, final MSE {rep.final_mse:.6g}")
        if args.report_csv:
            path = Path(args.report_csv)
            path.with_name(f"{path.stem}_{name.lower()}{path.suffix}").write_text(rep.to_csv())
    print(f"model written to {args.out}")
    return 0


def cmd_classify(args):
    model = modelio.load_model(args.model)
    result = pipeline.classify(model, read_pgm(args.image))
    d = result.decision
    (lp, sp), (li, si) = result.pca_top, result.ica_top
    if args.json:
        print(json.dumps({
            "accepted": d.accepted, "label": d.label, "score": d.score,
            "branch": d.branch, "reason": d.reason,
            "pca": {"label": lp, "score": sp}, "ica": {"label": li, "score": si},
        }))
    else:
        print(d)
        print(f"  PCA branch: class={lp} score={sp:.4f}")
        print(f"  ICA branch: class={li} score={si:.4f}")
    return 0 if d.accepted else EXIT_DENIED


def cmd_evaluate(args):
    model = modelio.load_model(args.model)
    report = pipeline.evaluate(model, load_split(read_manifest(args.manifest)))
    print(report.to_text(), end="")
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return 0


def cmd_sweep(args):
    split = load_split(read_manifest(args.manifest))
    rows = pipeline.sweep_hyperparams(split, args.grid, config_from_args(args))
    Path(args.csv).write_text("\n".join(rows) + "\n")
    print("\n".join(rows))
    return 0


def cmd_calibrate(args):
    model = modelio.load_model(args.model)
    model = pipeline.calibrate(model, load_split(read_manifest(args.manifest)), args.grid)
    modelio.save_model(model, args.out or args.model)
    print(f"threshold_pca={model.fusion_cfg.threshold_pca} threshold_ica={model.fusion_cfg.threshold_ica}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="hybridface", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train both branches from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report-csv", help="write per-branch epoch/MSE CSVs next to this path")
    _add_training_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify one PGM image")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="accuracy tables for the manifest's test sets")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="learning-rate x momentum sweep")
    p.add_argument("--manifest", required=True)
    p.add_argument("--grid", type=parse_grid, required=True, help="e.g. 0.1,0.2,0.3,0.5,0.8x0,0.5,0.9")
    p.add_argument("--csv", required=True)
    _add_training_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("calibrate", help="fit fusion thresholds on the manifest's test sets")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--grid", type=parse_grid, required=True, help="e.g. -0.5:0.9:0.1x-0.5:0.9:0.1")
    p.add_argument("--out", help="write here instead of updating --model in place")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (HybridFaceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
