"""Plot the loss_<model>_<featuremap>.csv files of a benchmark directory.

    python scripts/plot_loss_curves.py runs/bench/seed0/benchmark

One figure per variational model with one curve per feature map, plus the
running minimum (the value the optimizer actually keeps). Needs matplotlib.
"""
from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np


def read_curve(path: Path) -> tuple[np.ndarray, np.ndarray]:
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([int(r["iteration"]) for r in rows]), np.array([float(r["loss"]) for r in rows])


def main() -> None:
    ap = argparse.ArgumentParser(description="plot benchmark loss curves")
    ap.add_argument("directory", type=Path)
    ap.add_argument("--out", type=Path, default=None, help="where to write PNGs (default: the input directory)")
    args = ap.parse_args()

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = args.out or args.directory
    out.mkdir(parents=True, exist_ok=True)
    by_model: dict[str, list[Path]] = {}
    for path in sorted(args.directory.glob("loss_*_*.csv")):
        model = path.stem.split("_")[1]
        by_model.setdefault(model, []).append(path)
    if not by_model:
        raise SystemExit(f"no loss_*.csv files in {args.directory}")

    for model, paths in by_model.items():
        fig, ax = plt.subplots(figsize=(6, 4))
        for path in paths:
            it, loss = read_curve(path)
            line, = ax.plot(it, loss, alpha=0.35, lw=0.8)
            ax.plot(it, np.minimum.accumulate(loss), color=line.get_color(), label=path.stem.split("_")[2])
        ax.set_xlabel("objective evaluation")
        ax.set_ylabel("training loss")
        ax.set_title(model)
        ax.legend()
        fig.tight_layout()
        target = out / f"loss_{model}.png"
        fig.savefig(target, dpi=120)
        plt.close(fig)
        print(target)


if __name__ == "__main__":
    main()
