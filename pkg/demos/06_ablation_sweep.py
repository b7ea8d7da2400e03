"""Ablations and the loss-weight grid on a small synthetic task.

Trains a handful of variants (full, no-mixing, no-disentanglement, plain
concat baseline) plus a 2x2 grid over the two loss weights, then renders a
bar chart and a heatmap. Expect a few minutes of CPU time.

Usage: python3 demos/06_ablation_sweep.py [--out DIR] [--epochs N]
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mmdg import datasets, preprocess
from mmdg.encoders import EncoderConfig
from mmdg.harness import TaskSpec, TrainConfig, run_ablation, sweep
from mmdg.model import FusionConfig, ModelConfig
from mmdg.synthgen import DEFAULT_FAULT_CLASSES, generate_samples, standard_conditions


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="demo_out/06_ablation_sweep")
    ap.add_argument("--epochs", type=int, default=4)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    conds = standard_conditions(duration_s=4.0)
    chunks = []
    for cid in ("C1", "C2", "C3"):
        for f in DEFAULT_FAULT_CLASSES:
            chunks.append(datasets.from_samples(generate_samples(conds[cid], f, 12, seed=0)))
    data = preprocess.prepare(datasets.merge(chunks))

    task = TaskSpec("demo", ("C1", "C2"), "C3")
    cfg = TrainConfig(
        epochs=args.epochs,
        batch_per_domain=16,
        patience=max(3, args.epochs),
        model=ModelConfig(
            encoder=EncoderConfig(widths=(8, 8, 16, 16), feature_dim=64),
            embed_dim=32,
            fusion=FusionConfig(mode="attention", heads=4, head_dim=16, tokens=4),
        ),
    )

    variants = ("full", "wo_mix", "wo_dis", "baseline")
    accs = {}
    for v in variants:
        rep = run_ablation(v, task, cfg, data)
        accs[v] = rep.accuracy
        print(f"{v}: {rep.accuracy:.1f}%")

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(list(accs), list(accs.values()), color="#4878b0")
    ax.set_ylabel("target accuracy [%]")
    ax.set_ylim(0, 100)
    ax.set_title("ablations on one small task (single seed, few epochs)")
    fig.tight_layout()
    fig.savefig(out / "ablations.png", dpi=120)
    plt.close(fig)
    print(f"ablations -> {out / 'ablations.png'}")

    records = sweep(task, [0.0, 0.1], [0.0, 0.5], cfg, data)
    grid = np.zeros((2, 2))
    for r in records:
        i = [0.0, 0.1].index(r["lambda_m"])
        j = [0.0, 0.5].index(r["lambda_d"])
        grid[i, j] = r["accuracy"]
        print(f"lambda_m={r['lambda_m']}, lambda_d={r['lambda_d']}: {r['accuracy']:.1f}%")

    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(grid, cmap="viridis", origin="lower")
    ax.set_xticks([0, 1], ["0.0", "0.5"])
    ax.set_yticks([0, 1], ["0.0", "0.1"])
    ax.set_xlabel("lambda_d")
    ax.set_ylabel("lambda_m")
    ax.set_title("loss-weight grid, target accuracy [%]")
    for i in range(2):
        for j in range(2):
            ax.text(j, i, f"{grid[i, j]:.1f}", ha="center", va="center", color="white")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(out / "sweep.png", dpi=120)
    plt.close(fig)
    print(f"sweep -> {out / 'sweep.png'}")


if __name__ == "__main__":
    main()
