"""Command-line interface.

Subcommands: gen (synthesize a raw dataset), preprocess (raw -> prepared
tensors), train, eval, ablate, sweep, report (render PNGs from result files).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import datasets, preprocess
from .config import load_config
from .harness import (
    VARIANTS,
    TaskSpec,
    TrainConfig,
    evaluate,
    load_checkpoint,
    run_ablation,
    save_checkpoint,
    standard_tasks,
    sweep,
    train,
)
from .synthgen import (
    DEFAULT_FAULT_CLASSES,
    SEGMENT_S,
    fault_class,
    generate_samples,
    standard_conditions,
)


def _parse_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _resolve_task(args) -> TaskSpec:
    if args.task:
        tasks = standard_tasks()
        if args.task not in tasks:
            raise SystemExit(f"unknown task {args.task!r}; built-ins: {', '.join(tasks)}")
        return tasks[args.task]
    if not (args.sources and args.target):
        raise SystemExit("give either --task or both --sources and --target")
    return TaskSpec("custom", tuple(_parse_list(args.sources)), args.target)


def _load_cfg(args) -> TrainConfig:
    cfg = load_config(args.config) if args.config else TrainConfig()
    overrides = {}
    for name in ("epochs", "seed", "variant", "batch_per_domain", "lambda_m", "lambda_d"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    return replace(cfg, **overrides) if overrides else cfg


def cmd_gen(args) -> int:
    out = Path(args.out)
    if (out / "manifest.json").exists() and not args.force:
        raise SystemExit(f"{out} already holds a dataset (use --force to overwrite)")
    duration = max(args.duration, args.per_class * SEGMENT_S)
    conditions = standard_conditions(duration)
    wanted = list(conditions) if args.conditions == "all" else _parse_list(args.conditions)
    unknown = [c for c in wanted if c not in conditions]
    if unknown:
        raise SystemExit(f"unknown conditions {unknown}; built-ins: {', '.join(conditions)}")
    if args.classes == "all":
        faults = list(DEFAULT_FAULT_CLASSES)
    else:
        faults = [fault_class(name) for name in _parse_list(args.classes)]

    snr = {}
    if args.snr:
        for part in _parse_list(args.snr):
            k, v = part.split("=")
            snr[k] = float(v)

    chunks = []
    for cid in wanted:
        for f in faults:
            chunks.append(
                datasets.from_samples(
                    generate_samples(conditions[cid], f, args.per_class, args.seed, snr_db=snr or None)
                )
            )
            print(f"gen {cid} class {f.label} ({f.name}): {args.per_class} windows")
    ds = datasets.merge(chunks)
    datasets.save(
        ds,
        out,
        extra_meta={
            "seed": args.seed,
            "per_class": args.per_class,
            "duration_s": duration,
            "snr_db": snr or "defaults",
            "conditions": wanted,
        },
    )
    print(f"wrote raw dataset: {ds.n} samples -> {out}")
    return 0


def cmd_preprocess(args) -> int:
    raw = datasets.load(args.data)
    prepared = preprocess.prepare(raw)
    out = Path(args.out)
    if args.stats_conditions:
        conds = _parse_list(args.stats_conditions)
        stats = preprocess.fit_norm_stats(prepared.for_conditions(conds))
        prepared = preprocess.normalize(prepared, stats)
        datasets.save(prepared, out)
        with open(out / "stats.json", "w") as fh:
            json.dump(stats.to_dict(), fh, indent=2)
        print(f"normalized with stats from {conds}")
    else:
        datasets.save(prepared, out)
    print(f"wrote prepared dataset: {prepared.n} samples -> {out}")
    return 0


def cmd_train(args) -> int:
    task = _resolve_task(args)
    cfg = _load_cfg(args)
    data = datasets.load(args.data)
    result = train(task, cfg, data, metrics_path=args.metrics)
    last = result.history[-1] if result.history else {}
    best_val = max((r["val_accuracy"] for r in result.val_history), default=float("nan"))
    print(
        f"task {task.id} variant {result.cfg.variant}: {result.epochs_run} epochs, "
        f"final total loss {last.get('total', float('nan')):.4f}, best val acc {best_val:.2f}%"
    )
    if args.out:
        save_checkpoint(result, args.out)
        print(f"checkpoint -> {args.out}")
    if args.eval_target:
        rep = evaluate(result, data.for_conditions([task.target_condition]))
        print(f"target {task.target_condition} accuracy: {rep.accuracy:.2f}% (n={rep.n})")
    return 0


def cmd_eval(args) -> int:
    result = load_checkpoint(args.checkpoint)
    data = datasets.load(args.data)
    conds = _parse_list(args.conditions) if args.conditions else [result.task.target_condition]
    rep = evaluate(result, data.for_conditions(conds))
    print(f"accuracy on {','.join(conds)}: {rep.accuracy:.2f}% (n={rep.n})")
    if args.out:
        d = rep.to_dict()
        d["per_class_accuracy"] = rep.per_class_accuracy().tolist()
        with open(args.out, "w") as fh:
            json.dump(d, fh, indent=2)
        print(f"report -> {args.out}")
    return 0


def _write_csv(path: str, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)


def cmd_ablate(args) -> int:
    task = _resolve_task(args)
    cfg = _load_cfg(args)
    data = datasets.load(args.data)
    variants = _parse_list(args.variants)
    seeds = [int(s) for s in _parse_list(args.seeds)]
    rows = []
    for variant in variants:
        for seed in seeds:
            rep = run_ablation(variant, task, replace(cfg, seed=seed), data)
            row = {
                "task": task.id,
                "variant": variant,
                "seed": seed,
                "accuracy": rep.accuracy,
                "n": rep.n,
            }
            rows.append(row)
            print(f"{task.id} {variant} seed={seed}: {rep.accuracy:.2f}%")
    if args.out:
        _write_csv(args.out, rows, ["task", "variant", "seed", "accuracy", "n"])
        print(f"results -> {args.out}")
    if args.jsonl:
        with open(args.jsonl, "w") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
    return 0


def cmd_sweep(args) -> int:
    task = _resolve_task(args)
    cfg = _load_cfg(args)
    data = datasets.load(args.data)
    lms = [float(v) for v in _parse_list(args.lambda_m_grid)]
    lds = [float(v) for v in _parse_list(args.lambda_d_grid)]
    records = sweep(task, lms, lds, cfg, data)
    for r in records:
        print(f"{task.id} lambda_m={r['lambda_m']} lambda_d={r['lambda_d']}: {r['accuracy']:.2f}%")
    if args.out:
        _write_csv(args.out, records, ["task", "lambda_m", "lambda_d", "seed", "accuracy", "n"])
        print(f"results -> {args.out}")
    if args.jsonl:
        with open(args.jsonl, "w") as fh:
            for r in records:
                fh.write(json.dumps(r) + "\n")
    return 0


def _plot_confusion(report: dict, out_png: Path) -> None:
    import matplotlib.pyplot as plt

    conf = np.asarray(report["confusion"], dtype=float)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(conf, cmap="Blues")
    ax.set_xlabel("predicted class")
    ax.set_ylabel("true class")
    ticks = np.arange(conf.shape[0])
    ax.set_xticks(ticks, [str(i + 1) for i in ticks])
    ax.set_yticks(ticks, [str(i + 1) for i in ticks])
    for i in range(conf.shape[0]):
        for j in range(conf.shape[1]):
            if conf[i, j]:
                ax.text(j, i, int(conf[i, j]), ha="center", va="center", fontsize=7)
    acc = report.get("accuracy", 0.0)
    ax.set_title(f"accuracy {acc:.2f}% (n={report.get('n', '?')})")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def _plot_metrics(path: Path, out_png: Path) -> None:
    import matplotlib.pyplot as plt

    steps, comps = [], {"cls": [], "modality": [], "domain": [], "total": []}
    val_epochs, val_acc = [], []
    with open(path) as fh:
        for line in fh:
            rec = json.loads(line)
            if rec.get("kind") == "step":
                steps.append(rec["step"])
                for k in comps:
                    comps[k].append(rec[k])
            elif rec.get("kind") == "epoch":
                val_epochs.append(rec["epoch"])
                val_acc.append(rec["val_accuracy"])
    fig, axes = plt.subplots(1, 2 if val_epochs else 1, figsize=(10 if val_epochs else 6, 4))
    ax0 = axes[0] if val_epochs else axes
    for k, v in comps.items():
        ax0.plot(steps, v, label=k)
    ax0.set_xlabel("step")
    ax0.set_ylabel("loss")
    ax0.legend()
    ax0.set_title("loss components")
    if val_epochs:
        axes[1].plot(val_epochs, val_acc, marker="o")
        axes[1].set_xlabel("epoch")
        axes[1].set_ylabel("source val accuracy [%]")
        axes[1].set_title("validation")
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def _plot_ablation(rows: list[dict], out_png: Path) -> None:
    import matplotlib.pyplot as plt

    variants = sorted({r["variant"] for r in rows})
    means = [np.mean([float(r["accuracy"]) for r in rows if r["variant"] == v]) for v in variants]
    fig, ax = plt.subplots(figsize=(max(5.0, 0.9 * len(variants)), 4))
    ax.bar(variants, means, color="#4878b0")
    ax.set_ylabel("target accuracy [%]")
    ax.set_ylim(0, 100)
    ax.set_title("ablation accuracies (mean over seeds)")
    plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def _plot_sweep(rows: list[dict], out_png: Path) -> None:
    import matplotlib.pyplot as plt

    lms = sorted({float(r["lambda_m"]) for r in rows})
    lds = sorted({float(r["lambda_d"]) for r in rows})
    grid = np.full((len(lms), len(lds)), np.nan)
    for r in rows:
        grid[lms.index(float(r["lambda_m"])), lds.index(float(r["lambda_d"]))] = float(r["accuracy"])
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(grid, cmap="viridis", origin="lower", aspect="auto")
    ax.set_xticks(range(len(lds)), [f"{v:g}" for v in lds])
    ax.set_yticks(range(len(lms)), [f"{v:g}" for v in lms])
    ax.set_xlabel("lambda_d")
    ax.set_ylabel("lambda_m")
    ax.set_title("target accuracy [%]")
    for i in range(len(lms)):
        for j in range(len(lds)):
            if np.isfinite(grid[i, j]):
                ax.text(j, i, f"{grid[i, j]:.1f}", ha="center", va="center", color="white", fontsize=8)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def cmd_report(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.inputs:
        path = Path(name)
        out_png = out_dir / (path.stem + ".png")
        if path.suffix == ".json":
            with open(path) as fh:
                _plot_confusion(json.load(fh), out_png)
        elif path.suffix == ".jsonl":
            _plot_metrics(path, out_png)
        elif path.suffix == ".csv":
            with open(path, newline="") as fh:
                rows = list(csv.DictReader(fh))
            if rows and "lambda_m" in rows[0]:
                _plot_sweep(rows, out_png)
            else:
                _plot_ablation(rows, out_png)
        else:
            raise SystemExit(f"cannot render {name}: expected .json, .jsonl, or .csv")
        print(f"{name} -> {out_png}")
    return 0


def _add_task_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--task", help="built-in task id (T1..T9)")
    p.add_argument("--sources", help="comma-separated source condition ids")
    p.add_argument("--target", help="target condition id")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--batch-per-domain", dest="batch_per_domain", type=int)
    p.add_argument("--lambda-m", dest="lambda_m", type=float)
    p.add_argument("--lambda-d", dest="lambda_d", type=float)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="mmdg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="synthesize a raw multi-modal dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--conditions", default="all", help="comma list of C1..C9, or 'all'")
    p.add_argument("--classes", default="all", help="comma list of class names, or 'all'")
    p.add_argument("--per-class", dest="per_class", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=20.0, help="condition duration in seconds")
    p.add_argument("--snr", help="per-modality SNR override, e.g. vibration=10,acoustic=5")
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("preprocess", help="raw windows -> prepared tensors")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--stats-conditions",
        dest="stats_conditions",
        help="fit normalization stats on these conditions and store normalized data",
    )
    p.set_defaults(fn=cmd_preprocess)

    p = sub.add_parser("train", help="train one model on a task")
    p.add_argument("--data", required=True)
    _add_task_args(p)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--out", help="checkpoint directory")
    p.add_argument("--metrics", help="JSONL loss-curve path")
    p.add_argument("--eval-target", dest="eval_target", action="store_true")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on unseen conditions")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--conditions", help="defaults to the checkpoint task's target")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("ablate", help="run ablation variants on a task")
    p.add_argument("--data", required=True)
    _add_task_args(p)
    p.add_argument("--variants", required=True)
    p.add_argument("--seeds", default="0")
    p.add_argument("--out", help="CSV path")
    p.add_argument("--jsonl", help="JSONL path")
    p.set_defaults(fn=cmd_ablate)

    p = sub.add_parser("sweep", help="grid over loss weights")
    p.add_argument("--data", required=True)
    _add_task_args(p)
    p.add_argument("--lambda-m-grid", dest="lambda_m_grid", required=True)
    p.add_argument("--lambda-d-grid", dest="lambda_d_grid", required=True)
    p.add_argument("--out", help="CSV path")
    p.add_argument("--jsonl", help="JSONL path")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("report", help="render PNGs from result files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_report)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
