"""Training and evaluation harness for cross-condition generalization.

A task names its source conditions and one unseen target condition. Training
sees only source-domain data: normalization statistics are fit on the source
training split, batches are class-stratified per domain and concatenated into
one forward pass, and the objective couples per-domain cross-entropy with the
two disentanglement losses. An audit object records which conditions were
actually touched so leakage is checkable after the fact.
"""

from __future__ import annotations

import copy
import json
import math
import zlib
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

import numpy as np
import torch
import torch.nn.functional as F
from torch import Tensor

from .augment import ClassDomainIndex, MixConfig, MixCounters, mix_sample
from .datasets import SignalDataset
from .disentangle import DEFAULT_MULTIPLIERS, KernelSpec, domain_loss, modality_loss
from .encoders import EncoderConfig
from .model import DiagnosisModel, FusionConfig, ModelConfig, ModelOutputs, build_model, to_torch
from .preprocess import NormStats, fit_norm_stats, normalize_arrays
from .synthgen import MODALITIES


@dataclass(frozen=True)
class TaskSpec:
    """Generalization task: train on source conditions, test on the target."""

    id: str
    source_conditions: tuple[str, ...]
    target_condition: str

    def __post_init__(self):
        if len(self.source_conditions) < 2:
            raise ValueError("a task needs at least 2 source conditions")
        if len(set(self.source_conditions)) != len(self.source_conditions):
            raise ValueError("duplicate source conditions")
        if self.target_condition in self.source_conditions:
            raise ValueError("target condition must not be a source")


def standard_tasks() -> dict[str, TaskSpec]:
    """Nine built-in tasks over the standard conditions.

    T1-T4: leave one constant-speed condition out of {C1..C4}. T5-T9: train
    on {C1, C2, C3}, test on each varying-speed/load condition C5..C9.
    """
    tasks = {}
    const = ("C1", "C2", "C3", "C4")
    for i, target in enumerate(const, start=1):
        sources = tuple(c for c in const if c != target)
        tasks[f"T{i}"] = TaskSpec(f"T{i}", sources, target)
    for i, target in enumerate(("C5", "C6", "C7", "C8", "C9"), start=5):
        tasks[f"T{i}"] = TaskSpec(f"T{i}", ("C1", "C2", "C3"), target)
    return tasks


VARIANTS = (
    "full",
    "baseline",
    "wo_dis",
    "wo_modality_dis",
    "wo_domain_dis",
    "wo_mix",
    "concat",
    "concat_emb",
    "add",
    "add_emb",
    "single_vib",
    "single_cur",
    "single_aco",
)

_SINGLE_MODALITY = {"single_vib": "vibration", "single_cur": "current", "single_aco": "acoustic"}


@dataclass(frozen=True)
class TrainConfig:
    lambda_m: float = 0.1
    lambda_d: float = 0.5
    learning_rate: float = 1e-3
    batch_per_domain: int = 64
    epochs: int = 50
    seed: int = 0
    variant: str = "full"
    holdout_fraction: float = 0.1
    patience: int = 5
    min_delta: float = 1e-3
    early_stop: bool = True
    mix: MixConfig = field(default_factory=MixConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    mmd_multipliers: tuple[float, ...] = DEFAULT_MULTIPLIERS
    ortho_norm: str = "frobenius"

    def __post_init__(self):
        if self.lambda_m < 0 or self.lambda_d < 0:
            raise ValueError("loss weights must be >= 0")
        if self.learning_rate <= 0 or self.batch_per_domain <= 0 or self.epochs <= 0:
            raise ValueError("learning_rate, batch_per_domain, epochs must be positive")
        if not 0.0 <= self.holdout_fraction < 1.0:
            raise ValueError("holdout_fraction must lie in [0, 1)")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.ortho_norm != "frobenius":
            raise ValueError("only the frobenius covariance norm is supported")
        if self.patience <= 0:
            raise ValueError("patience must be positive")
        if self.min_delta < 0:
            raise ValueError("min_delta must be >= 0")


def apply_variant(cfg: TrainConfig) -> TrainConfig:
    """Resolve a variant name into the concrete configuration it denotes.

    ``wo_dis`` is literally the full path with both loss weights zero, so its
    behaviour is bitwise identical to ``full`` with lambda_m = lambda_d = 0.
    """
    v = cfg.variant
    if v in ("full", "wo_mix", "wo_dis", "wo_modality_dis", "wo_domain_dis"):
        out = cfg
        if v == "wo_dis":
            out = replace(out, lambda_m=0.0, lambda_d=0.0)
        elif v == "wo_modality_dis":
            out = replace(out, lambda_m=0.0)
        elif v == "wo_domain_dis":
            out = replace(out, lambda_d=0.0)
        if v == "wo_mix":
            out = replace(out, mix=replace(cfg.mix, enabled=False))
        return out
    if v == "baseline":
        model = replace(cfg.model, fusion=replace(cfg.model.fusion, mode="concat"))
        return replace(
            cfg, lambda_m=0.0, lambda_d=0.0, mix=replace(cfg.mix, enabled=False), model=model
        )
    if v in ("concat", "concat_emb", "add", "add_emb"):
        model = replace(cfg.model, fusion=replace(cfg.model.fusion, mode=v))
        return replace(cfg, model=model)
    if v in _SINGLE_MODALITY:
        model = replace(
            cfg.model, modalities=(_SINGLE_MODALITY[v],), use_modality_disentangle=False
        )
        return replace(cfg, lambda_m=0.0, model=model)
    raise ValueError(f"unknown variant {v!r}")


def train_config_from_dict(d: Mapping) -> TrainConfig:
    """Rebuild a TrainConfig from its ``dataclasses.asdict`` form."""
    d = dict(d)
    mix = MixConfig(**d.pop("mix"))
    md = dict(d.pop("model"))
    encoder = EncoderConfig(
        widths=tuple(md["encoder"]["widths"]), feature_dim=md["encoder"]["feature_dim"]
    )
    fusion = FusionConfig(**md["fusion"])
    model = ModelConfig(
        modalities=tuple(md["modalities"]),
        encoder=encoder,
        embed_dim=md["embed_dim"],
        n_classes=md["n_classes"],
        fusion=fusion,
        use_modality_disentangle=md["use_modality_disentangle"],
    )
    d["mmd_multipliers"] = tuple(d["mmd_multipliers"])
    return TrainConfig(mix=mix, model=model, **d)


def _substream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(seed), zlib.crc32(name.encode()))))


def _substream_int(seed: int, name: str) -> int:
    return int(_substream(seed, name).integers(2**63))


def holdout_split(
    ds: SignalDataset, fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Per-(condition, class) stratified split into (train_idx, val_idx)."""
    if fraction <= 0:
        return np.arange(ds.n), np.array([], dtype=np.int64)
    val = []
    for d in sorted(set(ds.domains.tolist())):
        for c in sorted(set(ds.labels.tolist())):
            idx = np.flatnonzero((ds.domains == d) & (ds.labels == c))
            if idx.size < 2:
                continue
            k = max(1, int(round(fraction * idx.size)))
            val.extend(rng.permutation(idx)[:k].tolist())
    val = np.array(sorted(val), dtype=np.int64)
    train = np.setdiff1d(np.arange(ds.n), val)
    return train, val


class StratifiedSampler:
    """Yields per-epoch batches: for every domain, a class-interleaved index
    block of ``batch_per_domain`` samples. When per-class pools are balanced
    and batch_per_domain is a multiple of the class count, every batch covers
    every class in every domain."""

    def __init__(
        self,
        labels: np.ndarray,
        domains: np.ndarray,
        batch_per_domain: int,
        rng: np.random.Generator,
    ):
        self.rng = rng
        self.batch_per_domain = batch_per_domain
        self.domain_ids = sorted(set(domains.tolist()))
        self.class_ids = sorted(set(labels.tolist()))
        self.pools = {
            d: {
                c: np.flatnonzero((domains == d) & (labels == c))
                for c in self.class_ids
                if ((domains == d) & (labels == c)).any()
            }
            for d in self.domain_ids
        }
        smallest = min(sum(p.size for p in pools.values()) for pools in self.pools.values())
        self.batches_per_epoch = smallest // batch_per_domain
        if self.batches_per_epoch == 0:
            raise ValueError(
                f"batch_per_domain={batch_per_domain} exceeds smallest domain size {smallest}"
            )

    def _domain_sequence(self, d: str) -> np.ndarray:
        shuffled = [self.rng.permutation(p) for p in self.pools[d].values()]
        longest = max(len(p) for p in shuffled)
        seq = [p[i] for i in range(longest) for p in shuffled if i < len(p)]
        return np.array(seq, dtype=np.int64)

    def epoch(self) -> list[dict[str, np.ndarray]]:
        seqs = {d: self._domain_sequence(d) for d in self.domain_ids}
        b = self.batch_per_domain
        return [
            {d: seqs[d][i * b : (i + 1) * b] for d in self.domain_ids}
            for i in range(self.batches_per_epoch)
        ]


class LossBundle(NamedTuple):
    cls: Tensor
    modality: Tensor
    domain: Tensor
    total: Tensor


def total_loss(
    outputs: ModelOutputs,
    labels: Tensor,
    domains: np.ndarray,
    cfg: TrainConfig,
    kernel: KernelSpec | None = None,
) -> LossBundle:
    """Per-domain-averaged cross-entropy plus weighted disentanglement losses.

    The modality loss is computed within each domain's slice of the batch and
    averaged across domains; the domain loss compares the domains' slices of
    the shared domain-level embeddings. Labels are 1-based class ids.
    """
    if kernel is None:
        kernel = KernelSpec(multipliers=cfg.mmd_multipliers)
    dom_ids = sorted(set(domains.tolist()))
    masks = {d: torch.as_tensor(domains == d, device=labels.device) for d in dom_ids}

    cls = torch.stack(
        [F.cross_entropy(outputs.logits[m], labels[m] - 1) for m in masks.values()]
    ).mean()
    zero = torch.zeros((), dtype=outputs.logits.dtype, device=outputs.logits.device)

    if outputs.modality_pairs is not None and len(outputs.modality_pairs) >= 2:
        lm = torch.stack(
            [
                modality_loss({k: p.rows(masks[d]) for k, p in outputs.modality_pairs.items()}, kernel)
                for d in dom_ids
            ]
        ).mean()
    else:
        lm = zero

    if len(dom_ids) >= 2:
        ld = domain_loss(
            {d: outputs.domain_pair.rows(masks[d]).retag(d) for d in dom_ids}, kernel
        )
    else:
        ld = zero

    total = cls + cfg.lambda_m * lm + cfg.lambda_d * ld
    return LossBundle(cls, lm, ld, total)


@dataclass
class EvalReport:
    accuracy: float  # percent correct
    n: int
    confusion: np.ndarray  # [n_classes, n_classes], rows true class, cols predicted
    task_id: str | None = None
    variant: str | None = None
    seed: int | None = None
    conditions: tuple[str, ...] = ()

    def per_class_accuracy(self) -> np.ndarray:
        totals = self.confusion.sum(axis=1)
        return 100.0 * np.diag(self.confusion) / np.maximum(totals, 1)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "n": self.n,
            "confusion": self.confusion.tolist(),
            "task_id": self.task_id,
            "variant": self.variant,
            "seed": self.seed,
            "conditions": list(self.conditions),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "EvalReport":
        return cls(
            accuracy=float(d["accuracy"]),
            n=int(d["n"]),
            confusion=np.asarray(d["confusion"], dtype=np.int64),
            task_id=d.get("task_id"),
            variant=d.get("variant"),
            seed=d.get("seed"),
            conditions=tuple(d.get("conditions", ())),
        )


@dataclass
class RunAudit:
    """What a training run actually touched; the leakage paper trail."""

    conditions_batched: tuple[str, ...]
    stats_sources: tuple[str, ...]
    n_train: int
    n_val: int
    mix: dict


@dataclass
class TrainResult:
    model: DiagnosisModel
    stats: NormStats
    cfg: TrainConfig  # post-variant, what actually ran
    requested_cfg: TrainConfig
    task: TaskSpec
    history: list[dict]
    val_history: list[dict]
    audit: RunAudit
    counters: MixCounters
    best_epoch: int  # last epoch the holdout accuracy improved (patience anchor)
    epochs_run: int

    def save(self, out_dir: str | Path) -> Path:
        return save_checkpoint(self, out_dir)


def _assemble_batch(
    trainset: SignalDataset,
    idx_by_domain: Mapping[str, np.ndarray],
    index: ClassDomainIndex,
    mix_cfg: MixConfig,
    rng: np.random.Generator,
    counters: MixCounters,
    stats: NormStats,
) -> tuple[dict[str, Tensor], Tensor, np.ndarray]:
    samples = []
    for d in sorted(idx_by_domain):
        for i in idx_by_domain[d]:
            samples.append(mix_sample(trainset.sample(int(i)), index, trainset, mix_cfg, rng, counters))
    arrays = {m: np.stack([s.modality(m) for s in samples]) for m in MODALITIES}
    tensors = to_torch(normalize_arrays(arrays, stats))
    labels = torch.tensor([s.label for s in samples], dtype=torch.int64)
    domains = np.array([s.condition_id for s in samples])
    return tensors, labels, domains


def _predict(
    model: DiagnosisModel,
    ds: SignalDataset,
    stats: NormStats,
    batch_size: int = 256,
) -> tuple[np.ndarray, float]:
    """Eval-mode class predictions (1-based) and mean cross-entropy.

    No mixing, no gradient. The cross-entropy is the early-stopping monitor:
    unlike holdout accuracy it keeps moving after the sources are fit, which
    matters for the disentanglement phase of training.
    """
    model.eval()
    preds = np.empty(ds.n, dtype=np.int64)
    ce_sum = 0.0
    with torch.no_grad():
        for lo in range(0, ds.n, batch_size):
            hi = min(ds.n, lo + batch_size)
            arrays = {m: ds.arrays[m][lo:hi] for m in MODALITIES}
            tensors = to_torch(normalize_arrays(arrays, stats))
            out = model({m: tensors[m] for m in model.cfg.modalities})
            preds[lo:hi] = out.logits.argmax(dim=1).numpy() + 1
            target = torch.as_tensor(ds.labels[lo:hi], dtype=torch.int64) - 1
            ce_sum += float(F.cross_entropy(out.logits, target, reduction="sum"))
    return preds, ce_sum / ds.n


def _confusion(labels: np.ndarray, preds: np.ndarray, n_classes: int) -> np.ndarray:
    c = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(labels, preds):
        c[int(t) - 1, int(p) - 1] += 1
    return c


def train(
    task: TaskSpec,
    cfg: TrainConfig,
    data: SignalDataset,
    metrics_path: str | Path | None = None,
) -> TrainResult:
    """Train one model on the task's source conditions.

    ``data`` is an unnormalized prepared dataset; it may contain the target
    condition, which is never touched (sources are sliced out up front, and
    the audit records every condition id that entered a batch). Aborts with
    RuntimeError if the loss goes non-finite.
    """
    requested = cfg
    cfg = apply_variant(cfg)
    if data.kind != "prepared":
        raise ValueError("train expects a prepared dataset")
    if data.stats_sources is not None:
        raise ValueError("train expects unnormalized data; it fits its own statistics")
    missing = set(task.source_conditions) - set(data.condition_ids())
    if missing:
        raise KeyError(f"dataset lacks source conditions {sorted(missing)}")

    src = data.for_conditions(task.source_conditions)
    train_idx, val_idx = holdout_split(src, cfg.holdout_fraction, _substream(cfg.seed, "holdout"))
    trainset = src.subset(train_idx)
    valset = src.subset(val_idx) if val_idx.size else None

    stats = fit_norm_stats(trainset)
    index = ClassDomainIndex.build(trainset.labels, trainset.domains)
    sampler = StratifiedSampler(
        trainset.labels, trainset.domains, cfg.batch_per_domain, _substream(cfg.seed, "sampler")
    )
    mix_rng = _substream(cfg.seed, "mix")
    counters = MixCounters()
    kernel = KernelSpec(multipliers=cfg.mmd_multipliers)

    torch.manual_seed(_substream_int(cfg.seed, "torch-init"))
    model = build_model(cfg.model)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    history: list[dict] = []
    val_history: list[dict] = []
    conditions_batched: set[str] = set()
    best_epoch = -1
    best_acc = -math.inf
    best_ce = math.inf
    best_state = None
    epochs_run = 0
    step = 0
    mfh = open(metrics_path, "w") if metrics_path else None
    try:
        for epoch in range(cfg.epochs):
            model.train()
            for idx_by_domain in sampler.epoch():
                conditions_batched.update(idx_by_domain.keys())
                tensors, labels, domains = _assemble_batch(
                    trainset, idx_by_domain, index, cfg.mix, mix_rng, counters, stats
                )
                out = model({m: tensors[m] for m in cfg.model.modalities})
                bundle = total_loss(out, labels, domains, cfg, kernel)
                if not torch.isfinite(bundle.total):
                    raise RuntimeError(
                        f"non-finite loss at epoch {epoch} step {step}: "
                        f"cls={float(bundle.cls.detach())} "
                        f"modality={float(bundle.modality.detach())} "
                        f"domain={float(bundle.domain.detach())}"
                    )
                opt.zero_grad()
                bundle.total.backward()
                opt.step()
                rec = {
                    "kind": "step",
                    "epoch": epoch,
                    "step": step,
                    "cls": float(bundle.cls.detach()),
                    "modality": float(bundle.modality.detach()),
                    "domain": float(bundle.domain.detach()),
                    "total": float(bundle.total.detach()),
                }
                history.append(rec)
                if mfh:
                    mfh.write(json.dumps(rec) + "\n")
                step += 1
            epochs_run = epoch + 1
            if valset is not None:
                preds, val_ce = _predict(model, valset, stats)
                acc = 100.0 * float(np.mean(preds == valset.labels))
                vrec = {"kind": "epoch", "epoch": epoch, "val_accuracy": acc, "val_loss": val_ce}
                val_history.append(vrec)
                if mfh:
                    mfh.write(json.dumps(vrec) + "\n")
                # Patience is anchored on holdout accuracy; the kept state is
                # the lowest-CE epoch among those at the best accuracy so far.
                # Accuracy alone saturates while the logits are still soft, and
                # CE alone keeps creeping for dozens of epochs of source
                # polishing that transfers badly, so the anchor and the restore
                # point are tracked separately. CE gains below min_delta do not
                # move the restore point.
                if acc > best_acc:
                    best_acc = acc
                    best_epoch = epoch
                    best_ce = val_ce
                    best_state = copy.deepcopy(model.state_dict())
                elif acc >= best_acc and val_ce < best_ce - cfg.min_delta:
                    best_ce = val_ce
                    best_state = copy.deepcopy(model.state_dict())
                if cfg.early_stop and epoch - best_epoch >= cfg.patience:
                    break
    finally:
        if mfh:
            mfh.close()
    if cfg.early_stop and best_state is not None:
        model.load_state_dict(best_state)

    audit = RunAudit(
        conditions_batched=tuple(sorted(conditions_batched)),
        stats_sources=stats.source_conditions,
        n_train=trainset.n,
        n_val=0 if valset is None else valset.n,
        mix={
            "samples": counters.samples,
            "modality_mixed": dict(counters.modality_mixed),
            "external": counters.external,
            "internal": counters.internal,
            "fallback": counters.fallback,
        },
    )
    return TrainResult(
        model=model,
        stats=stats,
        cfg=cfg,
        requested_cfg=requested,
        task=task,
        history=history,
        val_history=val_history,
        audit=audit,
        counters=counters,
        best_epoch=best_epoch,
        epochs_run=epochs_run,
    )


def evaluate(result: TrainResult, data: SignalDataset, batch_size: int = 256) -> EvalReport:
    """Evaluate on data from conditions the normalization never saw.

    Refuses to run if any condition in ``data`` contributed to the stored
    normalization statistics (that would be source/target leakage). Mixing is
    never applied here; the mix counters are untouched.
    """
    overlap = set(data.condition_ids()) & set(result.stats.source_conditions)
    if overlap:
        raise ValueError(f"evaluation data overlaps normalization sources: {sorted(overlap)}")
    preds, _ = _predict(result.model, data, result.stats, batch_size)
    acc = 100.0 * float(np.mean(preds == data.labels))
    return EvalReport(
        accuracy=acc,
        n=data.n,
        confusion=_confusion(data.labels, preds, result.cfg.model.n_classes),
        task_id=result.task.id,
        variant=result.cfg.variant,
        seed=result.cfg.seed,
        conditions=data.condition_ids(),
    )


def run_ablation(
    variant: str,
    task: TaskSpec,
    cfg: TrainConfig,
    data: SignalDataset,
    metrics_path: str | Path | None = None,
) -> EvalReport:
    """Train one ablation variant and evaluate it on the task's target."""
    result = train(task, replace(cfg, variant=variant), data, metrics_path=metrics_path)
    return evaluate(result, data.for_conditions([task.target_condition]))


def sweep(
    task: TaskSpec,
    lambda_m_values: Sequence[float],
    lambda_d_values: Sequence[float],
    cfg: TrainConfig,
    data: SignalDataset,
) -> list[dict]:
    """Grid over loss weights; one record per point with its run manifest."""
    records = []
    for lm in lambda_m_values:
        for ld in lambda_d_values:
            cfg2 = replace(cfg, lambda_m=float(lm), lambda_d=float(ld), variant="full")
            result = train(task, cfg2, data)
            rep = evaluate(result, data.for_conditions([task.target_condition]))
            records.append(
                {
                    "task": task.id,
                    "lambda_m": float(lm),
                    "lambda_d": float(ld),
                    "seed": cfg2.seed,
                    "accuracy": rep.accuracy,
                    "n": rep.n,
                    "config": asdict(cfg2),
                }
            )
    return records


def save_checkpoint(result: TrainResult, out_dir: str | Path) -> Path:
    """Write params.npz (named tensors) + manifest.json (shapes, config, stats)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = result.model.state_dict()
    np.savez(out / "params.npz", **{k: v.detach().cpu().numpy() for k, v in state.items()})
    manifest = {
        "format": "mmdg-checkpoint-v1",
        "task": {
            "id": result.task.id,
            "source_conditions": list(result.task.source_conditions),
            "target_condition": result.task.target_condition,
        },
        "variant": result.cfg.variant,
        "config": asdict(result.requested_cfg),
        "param_shapes": {k: list(v.shape) for k, v in state.items()},
        "stats": result.stats.to_dict(),
        "audit": asdict(result.audit),
        "best_epoch": result.best_epoch,
        "epochs_run": result.epochs_run,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return out


def load_checkpoint(path: str | Path) -> TrainResult:
    """Rebuild a trained model from a checkpoint directory."""
    root = Path(path)
    with open(root / "manifest.json") as fh:
        manifest = json.load(fh)
    requested = train_config_from_dict(manifest["config"])
    cfg = apply_variant(requested)
    model = build_model(cfg.model)
    with np.load(root / "params.npz") as arrays:
        state = {k: torch.from_numpy(arrays[k]) for k in arrays.files}
    for k, shape in manifest["param_shapes"].items():
        if list(state[k].shape) != shape:
            raise ValueError(f"parameter {k} has shape {list(state[k].shape)}, manifest says {shape}")
    model.load_state_dict(state)
    task = TaskSpec(
        manifest["task"]["id"],
        tuple(manifest["task"]["source_conditions"]),
        manifest["task"]["target_condition"],
    )
    audit = RunAudit(**{**manifest["audit"], "conditions_batched": tuple(manifest["audit"]["conditions_batched"]), "stats_sources": tuple(manifest["audit"]["stats_sources"])})
    return TrainResult(
        model=model,
        stats=NormStats.from_dict(manifest["stats"]),
        cfg=cfg,
        requested_cfg=requested,
        task=task,
        history=[],
        val_history=[],
        audit=audit,
        counters=MixCounters(),
        best_epoch=manifest["best_epoch"],
        epochs_run=manifest["epochs_run"],
    )
