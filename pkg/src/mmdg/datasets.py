"""In-memory dataset model shared by the pipeline stages.

A :class:`SignalDataset` holds per-modality arrays plus aligned label and
condition-id vectors. ``kind`` distinguishes raw waveform windows from
prepared (time-frequency / normalized) tensors; the array shapes carry the
actual layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import container
from .synthgen import MODALITIES, RawMultiModalSample


class Sample(NamedTuple):
    """A single sample view: three modality arrays plus provenance."""

    vibration: np.ndarray
    current: np.ndarray
    acoustic: np.ndarray
    label: int
    condition_id: str

    def modality(self, name: str) -> np.ndarray:
        return getattr(self, name)


@dataclass
class SignalDataset:
    kind: str  # "raw" or "prepared"
    arrays: dict[str, np.ndarray]  # modality -> [N, ...]
    labels: np.ndarray  # [N] int64
    domains: np.ndarray  # [N] condition ids (unicode)
    meta: dict = field(default_factory=dict)
    # set by preprocess.normalize: condition ids whose statistics were applied
    stats_sources: tuple[str, ...] | None = None

    def __post_init__(self):
        n = self.n
        for m, a in self.arrays.items():
            if a.shape[0] != n:
                raise ValueError(f"{m} has {a.shape[0]} samples, labels have {n}")
        if self.domains.shape[0] != n:
            raise ValueError("domains misaligned with labels")

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    def condition_ids(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.domains.tolist())))

    def class_labels(self) -> tuple[int, ...]:
        return tuple(sorted(set(int(v) for v in self.labels)))

    def sample(self, i: int) -> Sample:
        return Sample(
            vibration=self.arrays["vibration"][i],
            current=self.arrays["current"][i],
            acoustic=self.arrays["acoustic"][i],
            label=int(self.labels[i]),
            condition_id=str(self.domains[i]),
        )

    def subset(self, idx: np.ndarray | Sequence[int]) -> "SignalDataset":
        idx = np.asarray(idx)
        return replace(
            self,
            arrays={m: a[idx] for m, a in self.arrays.items()},
            labels=self.labels[idx],
            domains=self.domains[idx],
        )

    def for_conditions(self, condition_ids: Iterable[str]) -> "SignalDataset":
        wanted = set(condition_ids)
        missing = wanted - set(self.condition_ids())
        if missing:
            raise KeyError(f"conditions not in dataset: {sorted(missing)}")
        mask = np.isin(self.domains, sorted(wanted))
        return self.subset(np.flatnonzero(mask))


def from_samples(samples: Sequence[RawMultiModalSample]) -> SignalDataset:
    """Stack raw generator windows into a dataset."""
    if not samples:
        raise ValueError("no samples")
    arrays = {m: np.stack([getattr(s, m) for s in samples]) for m in MODALITIES}
    labels = np.array([s.label for s in samples], dtype=np.int64)
    domains = np.array([s.condition_id for s in samples])
    return SignalDataset(kind="raw", arrays=arrays, labels=labels, domains=domains)


def save(ds: SignalDataset, out_dir: str | Path, extra_meta: Mapping | None = None) -> Path:
    """Persist a dataset to the binary container format."""
    blocks: dict[tuple[str, int], dict[str, np.ndarray]] = {}
    for cond in ds.condition_ids():
        for label in ds.class_labels():
            mask = (ds.domains == cond) & (ds.labels == label)
            if not mask.any():
                continue
            idx = np.flatnonzero(mask)
            blocks[(cond, label)] = {m: ds.arrays[m][idx] for m in ds.arrays}
    manifest = {
        "format": "mmdg-dataset-v1",
        "kind": ds.kind,
        "modalities": list(ds.arrays.keys()),
        "shapes": {m: list(ds.arrays[m].shape[1:]) for m in ds.arrays},
        "meta": dict(ds.meta, **(extra_meta or {})),
    }
    if ds.stats_sources is not None:
        manifest["stats_sources"] = list(ds.stats_sources)
    return container.write_dataset(out_dir, manifest, blocks)


def load(path: str | Path) -> SignalDataset:
    """Load a dataset directory written by :func:`save`."""
    manifest, blocks = container.read_dataset(path)
    modalities = manifest["modalities"]
    parts = {m: [] for m in modalities}
    labels, domains = [], []
    for (cond, label) in sorted(blocks.keys()):
        arrays = blocks[(cond, label)]
        n = arrays[modalities[0]].shape[0]
        for m in modalities:
            parts[m].append(arrays[m])
        labels.append(np.full(n, label, dtype=np.int64))
        domains.append(np.full(n, cond, dtype=object))
    stats_sources = manifest.get("stats_sources")
    return SignalDataset(
        kind=manifest["kind"],
        arrays={m: np.concatenate(parts[m]) for m in modalities},
        labels=np.concatenate(labels),
        domains=np.concatenate(domains).astype(str),
        meta=manifest.get("meta", {}),
        stats_sources=tuple(stats_sources) if stats_sources is not None else None,
    )


def merge(parts: Sequence[SignalDataset]) -> SignalDataset:
    """Concatenate datasets of the same kind and modality layout."""
    if not parts:
        raise ValueError("nothing to merge")
    kinds = {p.kind for p in parts}
    if len(kinds) != 1:
        raise ValueError(f"mixed dataset kinds {sorted(kinds)}")
    first = parts[0]
    for p in parts[1:]:
        if set(p.arrays) != set(first.arrays):
            raise ValueError("modality sets differ")
    return SignalDataset(
        kind=first.kind,
        arrays={m: np.concatenate([p.arrays[m] for p in parts]) for m in first.arrays},
        labels=np.concatenate([p.labels for p in parts]),
        domains=np.concatenate([p.domains for p in parts]),
        meta=dict(first.meta),
    )
