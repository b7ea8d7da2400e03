"""Cross-domain mixed fusion augmentation.

Each modality of a training sample is, with probability ``gate_p``, blended
with the same modality of a same-class sample drawn from a *different* source
domain. The blend coefficient comes from Beta(0.2, 0.2); half the time it is
reflected outside [0, 1] (external interpolation), stretching coverage toward
one-and-a-half times the anchor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .datasets import Sample, SignalDataset
from .synthgen import MODALITIES

# Beta draws can hit 1.0 exactly (rarely), which would escape (0, 1); and the
# external map 2 - alpha' needs alpha' <= 1 - 2^-52 so the result stays
# strictly above 1.0 after rounding. Hence a two-ulp clamp at the top.
_ALPHA_HI = np.nextafter(np.nextafter(1.0, 0.0), 0.0)
# Mirror of the top clamp (2^-52): keeps 1 - alpha' <= _ALPHA_HI exactly, so
# the external branch stays strictly above 1 even for near-zero draws.
_ALPHA_LO = 1.0 - _ALPHA_HI


@dataclass(frozen=True)
class MixConfig:
    enabled: bool = True
    gate_p: float = 0.5  # probability a modality is mixed at all
    ext_p: float = 0.5  # probability the coefficient is reflected outside [0, 1]
    beta_a: float = 0.2
    beta_b: float = 0.2

    def __post_init__(self):
        for name in ("gate_p", "ext_p"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.beta_a <= 0 or self.beta_b <= 0:
            raise ValueError("beta parameters must be positive")


class ClassDomainIndex:
    """Index of training positions keyed by (condition id, class label).

    Built once per training split; every sample lands in exactly one bucket.
    """

    def __init__(self, buckets: dict[tuple[str, int], np.ndarray], domains: tuple[str, ...], labels: tuple[int, ...]):
        self.buckets = buckets
        self.domains = domains
        self.labels = labels

    @classmethod
    def build(cls, labels: np.ndarray, domains: np.ndarray) -> "ClassDomainIndex":
        labels = np.asarray(labels)
        domains = np.asarray(domains)
        if labels.shape != domains.shape:
            raise ValueError("labels and domains misaligned")
        buckets: dict[tuple[str, int], np.ndarray] = {}
        dom_ids = sorted(set(domains.tolist()))
        lab_ids = sorted(set(int(v) for v in labels))
        for d in dom_ids:
            for l in lab_ids:
                idx = np.flatnonzero((domains == d) & (labels == l))
                if idx.size:
                    buckets[(d, l)] = idx
        total = sum(v.size for v in buckets.values())
        if total != labels.shape[0]:
            raise AssertionError("index buckets do not partition the dataset")
        return cls(buckets, tuple(dom_ids), tuple(lab_ids))

    def partners(self, anchor_domain: str, label: int) -> list[str]:
        """Domains other than the anchor's that hold this label."""
        return [d for d in self.domains if d != anchor_domain and (d, label) in self.buckets]


@dataclass
class MixCounters:
    """Bookkeeping for audits: how often mixing ran, fell back, went external."""

    samples: int = 0
    modality_mixed: dict = field(default_factory=lambda: {m: 0 for m in MODALITIES})
    external: int = 0
    internal: int = 0
    fallback: int = 0  # no partner domain had the class: anchor kept verbatim


def mix_coefficient(alpha_prime: float, external: bool) -> float:
    """Map a Beta draw to the final blend coefficient.

    Internal: alpha = alpha' in (0, 1). External: alpha = 2 - max(alpha',
    1 - alpha'), which lands in (1, 1.5].
    """
    if not 0.0 < alpha_prime < 1.0:
        raise ValueError("alpha_prime must lie strictly inside (0, 1)")
    if external:
        return 2.0 - max(alpha_prime, 1.0 - alpha_prime)
    return alpha_prime


def sample_mix_coefficient(rng: np.random.Generator, cfg: MixConfig) -> tuple[float, bool]:
    """Draw (alpha, external) for one modality."""
    alpha_prime = float(np.clip(rng.beta(cfg.beta_a, cfg.beta_b), _ALPHA_LO, _ALPHA_HI))
    external = rng.random() < cfg.ext_p
    return mix_coefficient(alpha_prime, external), external


def mix_sample(
    anchor: Sample,
    index: ClassDomainIndex,
    dataset: SignalDataset,
    cfg: MixConfig,
    rng: np.random.Generator,
    counters: MixCounters | None = None,
) -> Sample:
    """Apply per-modality cross-domain mixing to one anchor sample.

    For each modality independently: gate with probability ``gate_p``; if
    gated, pick a uniform partner domain (any other domain holding the
    anchor's class), a uniform partner sample within it, and blend
    ``alpha * anchor + (1 - alpha) * partner``. The label is unchanged. If no
    other domain holds the class, the anchor passes through and the fallback
    counter is bumped.
    """
    if counters is not None:
        counters.samples += 1
    if not cfg.enabled:
        return anchor

    out = {}
    for modality in MODALITIES:
        a = anchor.modality(modality)
        if rng.random() >= cfg.gate_p:
            out[modality] = a
            continue
        partner_domains = index.partners(anchor.condition_id, anchor.label)
        if not partner_domains:
            if counters is not None:
                counters.fallback += 1
            out[modality] = a
            continue
        dom = partner_domains[rng.integers(len(partner_domains))]
        bucket = index.buckets[(dom, anchor.label)]
        j = int(bucket[rng.integers(bucket.size)])
        alpha, external = sample_mix_coefficient(rng, cfg)
        partner = dataset.arrays[modality][j]
        out[modality] = (alpha * a.astype(np.float64) + (1.0 - alpha) * partner.astype(np.float64)).astype(
            np.float32
        )
        if counters is not None:
            counters.modality_mixed[modality] += 1
            if external:
                counters.external += 1
            else:
                counters.internal += 1
    return Sample(
        vibration=out["vibration"],
        current=out["current"],
        acoustic=out["acoustic"],
        label=anchor.label,
        condition_id=anchor.condition_id,
    )
