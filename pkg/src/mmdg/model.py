"""Full diagnosis network: encoders, two disentanglement levels, fusion, classifier.

The forward pass returns every intermediate the training objective needs:
per-modality features, modality-level invariant/specific pairs, the fused
vector, the domain-level pair, and class logits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import torch
from torch import Tensor, nn

from .disentangle import EMBED_DIM, DisentangledPair, EmbedPair
from .encoders import EncoderConfig, build_encoder
from .fusion import TripleFusion
from .synthgen import MODALITIES

N_CLASSES = 8

FUSION_MODES = ("attention", "concat", "concat_emb", "add", "add_emb")


@dataclass(frozen=True)
class FusionConfig:
    mode: str = "attention"
    heads: int = 8
    head_dim: int = 32
    tokens: int = 8

    def __post_init__(self):
        if self.mode not in FUSION_MODES:
            raise ValueError(f"fusion mode must be one of {FUSION_MODES}")
        if min(self.heads, self.head_dim, self.tokens) <= 0:
            raise ValueError("fusion sizes must be positive")


@dataclass(frozen=True)
class ModelConfig:
    modalities: tuple[str, ...] = MODALITIES
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    embed_dim: int = EMBED_DIM
    n_classes: int = N_CLASSES
    fusion: FusionConfig = field(default_factory=FusionConfig)
    use_modality_disentangle: bool = True

    def __post_init__(self):
        if not self.modalities or any(m not in MODALITIES for m in self.modalities):
            raise ValueError(f"modalities must be a non-empty subset of {MODALITIES}")
        if len(self.modalities) != len(set(self.modalities)):
            raise ValueError("duplicate modalities")
        if len(self.modalities) < 2 and self.use_modality_disentangle:
            raise ValueError("modality disentanglement needs at least 2 modalities")
        if self.embed_dim <= 0 or self.n_classes <= 1:
            raise ValueError("bad embed_dim / n_classes")


class ModelOutputs(NamedTuple):
    features: dict[str, Tensor]  # modality -> [B, feature_dim]
    modality_pairs: dict[str, DisentangledPair] | None  # None for single-modality nets
    fused: Tensor  # [B, fused_dim]
    domain_pair: DisentangledPair  # domain-level invariant/specific, [B, embed_dim]
    logits: Tensor  # [B, n_classes]


class DiagnosisModel(nn.Module):
    """Configurable network covering the full method and its ablations.

    Fusion modes: ``attention`` (three directed cross-attention pairs),
    ``concat``/``concat_emb`` (flat concatenation, optionally re-embedded),
    ``add``/``add_emb`` (element-wise sum, optionally re-embedded). With a
    single modality the fusion stage is skipped and the encoder feature feeds
    the domain-level embedders directly.
    """

    def __init__(self, cfg: ModelConfig = ModelConfig()):
        super().__init__()
        self.cfg = cfg
        self.encoders = nn.ModuleDict({m: build_encoder(m, cfg.encoder) for m in cfg.modalities})

        feat = cfg.encoder.feature_dim
        if cfg.use_modality_disentangle:
            self.modality_embed = nn.ModuleDict(
                {m: EmbedPair(feat, cfg.embed_dim, level="modality", tag=m) for m in cfg.modalities}
            )
            z_dim = 2 * cfg.embed_dim
        else:
            self.modality_embed = None
            z_dim = feat

        self.fusion = None
        self.fusion_embed = None
        if len(cfg.modalities) == 1:
            fused_dim = z_dim
        elif cfg.fusion.mode == "attention":
            self.fusion = TripleFusion(z_dim, cfg.fusion.heads, cfg.fusion.head_dim, cfg.fusion.tokens)
            fused_dim = self.fusion.out_dim
        elif cfg.fusion.mode in ("concat", "concat_emb"):
            fused_dim = z_dim * len(cfg.modalities)
            if cfg.fusion.mode == "concat_emb":
                self.fusion_embed = nn.Sequential(nn.Linear(fused_dim, fused_dim), nn.ReLU())
        else:  # add / add_emb
            fused_dim = z_dim
            if cfg.fusion.mode == "add_emb":
                out = z_dim * len(cfg.modalities)
                self.fusion_embed = nn.Sequential(nn.Linear(z_dim, out), nn.ReLU())
                fused_dim = out
        self.fused_dim = fused_dim

        self.domain_embed = EmbedPair(fused_dim, cfg.embed_dim, level="domain", tag="shared")
        self.classifier = nn.Linear(2 * cfg.embed_dim, cfg.n_classes)

    def _fuse(self, z: dict[str, Tensor]) -> Tensor:
        mods = self.cfg.modalities
        if len(mods) == 1:
            return z[mods[0]]
        if self.fusion is not None:
            return self.fusion(z)
        stacked = [z[m] for m in mods]
        if self.cfg.fusion.mode in ("concat", "concat_emb"):
            fused = torch.cat(stacked, dim=1)
        else:
            fused = torch.stack(stacked, dim=0).sum(dim=0)
        if self.fusion_embed is not None:
            fused = self.fusion_embed(fused)
        return fused

    def forward(self, inputs: Mapping[str, Tensor]) -> ModelOutputs:
        missing = [m for m in self.cfg.modalities if m not in inputs]
        if missing:
            raise KeyError(f"missing modalities {missing}")
        features = {m: self.encoders[m](inputs[m]) for m in self.cfg.modalities}

        if self.modality_embed is not None:
            pairs = {m: self.modality_embed[m](features[m]) for m in self.cfg.modalities}
            z = {m: torch.cat([pairs[m].invariant, pairs[m].specific], dim=1) for m in pairs}
        else:
            pairs = None
            z = dict(features)

        fused = self._fuse(z)
        domain_pair = self.domain_embed(fused)
        logits = self.classifier(torch.cat([domain_pair.invariant, domain_pair.specific], dim=1))
        return ModelOutputs(features=features, modality_pairs=pairs, fused=fused, domain_pair=domain_pair, logits=logits)

    def classify(self, h_invariant: Tensor, h_specific: Tensor) -> Tensor:
        """Class probabilities from a domain-level pair (softmax over classes)."""
        logits = self.classifier(torch.cat([h_invariant, h_specific], dim=1))
        return torch.softmax(logits, dim=1)


def build_model(cfg: ModelConfig = ModelConfig()) -> DiagnosisModel:
    return DiagnosisModel(cfg)


def to_torch(arrays: Mapping[str, "np.ndarray"], device: str = "cpu") -> dict[str, Tensor]:
    """Prepared numpy batches -> channels-first float32 tensors.

    vibration [B, 64, 32, 3] -> [B, 3, 64, 32]; current [B, 1024, 3] ->
    [B, 3, 1024]; acoustic [B, 64, 64, 6] -> [B, 6, 64, 64].
    """
    out = {}
    for m, a in arrays.items():
        t = torch.as_tensor(a, dtype=torch.float32, device=device)
        if t.ndim == 4:
            t = t.permute(0, 3, 1, 2)
        elif t.ndim == 3:
            t = t.permute(0, 2, 1)
        else:
            raise ValueError(f"{m}: expected 3- or 4-D batch, got {t.ndim}-D")
        out[m] = t.contiguous()
    return out
