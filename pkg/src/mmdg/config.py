"""TOML configuration for training runs.

Sections mirror the dataclasses: [train] for the top-level knobs, [mix],
[mmd], [ortho], [fusion], [encoder], [model]. Unknown sections or keys raise
immediately; every key falls back to the dataclass default when absent.

Example:

    [train]
    lambda_m = 0.1
    lambda_d = 0.5
    learning_rate = 1e-3
    batch_per_domain = 64
    epochs = 50
    seed = 0
    variant = "full"

    [mix]
    enabled = true
    gate_p = 0.5
    ext_p = 0.5
    beta_a = 0.2
    beta_b = 0.2

    [mmd]
    bandwidth_multipliers = [0.25, 0.5, 1.0, 2.0, 4.0]

    [ortho]
    norm = "frobenius"

    [fusion]
    mode = "attention"
    heads = 8
    head_dim = 32
    tokens = 8

    [encoder]
    widths = [16, 32, 64, 128]
    feature_dim = 256

    [model]
    modalities = ["vibration", "current", "acoustic"]
    embed_dim = 128
    n_classes = 8
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .augment import MixConfig
from .encoders import EncoderConfig
from .harness import TrainConfig
from .model import FusionConfig, ModelConfig

_TRAIN_KEYS = {
    "lambda_m",
    "lambda_d",
    "learning_rate",
    "batch_per_domain",
    "epochs",
    "seed",
    "variant",
    "holdout_fraction",
    "patience",
    "min_delta",
    "early_stop",
}
_MIX_KEYS = {"enabled", "gate_p", "ext_p", "beta_a", "beta_b"}
_MMD_KEYS = {"bandwidth_multipliers"}
_ORTHO_KEYS = {"norm"}
_FUSION_KEYS = {"mode", "heads", "head_dim", "tokens"}
_ENCODER_KEYS = {"widths", "feature_dim"}
_MODEL_KEYS = {"modalities", "embed_dim", "n_classes", "use_modality_disentangle"}

_SECTIONS = {
    "train": _TRAIN_KEYS,
    "mix": _MIX_KEYS,
    "mmd": _MMD_KEYS,
    "ortho": _ORTHO_KEYS,
    "fusion": _FUSION_KEYS,
    "encoder": _ENCODER_KEYS,
    "model": _MODEL_KEYS,
}


def _check_keys(section: str, given: Mapping[str, Any]) -> None:
    unknown = set(given) - _SECTIONS[section]
    if unknown:
        raise ValueError(f"unknown key(s) in [{section}]: {sorted(unknown)}")


def build_train_config(doc: Mapping[str, Any]) -> TrainConfig:
    """Turn a parsed TOML document into a validated TrainConfig."""
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ValueError(f"unknown config section(s): {sorted(unknown)}")
    for name in doc:
        if not isinstance(doc[name], Mapping):
            raise ValueError(f"[{name}] must be a table")
        _check_keys(name, doc[name])

    mix = MixConfig(**doc.get("mix", {}))

    enc_doc = dict(doc.get("encoder", {}))
    if "widths" in enc_doc:
        enc_doc["widths"] = tuple(int(w) for w in enc_doc["widths"])
    encoder = EncoderConfig(**enc_doc)

    fusion = FusionConfig(**doc.get("fusion", {}))

    model_doc = dict(doc.get("model", {}))
    if "modalities" in model_doc:
        model_doc["modalities"] = tuple(model_doc["modalities"])
    model = ModelConfig(encoder=encoder, fusion=fusion, **model_doc)

    train_doc = dict(doc.get("train", {}))

    mmd_doc = doc.get("mmd", {})
    if "bandwidth_multipliers" in mmd_doc:
        train_doc["mmd_multipliers"] = tuple(float(v) for v in mmd_doc["bandwidth_multipliers"])

    ortho_doc = doc.get("ortho", {})
    if "norm" in ortho_doc:
        train_doc["ortho_norm"] = ortho_doc["norm"]

    return TrainConfig(mix=mix, model=model, **train_doc)


def load_config(path: str | Path) -> TrainConfig:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return build_train_config(doc)
