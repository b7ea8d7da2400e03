"""Raw windows -> model-ready tensors.

Vibration becomes a log-magnitude STFT image (64 bins x 32 frames x 3
channels), acoustic a log-power HTK mel spectrogram (64 mels x 64 frames x 6
channels), and current passes through as the raw waveform (1024 x 3).
Normalization is per-channel standardization with statistics fit on source
domains only; the statistics object records which conditions it saw.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np
from scipy.signal import get_window

from .datasets import SignalDataset
from .synthgen import ACO_RATE, MODALITIES

STFT_FFT = 127
STFT_HOP = 33
MEL_FFT = 512
MEL_HOP = 138
N_MELS = 64
LOG_EPS = 1e-8
STD_FLOOR = 1e-8

PREPARED_SHAPES = {
    "vibration": (64, 32, 3),
    "current": (1024, 3),
    "acoustic": (64, 64, 6),
}


def _frame(x: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    """Center-framed sliding windows: [B, T, C] -> [B, frames, C, n_fft]."""
    pad = n_fft // 2
    xp = np.pad(x, ((0, 0), (pad, pad), (0, 0)), mode="reflect")
    win = np.lib.stride_tricks.sliding_window_view(xp, n_fft, axis=1)
    return win[:, ::hop]


def stft_image_batch(x: np.ndarray, n_fft: int = STFT_FFT, hop: int = STFT_HOP) -> np.ndarray:
    """Log-magnitude STFT images for a batch of waveforms.

    [B, T, C] float -> [B, n_fft//2+1, frames, C] float32, Hann window,
    centered reflect padding, log(|X| + 1e-8).
    """
    x = np.asarray(x, dtype=np.float64)
    frames = _frame(x, n_fft, hop)  # [B, F, C, n_fft]
    window = get_window("hann", n_fft)
    spec = np.fft.rfft(frames * window, axis=-1)
    mag = np.abs(spec)  # [B, F, C, bins]
    img = np.log(mag + LOG_EPS)
    return img.transpose(0, 3, 1, 2).astype(np.float32)  # [B, bins, F, C]


def stft_image(window: np.ndarray) -> np.ndarray:
    """Single vibration window [1024, 3] -> [64, 32, 3] log-magnitude image."""
    out = stft_image_batch(window[None])[0]
    if out.shape != PREPARED_SHAPES["vibration"]:
        raise ValueError(f"unexpected STFT image shape {out.shape}")
    return out


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(
    sr: int = ACO_RATE,
    n_fft: int = MEL_FFT,
    n_mels: int = N_MELS,
    fmin: float = 0.0,
    fmax: float | None = None,
) -> np.ndarray:
    """Triangular HTK-scale filterbank [n_mels, n_fft//2+1], each peak = 1."""
    if fmax is None:
        fmax = sr / 2.0
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / sr)
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    fb = np.zeros((n_mels, freqs.shape[0]))
    for m in range(n_mels):
        lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
        up = (freqs - lo) / (mid - lo)
        down = (hi - freqs) / (hi - mid)
        fb[m] = np.clip(np.minimum(up, down), 0.0, 1.0)
    return fb


def mel_image_batch(
    x: np.ndarray,
    sr: int = ACO_RATE,
    n_fft: int = MEL_FFT,
    hop: int = MEL_HOP,
    n_mels: int = N_MELS,
    fb: np.ndarray | None = None,
) -> np.ndarray:
    """Log-power mel images: [B, T, C] -> [B, n_mels, frames, C] float32."""
    x = np.asarray(x, dtype=np.float64)
    if fb is None:
        fb = mel_filterbank(sr=sr, n_fft=n_fft, n_mels=n_mels)
    frames = _frame(x, n_fft, hop)  # [B, F, C, n_fft]
    window = get_window("hann", n_fft)
    power = np.abs(np.fft.rfft(frames * window, axis=-1)) ** 2
    mel = power @ fb.T  # [B, F, C, n_mels]
    img = np.log(mel + LOG_EPS)
    return img.transpose(0, 3, 1, 2).astype(np.float32)


def mel_image(window: np.ndarray) -> np.ndarray:
    """Single acoustic window [8820, 6] -> [64, 64, 6] log-power mel image."""
    out = mel_image_batch(window[None])[0]
    if out.shape != PREPARED_SHAPES["acoustic"]:
        raise ValueError(f"unexpected mel image shape {out.shape}")
    return out


def prepare(raw: SignalDataset, chunk: int = 128) -> SignalDataset:
    """Transform a raw dataset into prepared tensors (no normalization)."""
    if raw.kind != "raw":
        raise ValueError(f"expected a raw dataset, got kind={raw.kind!r}")
    n = raw.n
    fb = mel_filterbank()
    vib_parts, aco_parts = [], []
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        vib_parts.append(stft_image_batch(raw.arrays["vibration"][lo:hi]))
        aco_parts.append(mel_image_batch(raw.arrays["acoustic"][lo:hi], fb=fb))
    arrays = {
        "vibration": np.concatenate(vib_parts) if vib_parts else np.zeros((0,) + PREPARED_SHAPES["vibration"], np.float32),
        "current": raw.arrays["current"].astype(np.float32),
        "acoustic": np.concatenate(aco_parts) if aco_parts else np.zeros((0,) + PREPARED_SHAPES["acoustic"], np.float32),
    }
    return SignalDataset(
        kind="prepared",
        arrays=arrays,
        labels=raw.labels.copy(),
        domains=raw.domains.copy(),
        meta=dict(raw.meta),
    )


@dataclass(frozen=True)
class NormStats:
    """Per-channel standardization statistics plus their provenance."""

    mean: Mapping[str, np.ndarray]  # modality -> [C]
    std: Mapping[str, np.ndarray]  # modality -> [C], floored at 1e-8
    source_conditions: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "mean": {m: self.mean[m].tolist() for m in self.mean},
            "std": {m: self.std[m].tolist() for m in self.std},
            "source_conditions": list(self.source_conditions),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "NormStats":
        return cls(
            mean={m: np.asarray(v, dtype=np.float64) for m, v in d["mean"].items()},
            std={m: np.asarray(v, dtype=np.float64) for m, v in d["std"].items()},
            source_conditions=tuple(d["source_conditions"]),
        )


def fit_norm_stats(ds: SignalDataset) -> NormStats:
    """Fit per-channel mean/std on a prepared dataset.

    Channels are the trailing axis of every modality; statistics pool over all
    other axes. The returned provenance is exactly the set of condition ids
    present in ``ds``, so fitting on a source-only subset makes target leakage
    structurally impossible.
    """
    if ds.kind != "prepared":
        raise ValueError("normalization statistics are fit on prepared data")
    if ds.n == 0:
        raise ValueError("cannot fit statistics on an empty dataset")
    mean, std = {}, {}
    for m, a in ds.arrays.items():
        flat = a.reshape(-1, a.shape[-1]).astype(np.float64)
        mean[m] = flat.mean(axis=0)
        std[m] = np.maximum(flat.std(axis=0), STD_FLOOR)
    return NormStats(mean=mean, std=std, source_conditions=ds.condition_ids())


def normalize_arrays(arrays: Mapping[str, np.ndarray], stats: NormStats) -> dict[str, np.ndarray]:
    """Standardize each modality array ([..., C]) with the stored statistics."""
    out = {}
    for m, a in arrays.items():
        out[m] = ((a - stats.mean[m]) / stats.std[m]).astype(np.float32)
    return out


def normalize(ds: SignalDataset, stats: NormStats) -> SignalDataset:
    """Return a standardized copy of ``ds``; records the stats' provenance."""
    if ds.kind != "prepared":
        raise ValueError("normalize expects a prepared dataset")
    return replace(ds, arrays=normalize_arrays(ds.arrays, stats), stats_sources=stats.source_conditions)
