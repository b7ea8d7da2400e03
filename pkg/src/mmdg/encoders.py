"""Per-modality residual feature encoders.

Time-frequency images (vibration STFT, acoustic mel) go through a 2-D
residual network, raw current waveforms through a 1-D one. Both end in global
average pooling and a linear head onto a shared feature width.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import Tensor, nn

FEATURE_DIM = 256


@dataclass(frozen=True)
class EncoderConfig:
    widths: tuple[int, int, int, int] = (16, 32, 64, 128)
    feature_dim: int = FEATURE_DIM

    def __post_init__(self):
        if len(self.widths) != 4 or any(w <= 0 for w in self.widths):
            raise ValueError("widths must be 4 positive ints")
        if self.feature_dim <= 0:
            raise ValueError("feature_dim must be positive")


class ResidualBlock2d(nn.Module):
    def __init__(self, c_in: int, c_out: int, stride: int = 1):
        super().__init__()
        self.conv1 = nn.Conv2d(c_in, c_out, 3, stride=stride, padding=1, bias=False)
        self.bn1 = nn.BatchNorm2d(c_out)
        self.conv2 = nn.Conv2d(c_out, c_out, 3, padding=1, bias=False)
        self.bn2 = nn.BatchNorm2d(c_out)
        self.relu = nn.ReLU(inplace=True)
        if stride != 1 or c_in != c_out:
            self.skip = nn.Sequential(
                nn.Conv2d(c_in, c_out, 1, stride=stride, bias=False), nn.BatchNorm2d(c_out)
            )
        else:
            self.skip = nn.Identity()

    def forward(self, x: Tensor) -> Tensor:
        out = self.relu(self.bn1(self.conv1(x)))
        out = self.bn2(self.conv2(out))
        return self.relu(out + self.skip(x))


class ResidualBlock1d(nn.Module):
    def __init__(self, c_in: int, c_out: int, stride: int = 1):
        super().__init__()
        self.conv1 = nn.Conv1d(c_in, c_out, 3, stride=stride, padding=1, bias=False)
        self.bn1 = nn.BatchNorm1d(c_out)
        self.conv2 = nn.Conv1d(c_out, c_out, 3, padding=1, bias=False)
        self.bn2 = nn.BatchNorm1d(c_out)
        self.relu = nn.ReLU(inplace=True)
        if stride != 1 or c_in != c_out:
            self.skip = nn.Sequential(
                nn.Conv1d(c_in, c_out, 1, stride=stride, bias=False), nn.BatchNorm1d(c_out)
            )
        else:
            self.skip = nn.Identity()

    def forward(self, x: Tensor) -> Tensor:
        out = self.relu(self.bn1(self.conv1(x)))
        out = self.bn2(self.conv2(out))
        return self.relu(out + self.skip(x))


class ImageEncoder(nn.Module):
    """[B, C, H, W] -> [B, feature_dim]: stem, four residual blocks, GAP, linear."""

    def __init__(self, in_channels: int, cfg: EncoderConfig = EncoderConfig()):
        super().__init__()
        self.in_channels = in_channels
        w = cfg.widths
        self.stem = nn.Sequential(
            nn.Conv2d(in_channels, w[0], 5, stride=2, padding=2, bias=False),
            nn.BatchNorm2d(w[0]),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
        )
        self.blocks = nn.Sequential(
            ResidualBlock2d(w[0], w[0], 1),
            ResidualBlock2d(w[0], w[1], 2),
            ResidualBlock2d(w[1], w[2], 2),
            ResidualBlock2d(w[2], w[3], 2),
        )
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.head = nn.Linear(w[3], cfg.feature_dim)

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ValueError(f"expected [B, {self.in_channels}, H, W], got {tuple(x.shape)}")
        z = self.blocks(self.stem(x))
        return self.head(self.pool(z).flatten(1))


class WaveEncoder(nn.Module):
    """[B, C, T] -> [B, feature_dim]: wide stem, four residual blocks, GAP, linear."""

    def __init__(self, in_channels: int, cfg: EncoderConfig = EncoderConfig()):
        super().__init__()
        self.in_channels = in_channels
        w = cfg.widths
        self.stem = nn.Sequential(
            nn.Conv1d(in_channels, w[0], 7, stride=2, padding=3, bias=False),
            nn.BatchNorm1d(w[0]),
            nn.ReLU(inplace=True),
            nn.MaxPool1d(2),
        )
        self.blocks = nn.Sequential(
            ResidualBlock1d(w[0], w[0], 1),
            ResidualBlock1d(w[0], w[1], 2),
            ResidualBlock1d(w[1], w[2], 2),
            ResidualBlock1d(w[2], w[3], 2),
        )
        self.pool = nn.AdaptiveAvgPool1d(1)
        self.head = nn.Linear(w[3], cfg.feature_dim)

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 3 or x.shape[1] != self.in_channels:
            raise ValueError(f"expected [B, {self.in_channels}, T], got {tuple(x.shape)}")
        z = self.blocks(self.stem(x))
        return self.head(self.pool(z).flatten(1))


ENCODER_CHANNELS = {"vibration": 3, "current": 3, "acoustic": 6}


def build_encoder(modality: str, cfg: EncoderConfig = EncoderConfig()) -> nn.Module:
    """Encoder for one modality: 2-D for image-like inputs, 1-D for waveforms."""
    if modality == "current":
        return WaveEncoder(ENCODER_CHANNELS[modality], cfg)
    if modality in ("vibration", "acoustic"):
        return ImageEncoder(ENCODER_CHANNELS[modality], cfg)
    raise KeyError(f"unknown modality {modality!r}")
