"""Multi-head cross-attention fusion of modality embeddings.

Each 256-d modality embedding is reshaped into a short token sequence; for a
directed pair (query side, key/value side) every head projects both sides,
attends over the key tokens, mean-pools the attended tokens, and the heads'
outputs are concatenated. Three directed pairs cover the triple of modalities
and their outputs concatenate into the fused representation.
"""

from __future__ import annotations

import math
from typing import Mapping

import torch
from torch import Tensor, nn

FUSION_PAIRS = (("vibration", "current"), ("current", "acoustic"), ("acoustic", "vibration"))


class CrossAttentionPair(nn.Module):
    """Directed cross-attention between two equal-width embeddings.

    ``dim`` must be divisible by ``tokens``; each head h owns bias-free
    projections W_q, W_k, W_v of shape [dim/tokens, head_dim]. Output is
    [batch, heads * head_dim].
    """

    def __init__(self, dim: int = 256, heads: int = 8, head_dim: int = 32, tokens: int = 8):
        super().__init__()
        if dim % tokens != 0:
            raise ValueError(f"dim {dim} not divisible into {tokens} tokens")
        self.dim = dim
        self.heads = heads
        self.head_dim = head_dim
        self.tokens = tokens
        self.token_width = dim // tokens
        shape = (heads, self.token_width, head_dim)
        self.w_q = nn.Parameter(torch.empty(shape))
        self.w_k = nn.Parameter(torch.empty(shape))
        self.w_v = nn.Parameter(torch.empty(shape))
        for w in (self.w_q, self.w_k, self.w_v):
            # per-head fan-in scaling, as for a Linear(token_width, head_dim)
            bound = 1.0 / math.sqrt(self.token_width)
            nn.init.uniform_(w, -bound, bound)

    @property
    def out_dim(self) -> int:
        return self.heads * self.head_dim

    def _tokens(self, z: Tensor) -> Tensor:
        if z.ndim != 2 or z.shape[1] != self.dim:
            raise ValueError(f"expected [batch, {self.dim}], got {tuple(z.shape)}")
        return z.reshape(z.shape[0], self.tokens, self.token_width)

    def attention(self, z_query: Tensor, z_key: Tensor) -> tuple[Tensor, Tensor, Tensor]:
        """Return (attended tokens [B, H, T, head_dim], weights, logits).

        Weights are softmax over the key tokens (last axis); logits are the
        scaled dot products Q K^T / sqrt(head_dim).
        """
        tq = self._tokens(z_query)
        tk = self._tokens(z_key)
        q = torch.einsum("btw,hwd->bhtd", tq, self.w_q)
        k = torch.einsum("btw,hwd->bhtd", tk, self.w_k)
        v = torch.einsum("btw,hwd->bhtd", tk, self.w_v)
        logits = q @ k.transpose(-1, -2) / math.sqrt(self.head_dim)
        weights = torch.softmax(logits, dim=-1)
        return weights @ v, weights, logits

    def forward(self, z_query: Tensor, z_key: Tensor) -> Tensor:
        attended, _, _ = self.attention(z_query, z_key)
        pooled = attended.mean(dim=2)  # [B, H, head_dim]
        return pooled.reshape(pooled.shape[0], self.out_dim)


class TripleFusion(nn.Module):
    """Concatenation of three directed cross-attention pairs.

    Pair order is (vibration, current), (current, acoustic),
    (acoustic, vibration); first element is the query side. Output width is
    3 * heads * head_dim (768 at defaults).
    """

    def __init__(self, dim: int = 256, heads: int = 8, head_dim: int = 32, tokens: int = 8):
        super().__init__()
        self.pairs = nn.ModuleDict(
            {f"{q}__{k}": CrossAttentionPair(dim, heads, head_dim, tokens) for q, k in FUSION_PAIRS}
        )

    @property
    def out_dim(self) -> int:
        return sum(p.out_dim for p in self.pairs.values())

    def forward(self, z: Mapping[str, Tensor]) -> Tensor:
        parts = [self.pairs[f"{q}__{k}"](z[q], z[k]) for q, k in FUSION_PAIRS]
        return torch.cat(parts, dim=1)
