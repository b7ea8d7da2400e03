"""Invariant/specific feature disentanglement.

Each feature vector is split by a pair of small embedders into an invariant
part (aligned across modalities or domains with multi-kernel MMD) and a
specific part (pushed away from the invariant part and from other specific
parts with cross-covariance penalties). The same machinery serves both the
modality level (within one source domain) and the domain level (across source
domains).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import torch
from torch import Tensor, nn

DEFAULT_MULTIPLIERS = (0.25, 0.5, 1.0, 2.0, 4.0)
EMBED_DIM = 128


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian RBF mixture for MMD.

    With ``bandwidths`` set, those sigmas are used as-is (useful for exact
    oracles and finite-difference gradient checks). Otherwise bandwidths are
    the media pairwise distance of the joint batch times ``multipliers``;
    the median is treated as a constant (no gradient flows through it).
    """

    bandwidths: tuple[float, ...] | None = None
    multipliers: tuple[float, ...] = DEFAULT_MULTIPLIERS

    def __post_init__(self):
        if self.bandwidths is not None:
            if len(self.bandwidths) == 0 or any(b <= 0 for b in self.bandwidths):
                raise ValueError("explicit bandwidths must be positive")
        if len(self.multipliers) == 0 or any(m <= 0 for m in self.multipliers):
            raise ValueError("bandwidth multipliers must be positive")


def _pairwise_sq_dists(z: Tensor) -> Tensor:
    """Symmetric [n, n] matrix of squared Euclidean distances."""
    sq = (z * z).sum(dim=1)
    d = sq[:, None] + sq[None, :] - 2.0 * (z @ z.T)
    d = 0.5 * (d + d.T)  # exact symmetry regardless of BLAS reduction order
    return d.clamp_min(0.0)


def median_bandwidths(
    x: Tensor, y: Tensor, multipliers: Sequence[float] = DEFAULT_MULTIPLIERS
) -> tuple[float, ...]:
    """Median pairwise distance of the stacked batch times each multiplier.

    Returned as plain floats: the bandwidth scale is a statistic of the batch,
    not a differentiable quantity.
    """
    z = torch.cat([x, y], dim=0).detach()
    n = z.shape[0]
    if n < 2:
        raise ValueError("median bandwidth needs at least 2 points")
    d = torch.sqrt(_pairwise_sq_dists(z))
    off = d[~torch.eye(n, dtype=torch.bool, device=z.device)]
    med = float(off.median())
    med = max(med, 1e-12)
    return tuple(med * float(m) for m in multipliers)


def gaussian_kernel(z: Tensor, bandwidths: Sequence[float]) -> Tensor:
    """Sum of Gaussian kernels exp(-||zi - zj||^2 / (2 sigma^2)) over sigmas."""
    d = _pairwise_sq_dists(z)
    k = torch.zeros_like(d)
    for sigma in bandwidths:
        k = k + torch.exp(-d / (2.0 * float(sigma) ** 2))
    return k


def mmd(x: Tensor, y: Tensor, kernel: KernelSpec | None = None) -> Tensor:
    """Biased MMD^2 estimate between two batches.

    mean(Kxx) + mean(Kyy) - 2 mean(Kxy) with the multi-kernel Gaussian above.
    Identical batches give exactly 0. With the median rule both batches need
    at least 2 rows; explicit bandwidths work from 1 row up.
    """
    if kernel is None:
        kernel = KernelSpec()
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise ValueError(f"mmd expects [n, d] with matching d, got {tuple(x.shape)} / {tuple(y.shape)}")
    if kernel.bandwidths is not None:
        bandwidths = kernel.bandwidths
        if x.shape[0] < 1 or y.shape[0] < 1:
            raise ValueError("mmd needs at least one row per batch")
    else:
        if x.shape[0] < 2 or y.shape[0] < 2:
            raise ValueError("median-rule mmd needs at least 2 rows per batch")
        bandwidths = median_bandwidths(x, y, kernel.multipliers)
    n = x.shape[0]
    k = gaussian_kernel(torch.cat([x, y], dim=0), bandwidths)
    kxx = k[:n, :n]
    kyy = k[n:, n:]
    kxy = k[:n, n:]
    return kxx.mean() + kyy.mean() - 2.0 * kxy.mean()


def covariance_penalty(a: Tensor, b: Tensor) -> Tensor:
    """Frobenius norm of the cross-covariance matrix of two batches.

    Columns are mean-centered; normalization is 1/(n-1). The square root is
    guarded so the gradient at a zero covariance matrix is exactly zero
    instead of NaN.
    """
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != b.shape[0]:
        raise ValueError(f"covariance needs matching rows, got {tuple(a.shape)} / {tuple(b.shape)}")
    n = a.shape[0]
    if n < 2:
        raise ValueError("covariance needs at least 2 rows")
    ac = a - a.mean(dim=0, keepdim=True)
    bc = b - b.mean(dim=0, keepdim=True)
    cov = ac.T @ bc / (n - 1)
    sq = (cov * cov).sum()
    safe = torch.where(sq > 0, sq, torch.ones_like(sq))
    return torch.where(sq > 0, torch.sqrt(safe), torch.zeros_like(sq))


class DisentangledPair(NamedTuple):
    """Invariant/specific embedding batch plus where it came from."""

    invariant: Tensor
    specific: Tensor
    level: str  # "modality" or "domain"
    tag: str  # modality name or domain id

    def rows(self, idx) -> "DisentangledPair":
        return DisentangledPair(self.invariant[idx], self.specific[idx], self.level, self.tag)

    def retag(self, tag: str) -> "DisentangledPair":
        return DisentangledPair(self.invariant, self.specific, self.level, tag)


class EmbedPair(nn.Module):
    """Two single-layer embedders mapping a feature to (invariant, specific).

    Deliberately linear: a nonlinearity with a dead zone lets the covariance
    penalties zero entire units instead of decorrelating the subspaces, which
    starves the classifier sitting on top of the domain-level pair.
    """

    def __init__(self, in_dim: int, out_dim: int = EMBED_DIM, level: str = "modality", tag: str = ""):
        super().__init__()
        self.level = level
        self.tag = tag
        self.invariant = nn.Linear(in_dim, out_dim)
        self.specific = nn.Linear(in_dim, out_dim)

    def forward(self, x: Tensor) -> DisentangledPair:
        return DisentangledPair(self.invariant(x), self.specific(x), self.level, self.tag)


def _ordered_pairs(keys: Sequence[str]):
    return [(k1, k2) for k1 in keys for k2 in keys if k1 != k2]


def modality_loss(pairs: Mapping[str, DisentangledPair], kernel: KernelSpec | None = None) -> Tensor:
    """Disentanglement loss across modalities within one source domain.

    Sum over ordered modality pairs of MMD between invariant embeddings, plus
    per-modality invariant/specific cross-covariance norms, plus ordered-pair
    specific/specific cross-covariance norms.
    """
    if not pairs:
        raise ValueError("no modality embeddings given")
    keys = list(pairs)
    loss = None
    for k1, k2 in _ordered_pairs(keys):
        term = mmd(pairs[k1].invariant, pairs[k2].invariant, kernel)
        loss = term if loss is None else loss + term
    for k in keys:
        term = covariance_penalty(pairs[k].invariant, pairs[k].specific)
        loss = term if loss is None else loss + term
    for k1, k2 in _ordered_pairs(keys):
        loss = loss + covariance_penalty(pairs[k1].specific, pairs[k2].specific)
    return loss


def domain_loss(pairs: Mapping[str, DisentangledPair], kernel: KernelSpec | None = None) -> Tensor:
    """Disentanglement loss across source domains (same structure as
    :func:`modality_loss`; cross-domain covariance terms pair rows by index
    and truncate to the smaller batch)."""
    if len(pairs) < 2:
        raise ValueError("domain loss needs at least 2 domains")
    keys = list(pairs)
    loss = None
    for k1, k2 in _ordered_pairs(keys):
        term = mmd(pairs[k1].invariant, pairs[k2].invariant, kernel)
        loss = term if loss is None else loss + term
    for k in keys:
        loss = loss + covariance_penalty(pairs[k].invariant, pairs[k].specific)
    for k1, k2 in _ordered_pairs(keys):
        s1 = pairs[k1].specific
        s2 = pairs[k2].specific
        n = min(s1.shape[0], s2.shape[0])
        loss = loss + covariance_penalty(s1[:n], s2[:n])
    return loss
