"""Retrieval training objectives: decorrelation and fused-query triplet."""

from __future__ import annotations

import torch

from ..errors import BatchTooSmallError

_VAR_EPS = 1e-8


def _standardize(f: torch.Tensor) -> torch.Tensor:
    mean = f.mean(dim=0, keepdim=True)
    var = f.var(dim=0, unbiased=False, keepdim=True)
    return (f - mean) / torch.sqrt(var + _VAR_EPS)


def decorrelation_loss(f_sketch, f_contour) -> torch.Tensor:
    """Squared Frobenius norm of the cross-correlation of standardised features.

    Each feature matrix is standardised per column across the batch
    (population statistics, epsilon in the variance denominator); the
    cross-product is not divided by the batch size. Invariant to per-column
    positive scaling and shift of the raw inputs.
    """
    f_s = torch.as_tensor(f_sketch, dtype=torch.float64) if not torch.is_tensor(f_sketch) else f_sketch
    f_c = torch.as_tensor(f_contour, dtype=torch.float64) if not torch.is_tensor(f_contour) else f_contour
    if f_s.dim() != 2 or f_c.dim() != 2 or f_s.shape != f_c.shape:
        raise ValueError(f"expected matching (n, d) matrices, got {f_s.shape} and {f_c.shape}")
    if f_s.shape[0] < 2:
        raise BatchTooSmallError("batch statistics need at least 2 rows")
    cross = _standardize(f_s).transpose(0, 1) @ _standardize(f_c)
    return cross.pow(2).sum()


def squared_distance(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    return (a - b).pow(2).sum(dim=-1)


def triplet_margin_loss(
    query: torch.Tensor, positive: torch.Tensor, negative: torch.Tensor, margin: float = 0.1
) -> torch.Tensor:
    """Hinge on the squared-distance gap, mean over the batch."""
    gap = margin + squared_distance(query, positive) - squared_distance(query, negative)
    return torch.relu(gap).mean()


def quadruplet_triplet_loss(
    model, sketches, contours, positives, negatives, margin: float = 0.1
) -> torch.Tensor:
    """Triplet loss with the fused sketch+contour query, given image batches."""
    q = model.features(sketches) + model.features(contours)
    return triplet_margin_loss(q, model.features(positives), model.features(negatives), margin)
