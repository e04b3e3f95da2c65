"""Gradient-weighted attribution of fused-feature dimensions.

For a chosen branch, gradients of the selected feature dimensions are taken
with respect to the backbone's last convolutional map, pooled channel-wise
into weights, and combined into a non-negative heatmap at input resolution.
"""

from __future__ import annotations

import numpy as np
import torch
from torch.nn import functional as F

from ..torchutil import to_tensor

_BRANCHES = ("sketch", "contour", "photo")


def gradcam(model, image: np.ndarray, branch: str, dims) -> np.ndarray:
    """Heatmap (H, W) >= 0 for the given feature dims of one branch input.

    `image` is the branch's own input (for the contour branch, the already
    synthesised contour). Since the fused query is an element-wise sum, the
    gradient of fused dims with respect to one branch equals the gradient of
    that branch's feature dims.
    """
    if branch not in _BRANCHES:
        raise ValueError(f"branch must be one of {_BRANCHES}, got {branch!r}")
    dims = list(dims)
    if not dims:
        raise IndexError("dims must select at least one feature dimension")
    d = None
    was_training = model.training
    model.eval()
    try:
        # grad flows from the input so even parameter-free test models build a graph
        x = to_tensor(image)[None].requires_grad_(True)
        with torch.enable_grad():
            conv_map, feats = model.features_with_conv_map(x)
        d = feats.shape[1]
        for i in dims:
            if not 0 <= int(i) < d:
                raise IndexError(f"feature dim {i} out of range [0, {d})")
        with torch.enable_grad():
            score = feats[0, dims].sum()
            grads = torch.autograd.grad(score, conv_map)[0]
        weights = grads.mean(dim=(2, 3), keepdim=True)
        cam = torch.relu((weights * conv_map).sum(dim=1, keepdim=True))
        cam = F.interpolate(
            cam, size=(image.shape[0], image.shape[1]), mode="bilinear", align_corners=False
        )
        return cam[0, 0].detach().numpy()
    finally:
        model.train(was_training)


def top_contributing_dims(query: np.ndarray, photo_feature: np.ndarray, k: int = 2) -> list[int]:
    """Non-zero query dims contributing the most similarity to a gallery photo.

    Similarity contribution of dim i is query_i * photo_i (the cross term of
    the squared distance).
    """
    q = np.asarray(query, dtype=np.float64)
    p = np.asarray(photo_feature, dtype=np.float64)
    contrib = q * p
    nonzero = np.flatnonzero(q != 0.0)
    top = nonzero[np.argsort(-contrib[nonzero], kind="stable")]
    return [int(i) for i in top[:k]]
