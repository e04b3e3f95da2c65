"""Small torch/numpy bridging helpers."""

from __future__ import annotations

import numpy as np
import torch


def to_tensor(img: np.ndarray) -> torch.Tensor:
    """(H, W, C) float image -> (C, H, W) float32 tensor."""
    return torch.from_numpy(np.ascontiguousarray(img.transpose(2, 0, 1))).float()


def batch_from_images(images) -> torch.Tensor:
    """List of (H, W, C) arrays -> (N, C, H, W) tensor."""
    return torch.stack([to_tensor(im) for im in images], dim=0)


def to_image(t: torch.Tensor) -> np.ndarray:
    """(C, H, W) or (1, C, H, W) tensor -> (H, W, C) float32 array."""
    if t.dim() == 4:
        if t.shape[0] != 1:
            raise ValueError("expected a single image")
        t = t[0]
    return t.detach().cpu().numpy().transpose(1, 2, 0).astype(np.float32)


def seeded_init(module: torch.nn.Module, seed: int) -> None:
    """Re-draw every parameter of `module` from N(0, 0.05) with a fixed seed."""
    g = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for p in module.parameters():
            p.copy_(torch.randn(p.shape, generator=g) * 0.05)
