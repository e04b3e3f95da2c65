"""Photo -> binary contour extraction pipeline."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..data.images import normalize_image
from .detector import EdgeDetector, detect_edges
from .threshold import ThresholdConfig, dynamic_threshold


def _rebinarize(img: np.ndarray) -> np.ndarray:
    # centre-and-fit resampling leaves interpolated grays; snap back to ink/background
    return np.where(img < 0.0, -1.0, 1.0).astype(np.float32)


def extract_contour(
    photo: np.ndarray,
    detector: EdgeDetector | None = None,
    cfg: ThresholdConfig = ThresholdConfig(),
    target_size: int = 64,
) -> np.ndarray:
    """Edge detection, dynamic binarisation, then centre-and-fit to the target.

    Propagates BlankImageError when no pixels survive the threshold.
    """
    e = detect_edges(photo, detector)
    binary = dynamic_threshold(e, cfg)
    return _rebinarize(normalize_image(binary, target_size))


def binarize_edge_grid(
    e: np.ndarray, cfg: ThresholdConfig = ThresholdConfig(), target_size: int = 64
) -> np.ndarray:
    """Same as extract_contour but starting from a precomputed (post-NMS) edge map."""
    binary = dynamic_threshold(np.asarray(e, dtype=np.float64), cfg)
    return _rebinarize(normalize_image(binary, target_size))


def save_edge_grid(path: str | Path, e: np.ndarray) -> None:
    """Write an edge probability grid (little-endian float32, row-major, shape header)."""
    np.save(path, np.ascontiguousarray(e, dtype="<f4"), allow_pickle=False)


def load_edge_grid(path: str | Path) -> np.ndarray:
    """Read an edge probability grid saved by save_edge_grid."""
    arr = np.load(path, allow_pickle=False)
    if arr.ndim != 2:
        raise ValueError(f"edge grid must be 2-D, got {arr.shape}")
    return arr.astype(np.float64)
