"""Dynamic quantile binarisation of edge probability maps.

The cut point adapts to edge density: with many detections (large ratio r
of detected to total pixels) the retained fraction alpha*exp(-beta*r)
shrinks, discarding texture noise. The retained-side convention is
configurable; the default keeps the strongest pixels (probability >= cut),
the literal "below" mode keeps the weakest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ThresholdConfig:
    alpha: float = 0.08
    beta: float = 0.12
    cap: float = 0.9
    keep_mode: str = "above"  # "above": keep >= cut; "below": keep < cut
    sort_order: str = "descending"

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0.0 <= self.cap <= 1.0:
            raise ValueError("cap must lie in [0, 1]")
        if self.keep_mode not in ("above", "below"):
            raise ValueError(f"unknown keep_mode {self.keep_mode!r}")
        if self.sort_order not in ("descending", "ascending"):
            raise ValueError(f"unknown sort_order {self.sort_order!r}")


def retained_fraction(r: float, cfg: ThresholdConfig) -> float:
    """min(alpha * exp(-beta * r), cap) for a detected-pixel ratio r in [0, 1]."""
    return min(cfg.alpha * math.exp(-cfg.beta * r), cfg.cap)


def cut_value(e: np.ndarray, cfg: ThresholdConfig) -> float | None:
    """The dynamic cut point, or None when no pixels are detected."""
    detected = e[e > 0.0]
    if detected.size == 0:
        return None
    total = e.shape[0] * e.shape[1]
    r = detected.size / total
    fraction = retained_fraction(r, cfg)
    index = min(max(int(math.floor(detected.size * fraction)), 0), detected.size - 1)
    ordered = np.sort(detected)
    if cfg.sort_order == "descending":
        ordered = ordered[::-1]
    return float(ordered[index])


def dynamic_threshold(e: np.ndarray, cfg: ThresholdConfig = ThresholdConfig()) -> np.ndarray:
    """Binarise an edge map against the dynamic cut, as a [-1, +1] image.

    Kept pixels are rendered as ink (-1) on a white (+1) background. An
    empty detected set yields a blank image. The cut is order-based, so the
    kept set is invariant to positive rescaling of the probabilities.
    """
    e = np.asarray(e, dtype=np.float64)
    if e.ndim != 2:
        raise ValueError(f"edge map must be (H, W), got {e.shape}")
    out = np.full(e.shape + (1,), 1.0, dtype=np.float32)
    x = cut_value(e, cfg)
    if x is None:
        return out
    if cfg.keep_mode == "above":
        kept = e >= x
    else:
        kept = (e > 0.0) & (e < x)
    out[kept] = -1.0
    return out
