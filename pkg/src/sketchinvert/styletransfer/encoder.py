"""Frozen multi-tap perceptual encoders.

Both domains share one fixed encoder that exposes five feature taps, one
before each spatial halving (strides 1, 2, 4, 8, 16). The paper-scale
encoder reads the taps off an ImageNet-pretrained VGG-16; the desk-scale
surrogate is a frozen randomly-initialised CNN with the same tap geometry,
which keeps pretrained weights out of the test path.
"""

from __future__ import annotations

import torch
from torch import nn

from ..errors import ShapeError
from ..torchutil import seeded_init

VGG16_TAP_CHANNELS = (64, 128, 256, 512, 512)
# last ReLU before each max-pool in torchvision's vgg16().features
_VGG16_TAP_LAYERS = (3, 8, 15, 22, 29)

_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)


class TapEncoder(nn.Module):
    """Base class: frozen, eval-only feature tap extractor."""

    tap_channels: tuple[int, ...]

    @property
    def n_taps(self) -> int:
        return len(self.tap_channels)

    @property
    def total_stride(self) -> int:
        return 2 ** (self.n_taps - 1)

    def freeze(self) -> None:
        for p in self.parameters():
            p.requires_grad_(False)
        self.eval()

    def train(self, mode: bool = True):
        # stays in eval mode no matter what the surrounding model does
        return super().train(False)

    def check_input(self, x: torch.Tensor) -> torch.Tensor:
        if x.dim() != 4:
            raise ShapeError(f"expected (N, C, H, W), got {tuple(x.shape)}")
        stride = self.total_stride
        if x.shape[2] % stride or x.shape[3] % stride:
            raise ShapeError(
                f"input size {tuple(x.shape[2:])} not divisible by {stride}"
            )
        if x.shape[1] == 1:
            x = x.repeat(1, 3, 1, 1)
        if x.shape[1] != 3:
            raise ShapeError(f"expected 1 or 3 channels, got {x.shape[1]}")
        return x


class SurrogateTapEncoder(TapEncoder):
    """Seeded random CNN with the standard five-tap geometry."""

    def __init__(self, channels: tuple[int, ...] = (8, 12, 16, 24, 24), seed: int = 0):
        super().__init__()
        self.tap_channels = tuple(channels)
        layers = []
        in_ch = 3
        for i, ch in enumerate(channels):
            stride = 1 if i == 0 else 2
            layers.append(nn.Conv2d(in_ch, ch, 3, stride=stride, padding=1))
            in_ch = ch
        self.stages = nn.ModuleList(layers)
        seeded_init(self, seed)
        self.freeze()

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, ...]:
        x = self.check_input(x)
        taps = []
        for stage in self.stages:
            x = torch.relu(stage(x))
            taps.append(x)
        return tuple(taps)


class VggTapEncoder(TapEncoder):
    """Taps off the five pre-pool conv activations of a pretrained VGG-16."""

    def __init__(self):
        super().__init__()
        from torchvision.models import vgg16, VGG16_Weights

        feats = vgg16(weights=VGG16_Weights.IMAGENET1K_V1).features
        self.features = feats[: _VGG16_TAP_LAYERS[-1] + 1]
        self.tap_channels = VGG16_TAP_CHANNELS
        self.register_buffer("mean", torch.tensor(_IMAGENET_MEAN).view(1, 3, 1, 1))
        self.register_buffer("std", torch.tensor(_IMAGENET_STD).view(1, 3, 1, 1))
        self.freeze()

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, ...]:
        x = self.check_input(x)
        x = ((x + 1.0) / 2.0 - self.mean) / self.std
        taps = []
        for i, layer in enumerate(self.features):
            x = layer(x)
            if i in _VGG16_TAP_LAYERS:
                taps.append(x)
        return tuple(taps)


def build_encoder(kind: str, surrogate_channels=(8, 12, 16, 24, 24), surrogate_seed: int = 0) -> TapEncoder:
    if kind == "surrogate":
        return SurrogateTapEncoder(surrogate_channels, surrogate_seed)
    if kind == "vgg16":
        return VggTapEncoder()
    raise ValueError(f"unknown encoder kind {kind!r}")
