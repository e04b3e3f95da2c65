"""Shared retrieval feature extractor.

One network serves all four branches (sketch, synthesised contour,
positive photo, negative photo). Output features are unit-normalised;
a near-zero raw feature trips an epsilon guard instead of dividing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..errors import DegenerateFeatureError, ShapeError
from ..torchutil import to_tensor

_NORM_EPS = 1e-8


@dataclass(frozen=True)
class SbirModelConfig:
    backbone: str = "resnet50"
    feature_dim: int = 2048
    input_size: int = 256
    toy_channels: tuple[int, ...] = (16, 32, 64)
    fuse_normalize: bool = False
    pretrained: bool = True


def toy_sbir_config(input_size: int = 32, feature_dim: int = 32) -> SbirModelConfig:
    return SbirModelConfig(
        backbone="toy", feature_dim=feature_dim, input_size=input_size, pretrained=False
    )


class ToyBackbone(nn.Module):
    """Three strided conv blocks and a pooled affine head."""

    def __init__(self, channels: tuple[int, ...], feature_dim: int):
        super().__init__()
        blocks = []
        in_ch = 3
        for ch in channels:
            blocks += [
                nn.Conv2d(in_ch, ch, 3, stride=2, padding=1),
                nn.GroupNorm(1, ch),
                nn.ReLU(inplace=True),
            ]
            in_ch = ch
        self.conv = nn.Sequential(*blocks)
        self.fc = nn.Linear(in_ch, feature_dim)

    def forward_with_conv_map(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        conv_map = self.conv(x)
        raw = self.fc(conv_map.mean(dim=(2, 3)))
        return conv_map, raw

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.forward_with_conv_map(x)[1]


class ResNetBackbone(nn.Module):
    """ImageNet ResNet-50 trunk with the classification layer removed."""

    def __init__(self, pretrained: bool = True):
        super().__init__()
        from torchvision.models import resnet50, ResNet50_Weights

        net = resnet50(weights=ResNet50_Weights.IMAGENET1K_V1 if pretrained else None)
        net.fc = nn.Identity()
        self.net = net

    def forward_with_conv_map(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        n = self.net
        x = n.maxpool(n.relu(n.bn1(n.conv1(x))))
        x = n.layer4(n.layer3(n.layer2(n.layer1(x))))
        raw = torch.flatten(n.avgpool(x), 1)
        return x, raw

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.forward_with_conv_map(x)[1]


class SbirModel(nn.Module):
    """Siamese feature extractor with final l2 normalisation."""

    def __init__(self, config: SbirModelConfig):
        super().__init__()
        self.config = config
        if config.backbone == "toy":
            self.backbone = ToyBackbone(config.toy_channels, config.feature_dim)
        elif config.backbone == "resnet50":
            if config.feature_dim != 2048:
                raise ValueError("resnet50 backbone emits 2048-d features")
            self.backbone = ResNetBackbone(config.pretrained)
        else:
            raise ValueError(f"unknown backbone {config.backbone!r}")

    def _prep(self, x: torch.Tensor) -> torch.Tensor:
        if x.dim() != 4:
            raise ShapeError(f"expected (N, C, H, W), got {tuple(x.shape)}")
        size = self.config.input_size
        if x.shape[2] != size or x.shape[3] != size:
            raise ShapeError(f"backbone expects {size}x{size} input, got {tuple(x.shape[2:])}")
        if x.shape[1] == 1:
            x = x.repeat(1, 3, 1, 1)
        return x

    @staticmethod
    def _normalize(raw: torch.Tensor) -> torch.Tensor:
        norms = raw.norm(dim=1, keepdim=True)
        if bool((norms < _NORM_EPS).any()):
            raise DegenerateFeatureError("raw feature norm below epsilon guard")
        return raw / norms

    def features(self, x: torch.Tensor) -> torch.Tensor:
        return self._normalize(self.backbone(self._prep(x)))

    def features_with_conv_map(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        conv_map, raw = self.backbone.forward_with_conv_map(self._prep(x))
        return conv_map, self._normalize(raw)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.features(x)


def embed_feature(image: np.ndarray, model: SbirModel) -> np.ndarray:
    """Unit-norm feature of a single image through the shared extractor."""
    model.eval()
    with torch.no_grad():
        f = model.features(to_tensor(image)[None])
    return f[0].numpy()


def fuse(f_sketch: np.ndarray, f_contour: np.ndarray, renormalize: bool = False) -> np.ndarray:
    """Element-wise sum of the sketch and contour features.

    Not re-normalised by default: only the branch features are
    unit-normalised, the fusion is a plain sum.
    """
    a = np.asarray(f_sketch, dtype=np.float64)
    b = np.asarray(f_contour, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"feature dims differ: {a.shape} vs {b.shape}")
    out = a + b
    if renormalize:
        n = np.linalg.norm(out)
        if n < _NORM_EPS:
            raise DegenerateFeatureError("fused feature norm below epsilon guard")
        out = out / n
    return out
