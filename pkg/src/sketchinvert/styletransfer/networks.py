"""Translation networks: shared embedding stage, domain decoders, discriminators.

The decoder side is a stack of residual upsampling stages. Each stage runs
1x1 conv -> bilinear x2 -> residual add of the matching encoder tap ->
3x3 residual block -> 3x3 conv. The shared stage produces the common
embedding map; each domain decoder owns the remaining stages, with the last
3x3 conv emitting the image through Tanh without normalisation.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn
from torch.nn import functional as F

from .encoder import TapEncoder, build_encoder


def _conv_bn_relu(in_ch: int, out_ch: int, k: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, k, stride=1, padding=k // 2, padding_mode="reflect"),
        nn.BatchNorm2d(out_ch),
        nn.ReLU(inplace=True),
    )


class ResidualBlock(nn.Module):
    def __init__(self, ch: int, k: int = 3):
        super().__init__()
        self.body = nn.Sequential(_conv_bn_relu(ch, ch, k), _conv_bn_relu(ch, ch, k))

    def forward(self, x):
        return x + self.body(x)


class UpsampleStage(nn.Module):
    """One decoder resolution step with an encoder-tap shortcut."""

    def __init__(self, in_ch: int, skip_ch: int, out_ch: int, final: bool = False):
        super().__init__()
        self.reduce = _conv_bn_relu(in_ch, skip_ch, 1)
        self.res = ResidualBlock(skip_ch)
        if final:
            self.out = nn.Sequential(
                nn.Conv2d(skip_ch, out_ch, 3, padding=1, padding_mode="reflect"),
                nn.Tanh(),
            )
        else:
            self.out = _conv_bn_relu(skip_ch, out_ch, 3)

    def forward(self, x: torch.Tensor, skip: torch.Tensor) -> torch.Tensor:
        x = self.reduce(x)
        x = F.interpolate(x, scale_factor=2, mode="bilinear", align_corners=False)
        x = x + skip
        x = self.res(x)
        return self.out(x)


class EmbeddingProjector(nn.Module):
    """Shared stage mapping the deepest encoder tap into the joint embedding space."""

    def __init__(self, tap_channels: tuple[int, ...], embed_channels: int):
        super().__init__()
        self.stage = UpsampleStage(tap_channels[-1], tap_channels[-2], embed_channels)

    def forward(self, taps: tuple[torch.Tensor, ...]) -> torch.Tensor:
        return self.stage(taps[-1], taps[-2])


class DomainDecoder(nn.Module):
    """Unshared decoder: remaining upsampling stages down to the image."""

    def __init__(self, tap_channels: tuple[int, ...], embed_channels: int, out_channels: int):
        super().__init__()
        skips = tuple(reversed(tap_channels[:-2]))  # consumed shallow-ward
        stages = []
        in_ch = embed_channels
        for i, skip_ch in enumerate(skips):
            final = i == len(skips) - 1
            out_ch = out_channels if final else skip_ch
            stages.append(UpsampleStage(in_ch, skip_ch, out_ch, final=final))
            in_ch = out_ch
        self.stages = nn.ModuleList(stages)

    def forward(self, h: torch.Tensor, taps: tuple[torch.Tensor, ...]) -> torch.Tensor:
        x = h
        for stage, skip in zip(self.stages, reversed(taps[:-2])):
            x = stage(x, skip)
        return x


class PatchDiscriminator(nn.Module):
    """Patch critic with layer-wise normalisation (gradient-penalty friendly)."""

    def __init__(self, in_channels: int = 1, base: int = 64, n_layers: int = 4):
        super().__init__()
        layers = [
            nn.Conv2d(in_channels, base, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
        ]
        ch = base
        for _ in range(n_layers - 1):
            nxt = min(ch * 2, base * 8)
            layers += [
                nn.Conv2d(ch, nxt, 4, stride=2, padding=1),
                nn.GroupNorm(1, nxt),  # LayerNorm over (C, H, W)
                nn.LeakyReLU(0.2, inplace=True),
            ]
            ch = nxt
        layers.append(nn.Conv2d(ch, 1, 4, stride=1, padding=1))
        self.body = nn.Sequential(*layers)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.body(x)


class AttributeHead(nn.Module):
    """One-layer multi-label attribute predictor over the pooled embedding."""

    def __init__(self, embed_channels: int, n_attributes: int = 33):
        super().__init__()
        self.n_attributes = n_attributes
        self.fc = nn.Linear(embed_channels, n_attributes)

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        pooled = h.mean(dim=(2, 3))
        return torch.sigmoid(self.fc(pooled))


@dataclass(frozen=True)
class StyleModelConfig:
    image_size: int = 64
    image_channels: int = 1
    encoder: str = "vgg16"
    surrogate_channels: tuple[int, ...] = (8, 12, 16, 24, 24)
    surrogate_seed: int = 0
    embed_channels: int | None = None  # defaults to the stride-8 tap width
    disc_base: int = 64
    disc_layers: int = 4
    n_attributes: int = 33


def toy_style_config(image_size: int = 32, seed: int = 0) -> StyleModelConfig:
    """Small surrogate-encoder config for desk-scale runs."""
    return StyleModelConfig(
        image_size=image_size,
        encoder="surrogate",
        surrogate_channels=(6, 8, 12, 16, 16),
        surrogate_seed=seed,
        disc_base=8,
        disc_layers=2,
    )


class StyleTransferModel(nn.Module):
    """Encoder taps, shared embedding stage, two decoders, two critics, attribute head."""

    def __init__(self, config: StyleModelConfig, encoder: TapEncoder | None = None):
        super().__init__()
        self.config = config
        self.encoder = encoder if encoder is not None else build_encoder(
            config.encoder, config.surrogate_channels, config.surrogate_seed
        )
        taps = self.encoder.tap_channels
        embed_ch = config.embed_channels if config.embed_channels else taps[-2]
        self.embed_channels = embed_ch
        self.projector = EmbeddingProjector(taps, embed_ch)
        self.sketch_decoder = DomainDecoder(taps, embed_ch, config.image_channels)
        self.contour_decoder = DomainDecoder(taps, embed_ch, config.image_channels)
        self.sketch_discriminator = PatchDiscriminator(
            config.image_channels, config.disc_base, config.disc_layers
        )
        self.contour_discriminator = PatchDiscriminator(
            config.image_channels, config.disc_base, config.disc_layers
        )
        self.attribute_head = AttributeHead(embed_ch, config.n_attributes)

    # --- feature pathway -------------------------------------------------
    def encode(self, x: torch.Tensor) -> tuple[torch.Tensor, ...]:
        return self.encoder(x)

    def embed(self, taps: tuple[torch.Tensor, ...]) -> torch.Tensor:
        return self.projector(taps)

    def decode_sketch(self, h: torch.Tensor, taps) -> torch.Tensor:
        return self.sketch_decoder(h, taps)

    def decode_contour(self, h: torch.Tensor, taps) -> torch.Tensor:
        return self.contour_decoder(h, taps)

    # --- image-level API ---------------------------------------------------
    def translate(self, x: torch.Tensor, direction: str) -> torch.Tensor:
        taps = self.encode(x)
        h = self.embed(taps)
        if direction == "sketch_to_contour":
            return self.decode_contour(h, taps)
        if direction == "contour_to_sketch":
            return self.decode_sketch(h, taps)
        raise ValueError(f"unknown direction {direction!r}")

    def reconstruct(self, x: torch.Tensor, domain: str) -> torch.Tensor:
        taps = self.encode(x)
        h = self.embed(taps)
        if domain == "sketch":
            return self.decode_sketch(h, taps)
        if domain == "contour":
            return self.decode_contour(h, taps)
        raise ValueError(f"unknown domain {domain!r}")

    def generator_parameters(self):
        """Trainable parameters of the generator-side optimisation."""
        mods = [self.projector, self.sketch_decoder, self.contour_decoder, self.attribute_head]
        for m in mods:
            yield from m.parameters()

    def discriminator_parameters(self):
        yield from self.sketch_discriminator.parameters()
        yield from self.contour_discriminator.parameters()


def build_style_model(config: StyleModelConfig, init_seed: int | None = None) -> StyleTransferModel:
    """Construct a model; when init_seed is given the init is reproducible."""
    if init_seed is not None:
        torch.manual_seed(init_seed)
    return StyleTransferModel(config)
