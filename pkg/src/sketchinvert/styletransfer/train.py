"""Alternating adversarial training of the translation model."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..checkpoint import save_style_checkpoint
from ..data.dataset import DatasetSplit
from ..errors import NumericalDivergenceError
from ..torchutil import batch_from_images
from .losses import discriminator_adversarial_loss, generator_losses
from .networks import StyleTransferModel


@dataclass(frozen=True)
class StyleTrainConfig:
    lambda_adv: float = 10.0
    lambda_embed: float = 100.0
    lambda_recons: float = 100.0
    lambda_cls: float = 1.0
    lambda_gp: float = 10.0
    batch_size: int = 64
    iterations: int = 50_000
    lr: float = 1e-4
    beta1: float = 0.5
    beta2: float = 0.9
    disc_steps: int = 1
    checkpoint_every: int = 0  # 0: only the final checkpoint is written

    def __post_init__(self):
        for name in ("lambda_adv", "lambda_embed", "lambda_recons", "lambda_cls", "lambda_gp"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def train_style(
    model: StyleTransferModel,
    data: DatasetSplit,
    cfg: StyleTrainConfig,
    rng_seed: int = 0,
    checkpoint_path: str | Path | None = None,
    log_every: int = 1,
) -> tuple[StyleTransferModel, list[dict]]:
    """Run the alternating critic/generator loop on unpaired streams.

    `data` must carry both a sketch stream and a contour stream. Per
    iteration each critic takes `disc_steps` updates, then the generator
    side (shared stage, both decoders, attribute head) takes one. The
    encoder stays frozen throughout. Returns the model and the per-iteration
    metrics rows; a non-finite loss aborts with NumericalDivergenceError.
    """
    if not data.sketches or not data.contours:
        raise ValueError("training needs both sketch and contour streams")
    rng = np.random.default_rng(rng_seed)
    torch.manual_seed(rng_seed)

    sketch_bank = batch_from_images([s.image for s in data.sketches])
    contour_bank = batch_from_images([img for _, img in data.contours])
    sketch_attrs = [s.attributes for s in data.sketches]
    use_attributes = all(a is not None for a in sketch_attrs)
    attr_bank = (
        torch.stack([torch.from_numpy(a.flags) for a in sketch_attrs]).float()
        if use_attributes
        else None
    )

    opt_d = torch.optim.Adam(
        model.discriminator_parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2)
    )
    opt_g = torch.optim.Adam(
        model.generator_parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2)
    )

    metrics: list[dict] = []
    model.train()
    for it in range(cfg.iterations):
        s_idx = torch.from_numpy(rng.integers(0, sketch_bank.shape[0], cfg.batch_size))
        c_idx = torch.from_numpy(rng.integers(0, contour_bank.shape[0], cfg.batch_size))
        s_batch = sketch_bank[s_idx]
        c_batch = contour_bank[c_idx]

        # critic updates
        d_s_val = d_c_val = 0.0
        for _ in range(cfg.disc_steps):
            with torch.no_grad():
                fake_c = model.translate(s_batch, "sketch_to_contour")
                fake_s = model.translate(c_batch, "contour_to_sketch")
            loss_ds = discriminator_adversarial_loss(
                model.sketch_discriminator, s_batch, fake_s, cfg.lambda_gp
            )
            loss_dc = discriminator_adversarial_loss(
                model.contour_discriminator, c_batch, fake_c, cfg.lambda_gp
            )
            loss_d = cfg.lambda_adv * (loss_ds + loss_dc)
            opt_d.zero_grad()
            loss_d.backward()
            opt_d.step()
            d_s_val, d_c_val = loss_ds.detach().item(), loss_dc.detach().item()

        # generator update
        attrs = attr_bank[s_idx] if attr_bank is not None else None
        terms = generator_losses(model, s_batch, c_batch, attrs)
        loss_cls = terms.get("cls", torch.zeros(()))
        loss_g = (
            cfg.lambda_embed * terms["embed"]
            + cfg.lambda_recons * terms["recons"]
            + cfg.lambda_adv * terms["adv_g"]
            + cfg.lambda_cls * loss_cls
        )
        opt_g.zero_grad()
        loss_g.backward()
        opt_g.step()

        row = {
            "iteration": it,
            "loss_embed": terms["embed"].detach().item(),
            "loss_recons": terms["recons"].detach().item(),
            "loss_adv_g": terms["adv_g"].detach().item(),
            "loss_cls": loss_cls.detach().item(),
            "loss_adv_ds": d_s_val,
            "loss_adv_dc": d_c_val,
        }
        if not all(np.isfinite(v) for v in row.values()):
            raise NumericalDivergenceError(
                f"non-finite loss at iteration {it}: {row}", iteration=it
            )
        if it % log_every == 0:
            metrics.append(row)
        if (
            checkpoint_path is not None
            and cfg.checkpoint_every > 0
            and (it + 1) % cfg.checkpoint_every == 0
        ):
            save_style_checkpoint(checkpoint_path, model, cfg, iteration=it + 1)

    if checkpoint_path is not None:
        save_style_checkpoint(checkpoint_path, model, cfg, iteration=cfg.iterations)
    model.eval()
    return model, metrics


def write_metrics_csv(path: str | Path, rows: list[dict]) -> None:
    if not rows:
        return
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
