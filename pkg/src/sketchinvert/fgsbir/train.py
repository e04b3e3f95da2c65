"""Four-branch triplet training with feature decorrelation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..data.images import resize_image
from ..errors import NumericalDivergenceError
from ..torchutil import batch_from_images, to_image
from .backbone import SbirModel
from .losses import decorrelation_loss, triplet_margin_loss


@dataclass(frozen=True)
class SbirTrainConfig:
    margin: float = 0.1
    lambda_decorr: float = 1.0
    batch_size: int = 16
    iterations: int = 60_000
    lr: float = 1e-4
    beta1: float = 0.5
    beta2: float = 0.9
    decorr_gradient: bool = True  # False: ablate the decorrelation gradient, keep logging it

    def __post_init__(self):
        if self.margin <= 0:
            raise ValueError("margin must be positive")
        if self.lambda_decorr < 0:
            raise ValueError("lambda_decorr must be non-negative")


def toy_sbir_train_config(iterations: int = 1500) -> SbirTrainConfig:
    """Desk-scale calibration: the un-divided cross-correlation loss is several
    orders of magnitude above the triplet term on a random-init toy backbone,
    so its weight is scaled down to keep both gradients active."""
    return SbirTrainConfig(iterations=iterations, lambda_decorr=1e-6)


def synthesize_contours(style_model, sketches, target_size: int, batch_size: int = 64):
    """Translate every sketch to its clean contour once, resized for the backbone."""
    style_model.eval()
    out = []
    with torch.no_grad():
        for i in range(0, len(sketches), batch_size):
            batch = batch_from_images([s.image for s in sketches[i : i + batch_size]])
            fake = style_model.translate(batch, "sketch_to_contour")
            for j in range(fake.shape[0]):
                out.append(resize_image(to_image(fake[j]), target_size, target_size))
    return out


def train_sbir(
    model: SbirModel,
    data,
    style_model,
    cfg: SbirTrainConfig,
    rng_seed: int = 0,
) -> tuple[SbirModel, list[dict]]:
    """Minimise triplet + decorrelation over quadruples from a paired split.

    Synthesised contours are precomputed once (the style model stays
    frozen). Negatives are drawn uniformly from non-matching photos with a
    seeded generator, reseeded per epoch over the shuffled sketch order.
    """
    if not data.sketches or not data.photos:
        raise ValueError("paired training needs sketches and photos")
    if data.pairing is None:
        raise ValueError("training needs a paired split")
    rng = np.random.default_rng(rng_seed)
    torch.manual_seed(rng_seed)
    size = model.config.input_size

    def _rgb(img: np.ndarray) -> np.ndarray:
        return np.repeat(img, 3, axis=2) if img.shape[2] == 1 else img

    contours = synthesize_contours(style_model, data.sketches, size)
    sketch_bank = batch_from_images(
        [_rgb(resize_image(s.image, size, size)) for s in data.sketches]
    )
    contour_bank = batch_from_images([_rgb(c) for c in contours])
    photo_ids = [pid for pid, _ in data.photos]
    photo_bank = batch_from_images([_rgb(resize_image(img, size, size)) for _, img in data.photos])
    photo_index = {pid: i for i, pid in enumerate(photo_ids)}
    positive_idx = np.array(
        [photo_index[data.pairing[s.instance_id]] for s in data.sketches]
    )

    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2))
    n_sketches = sketch_bank.shape[0]
    n_photos = photo_bank.shape[0]

    metrics: list[dict] = []
    model.train()
    order = np.array([], dtype=np.int64)
    epoch = 0
    for it in range(cfg.iterations):
        if order.size < cfg.batch_size:
            epoch_rng = np.random.default_rng(rng_seed + 1 + epoch)
            order = np.concatenate([order, epoch_rng.permutation(n_sketches)])
            epoch += 1
        take, order = order[: cfg.batch_size], order[cfg.batch_size :]

        pos = positive_idx[take]
        neg = np.empty_like(pos)
        for j, p in enumerate(pos):
            n = rng.integers(0, n_photos - 1)
            neg[j] = n if n < p else n + 1

        idx = torch.from_numpy(take)
        branches = torch.cat(
            [
                sketch_bank[idx],
                contour_bank[idx],
                photo_bank[torch.from_numpy(pos)],
                photo_bank[torch.from_numpy(neg)],
            ]
        )
        feats = model.features(branches)
        f_s, f_sc, f_pos, f_neg = feats.chunk(4)

        loss_tri = triplet_margin_loss(f_s + f_sc, f_pos, f_neg, cfg.margin)
        loss_dec = decorrelation_loss(f_s, f_sc)
        if cfg.decorr_gradient:
            loss = loss_tri + cfg.lambda_decorr * loss_dec
        else:
            loss = loss_tri
        opt.zero_grad()
        loss.backward()
        opt.step()

        row = {
            "iteration": it,
            "loss_triplet": loss_tri.detach().item(),
            "loss_decorr": loss_dec.detach().item(),
        }
        if not all(np.isfinite(v) for v in row.values()):
            raise NumericalDivergenceError(
                f"non-finite loss at iteration {it}: {row}", iteration=it
            )
        metrics.append(row)

    model.eval()
    return model, metrics
