"""Training objectives for the translation model.

All reductions are means over batch and spatial/feature elements so the
loss weights stay scale-free across resolutions. The model argument only
needs the encode/embed/decode call surface, so tests can substitute stubs.
"""

from __future__ import annotations

import torch

from ..errors import ShapeError

_BCE_EPS = 1e-7


def embedding_consistency_loss(model, sketches: torch.Tensor, contours: torch.Tensor) -> torch.Tensor:
    """Round-trip agreement in the shared embedding space.

    A sample and its cross-domain translation must map to the same embedding
    point; the penalty is the batch-mean Euclidean distance over the
    flattened maps, one term per domain.
    """
    taps_s = model.encode(sketches)
    h_s = model.embed(taps_s)
    fake_c = model.decode_contour(h_s, taps_s)
    h_s_back = model.embed(model.encode(fake_c))
    term_s = (h_s - h_s_back).flatten(1).norm(dim=1).mean()

    taps_c = model.encode(contours)
    h_c = model.embed(taps_c)
    fake_s = model.decode_sketch(h_c, taps_c)
    h_c_back = model.embed(model.encode(fake_s))
    term_c = (h_c - h_c_back).flatten(1).norm(dim=1).mean()
    return term_s + term_c


def reconstruction_loss(model, sketches: torch.Tensor, contours: torch.Tensor) -> torch.Tensor:
    """Within-domain self-reconstruction, mean per-pixel L1 per domain."""
    rec_s = model.reconstruct(sketches, "sketch")
    rec_c = model.reconstruct(contours, "contour")
    return (sketches - rec_s).abs().mean() + (contours - rec_c).abs().mean()


def attribute_loss(head, h: torch.Tensor, attributes: torch.Tensor) -> torch.Tensor:
    """Multi-label negative log-likelihood of the attribute flags.

    `head` maps the embedding to per-attribute probabilities; the loss is
    the mean binary cross-entropy over attributes and batch.
    """
    probs = head(h)
    if attributes.dim() != 2 or attributes.shape[1] != probs.shape[1]:
        raise ShapeError(
            f"attribute vector length {tuple(attributes.shape)} does not match "
            f"head width {probs.shape[1]}"
        )
    a = attributes.to(probs.dtype)
    log_p = probs.clamp(min=_BCE_EPS).log()
    log_not_p = (1.0 - probs).clamp(min=_BCE_EPS).log()
    return -(a * log_p + (1.0 - a) * log_not_p).mean()


def generator_adversarial_loss(model, sketches: torch.Tensor, contours: torch.Tensor) -> torch.Tensor:
    """Least-squares real-label loss on the translated images (critics fixed)."""
    taps_s = model.encode(sketches)
    fake_c = model.decode_contour(model.embed(taps_s), taps_s)
    taps_c = model.encode(contours)
    fake_s = model.decode_sketch(model.embed(taps_c), taps_c)
    term_c = (model.contour_discriminator(fake_c) - 1.0).pow(2).mean()
    term_s = (model.sketch_discriminator(fake_s) - 1.0).pow(2).mean()
    return term_c + term_s


def generator_losses(
    model,
    sketches: torch.Tensor,
    contours: torch.Tensor,
    attributes: torch.Tensor | None = None,
) -> dict[str, torch.Tensor]:
    """All generator-side terms computed off shared intermediates.

    Numerically identical to calling the individual loss functions, but
    encodes/decodes each batch once. Real-image taps carry no gradient
    (the encoder is frozen), which shrinks the backward graph.
    """
    with torch.no_grad():
        taps_s = model.encode(sketches)
        taps_c = model.encode(contours)
    h_s = model.embed(taps_s)
    h_c = model.embed(taps_c)
    fake_c = model.decode_contour(h_s, taps_s)
    fake_s = model.decode_sketch(h_c, taps_c)
    rec_s = model.decode_sketch(h_s, taps_s)
    rec_c = model.decode_contour(h_c, taps_c)
    h_s_back = model.embed(model.encode(fake_c))
    h_c_back = model.embed(model.encode(fake_s))

    embed = (
        (h_s - h_s_back).flatten(1).norm(dim=1).mean()
        + (h_c - h_c_back).flatten(1).norm(dim=1).mean()
    )
    recons = (sketches - rec_s).abs().mean() + (contours - rec_c).abs().mean()
    adv = (
        (model.contour_discriminator(fake_c) - 1.0).pow(2).mean()
        + (model.sketch_discriminator(fake_s) - 1.0).pow(2).mean()
    )
    out = {"embed": embed, "recons": recons, "adv_g": adv}
    if attributes is not None:
        out["cls"] = attribute_loss(model.attribute_head, h_s, attributes)
    return out


def gradient_penalty(
    disc,
    real: torch.Tensor,
    fake: torch.Tensor,
    u: torch.Tensor | None = None,
    generator: torch.Generator | None = None,
) -> torch.Tensor:
    """Unit-gradient-norm penalty on straight-line samples between real and fake."""
    if u is None:
        u = torch.rand(real.shape[0], 1, 1, 1, generator=generator, dtype=real.dtype)
    x = (u * real + (1.0 - u) * fake).detach().requires_grad_(True)
    with torch.enable_grad():  # the penalty needs a graph even under no_grad callers
        score = disc(x)
        grads = torch.autograd.grad(score.sum(), x, create_graph=True)[0]
    return (grads.flatten(1).norm(dim=1) - 1.0).pow(2).mean()


def discriminator_adversarial_loss(
    disc,
    real: torch.Tensor,
    fake: torch.Tensor,
    lambda_gp: float = 10.0,
    u: torch.Tensor | None = None,
    generator: torch.Generator | None = None,
) -> torch.Tensor:
    """Least-squares critic loss plus the (added) gradient penalty.

    `fake` is detached, so only critic parameters receive gradients. Every
    term is non-negative, so the whole objective is.
    """
    fake = fake.detach()
    real_term = (disc(real) - 1.0).pow(2).mean()
    fake_term = disc(fake).pow(2).mean()
    gp = gradient_penalty(disc, real, fake, u=u, generator=generator)
    return real_term + fake_term + lambda_gp * gp
