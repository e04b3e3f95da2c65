"""Single-file model archives with a versioned header.

An archive holds named parameter blocks (state dict), the model and
training configs, and the iteration counter. Encoder weights are not
stored: the frozen encoder is rebuilt from its config (seeded surrogate or
pretrained weights), which keeps archives small and reproducible.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path

import torch

from .errors import CheckpointError

FORMAT_NAME = "sketchinvert-checkpoint"
FORMAT_VERSION = 1


def _strip_encoder(state: dict) -> dict:
    return {k: v for k, v in state.items() if not k.startswith("encoder.")}


def _save(path, kind: str, model_config: dict, train_config: dict, state: dict, iteration: int) -> None:
    payload = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind,
        "model_config": model_config,
        "train_config": train_config,
        "iteration": int(iteration),
        "state": state,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(payload, path)


def _load(path, kind: str) -> dict:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint {path} does not exist")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise CheckpointError(f"{path} is not a {FORMAT_NAME} archive")
    if payload.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {payload.get('version')}")
    if payload.get("kind") != kind:
        raise CheckpointError(f"expected a {kind!r} checkpoint, got {payload.get('kind')!r}")
    return payload


def save_style_checkpoint(path, model, train_config=None, iteration: int = 0) -> None:
    _save(
        path,
        "style",
        asdict(model.config),
        asdict(train_config) if train_config is not None else {},
        _strip_encoder(model.state_dict()),
        iteration,
    )


def load_style_checkpoint(path):
    """Returns (model, train_config_dict, iteration). Model is in eval mode."""
    from .styletransfer.networks import StyleModelConfig, StyleTransferModel

    payload = _load(path, "style")
    cfg_dict = dict(payload["model_config"])
    cfg_dict["surrogate_channels"] = tuple(cfg_dict.get("surrogate_channels", ()))
    config = StyleModelConfig(**cfg_dict)
    model = StyleTransferModel(config)
    missing, unexpected = model.load_state_dict(payload["state"], strict=False)
    bad_missing = [k for k in missing if not k.startswith("encoder.")]
    if bad_missing or unexpected:
        raise CheckpointError(f"state mismatch: missing={bad_missing} unexpected={unexpected}")
    model.eval()
    return model, payload["train_config"], payload["iteration"]


def save_sbir_checkpoint(path, model, train_config=None, iteration: int = 0) -> None:
    _save(
        path,
        "sbir",
        asdict(model.config),
        asdict(train_config) if train_config is not None else {},
        model.state_dict(),
        iteration,
    )


def load_sbir_checkpoint(path):
    """Returns (model, train_config_dict, iteration). Model is in eval mode."""
    from .fgsbir.backbone import SbirModelConfig, SbirModel

    payload = _load(path, "sbir")
    cfg_dict = dict(payload["model_config"])
    cfg_dict["toy_channels"] = tuple(cfg_dict.get("toy_channels", ()))
    config = SbirModelConfig(**cfg_dict)
    model = SbirModel(config)
    model.load_state_dict(payload["state"])
    model.eval()
    return model, payload["train_config"], payload["iteration"]
