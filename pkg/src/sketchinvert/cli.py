"""Command-line entry points."""

from __future__ import annotations

import json
from pathlib import Path

import click
import numpy as np

from .checkpoint import load_sbir_checkpoint, load_style_checkpoint, save_sbir_checkpoint
from .configio import dataclass_from_flat, parse_flat_config, split_prefixed
from .contour import ThresholdConfig, extract_contour, load_edge_grid
from .contour.pipeline import binarize_edge_grid
from .data.dataset import load_split, merge_unpaired, save_split
from .data.images import image_to_png_bytes, load_image_file, normalize_image
from .data.toy import make_toy_dataset
from .errors import BlankImageError
from .evaluation.metrics import evaluate_sbir, evaluate_synthetic
from .fgsbir.backbone import SbirModel, SbirModelConfig
from .fgsbir.retrieval import retrieve
from .fgsbir.train import SbirTrainConfig, train_sbir
from .styletransfer.networks import StyleModelConfig, build_style_model
from .styletransfer.train import StyleTrainConfig, train_style, write_metrics_csv
from .torchutil import batch_from_images, to_image


def _write_png(img: np.ndarray, path: Path) -> None:
    path.write_bytes(image_to_png_bytes(img))


@click.command("extract-contours")
@click.option("--in", "in_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--alpha", default=0.08, show_default=True)
@click.option("--beta", default=0.12, show_default=True)
@click.option("--cap", default=0.9, show_default=True)
@click.option("--keep-mode", type=click.Choice(["above", "below"]), default="above", show_default=True)
@click.option("--sort-order", type=click.Choice(["descending", "ascending"]), default="descending", show_default=True)
@click.option("--target-size", default=64, show_default=True)
@click.option(
    "--input-kind",
    type=click.Choice(["photos", "edge-maps"]),
    default="photos",
    show_default=True,
    help="photos: run detection+NMS on PNGs; edge-maps: PNGs are post-NMS probability maps",
)
def extract_contours(in_dir, out_dir, alpha, beta, cap, keep_mode, sort_order, target_size, input_kind):
    """Extract binary contours from photos or precomputed edge maps.

    Precomputed maps are .npy grids (little-endian float32, row-major, shape
    header) or, with --input-kind edge-maps, grayscale PNGs read as
    probabilities in [0, 1].
    """
    cfg = ThresholdConfig(alpha=alpha, beta=beta, cap=cap, keep_mode=keep_mode, sort_order=sort_order)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_done = n_blank = 0
    for path in sorted(Path(in_dir).iterdir()):
        try:
            if path.suffix.lower() == ".npy":
                contour = binarize_edge_grid(load_edge_grid(path), cfg, target_size)
            elif path.suffix.lower() == ".png" and input_kind == "edge-maps":
                grid = load_image_file(path, grayscale=True)[:, :, 0].astype(np.float64) / 255.0
                contour = binarize_edge_grid(grid, cfg, target_size)
            elif path.suffix.lower() == ".png":
                photo = normalize_image(load_image_file(path, grayscale=False), target_size=max(target_size, 64))
                contour = extract_contour(photo, cfg=cfg, target_size=target_size)
            else:
                continue
        except BlankImageError:
            click.echo(f"skipped {path.name}: no contour pixels survived")
            n_blank += 1
            continue
        _write_png(contour, out / f"{path.stem}.png")
        n_done += 1
    click.echo(f"wrote {n_done} contours to {out} ({n_blank} blank)")


def _load_style_configs(config_file):
    model_kwargs: dict = {}
    train_kwargs: dict = {}
    if config_file:
        values = parse_flat_config(config_file)
        model_kwargs = split_prefixed(values, "model")
        train_kwargs = split_prefixed(values, "train")
        extra = set(values) - {f"model.{k}" for k in model_kwargs} - {f"train.{k}" for k in train_kwargs}
        if extra:
            raise click.ClickException(f"config keys must be model.* or train.*, got {sorted(extra)}")
    model_cfg = dataclass_from_flat(StyleModelConfig, model_kwargs)
    train_cfg = dataclass_from_flat(StyleTrainConfig, train_kwargs)
    return model_cfg, train_cfg


@click.command("train-style")
@click.option("--data", "data_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_ckpt", type=click.Path(dir_okay=False), required=True)
@click.option("--metrics-csv", type=click.Path(dir_okay=False), default=None)
def train_style_cmd(data_dir, config_file, seed, out_ckpt, metrics_csv):
    """Train the sketch->contour translation model on an unpaired split."""
    model_cfg, train_cfg = _load_style_configs(config_file)
    split = load_split(data_dir, mode="unpaired", sketch_size=model_cfg.image_size)
    model = build_style_model(model_cfg, init_seed=seed)
    model, metrics = train_style(model, split, train_cfg, rng_seed=seed, checkpoint_path=out_ckpt)
    if metrics_csv:
        write_metrics_csv(metrics_csv, metrics)
    click.echo(f"trained {train_cfg.iterations} iterations -> {out_ckpt}")


@click.command("stylize")
@click.option("--ckpt", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--in", "in_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def stylize_cmd(ckpt, in_dir, out_dir):
    """Translate sketch PNGs into distortion-free contours."""
    model, _, _ = load_style_checkpoint(ckpt)
    size = model.config.image_size
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    import torch

    n = 0
    for path in sorted(Path(in_dir).glob("*.png")):
        img = normalize_image(load_image_file(path, grayscale=True), size)
        with torch.no_grad():
            res = model.translate(batch_from_images([img]), "sketch_to_contour")
        _write_png(to_image(res[0]), out / path.name)
        n += 1
    click.echo(f"stylized {n} sketches -> {out}")


@click.command("train-sbir")
@click.option("--data", "data_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--style-ckpt", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_ckpt", type=click.Path(dir_okay=False), required=True)
@click.option("--metrics-csv", type=click.Path(dir_okay=False), default=None)
def train_sbir_cmd(data_dir, style_ckpt, config_file, seed, out_ckpt, metrics_csv):
    """Train the four-branch retrieval model on a paired split."""
    import torch

    model_kwargs: dict = {}
    train_kwargs: dict = {}
    if config_file:
        values = parse_flat_config(config_file)
        model_kwargs = split_prefixed(values, "model")
        train_kwargs = split_prefixed(values, "train")
    model_cfg = dataclass_from_flat(SbirModelConfig, model_kwargs)
    train_cfg = dataclass_from_flat(SbirTrainConfig, train_kwargs)
    style_model, _, _ = load_style_checkpoint(style_ckpt)
    split = load_split(
        data_dir, mode="paired",
        sketch_size=style_model.config.image_size,
        photo_size=model_cfg.input_size,
    )
    torch.manual_seed(seed)
    model = SbirModel(model_cfg)
    model, metrics = train_sbir(model, split, style_model, train_cfg, rng_seed=seed)
    save_sbir_checkpoint(out_ckpt, model, train_cfg, iteration=train_cfg.iterations)
    if metrics_csv:
        write_metrics_csv(metrics_csv, metrics)
    click.echo(f"trained {train_cfg.iterations} iterations -> {out_ckpt}")


@click.command("retrieve")
@click.option("--sbir-ckpt", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--style-ckpt", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--query", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--gallery", "gallery_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--k", default=10, show_default=True)
@click.option("--json", "as_json", is_flag=True, default=False)
def retrieve_cmd(sbir_ckpt, style_ckpt, query, gallery_dir, k, as_json):
    """Rank gallery photos against a query sketch PNG."""
    sbir_model, _, _ = load_sbir_checkpoint(sbir_ckpt)
    style_model, _, _ = load_style_checkpoint(style_ckpt)
    split = load_split(gallery_dir, mode="unpaired", photo_size=sbir_model.config.input_size)
    sketch = normalize_image(load_image_file(query, grayscale=True), style_model.config.image_size)
    result = retrieve(sketch, list(split.photos), sbir_model, style_model, query_id=Path(query).stem)
    top = result.ranking[:k]
    if as_json:
        click.echo(json.dumps({"query": result.query_instance_id,
                               "results": [{"id": pid, "distance": round(d, 6)} for pid, d in top]}, indent=1))
    else:
        for rank, (pid, dist) in enumerate(top, start=1):
            click.echo(f"{rank:3d}  {pid}  {dist:.6f}")


@click.command("evaluate")
@click.option("--sbir-ckpt", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--style-ckpt", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--data", "data_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--mode", type=click.Choice(["sbir", "synthetic"]), default="sbir", show_default=True)
@click.option("--json", "json_out", type=click.Path(dir_okay=False), default=None)
def evaluate_cmd(sbir_ckpt, style_ckpt, data_dir, mode, json_out):
    """Run the retrieval evaluation protocol over a paired split."""
    sbir_model, _, _ = load_sbir_checkpoint(sbir_ckpt)
    style_model, _, _ = load_style_checkpoint(style_ckpt)
    split = load_split(
        data_dir, mode="paired",
        sketch_size=style_model.config.image_size,
        photo_size=sbir_model.config.input_size,
    )
    ids = (Path(sbir_ckpt).name, Path(style_ckpt).name)
    if mode == "sbir":
        report = evaluate_sbir(sbir_model, style_model, split, checkpoint_ids=ids)
    else:
        report = evaluate_synthetic(style_model, sbir_model, split, checkpoint_ids=ids)
    payload = report.to_json()
    if json_out:
        Path(json_out).write_text(payload)
    click.echo(payload)


@click.command("serve")
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), required=True)
def serve_cmd(config_file):
    """Start the retrieval/stylisation HTTP service."""
    import uvicorn

    from .service.app import ServiceConfig, create_app, load_snapshot

    values = parse_flat_config(config_file)
    cfg = dataclass_from_flat(ServiceConfig, values).with_env_overrides()
    app = create_app(cfg, load_snapshot(cfg))
    uvicorn.run(app, host=cfg.host, port=cfg.port)


@click.command("make-toy-data")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--n", "n_instances", default=20, show_default=True)
@click.option("--size", default=32, show_default=True)
def make_toy_data_cmd(out_dir, seed, n_instances, size):
    """Write a synthetic dataset in the standard directory layout."""
    sketch_split, contour_split = make_toy_dataset(seed, n_instances, size)
    merged = merge_unpaired(sketch_split, contour_split)
    save_split(merged, out_dir)
    click.echo(f"wrote {n_instances} instances to {out_dir}")
