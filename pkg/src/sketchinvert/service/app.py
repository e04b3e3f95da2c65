"""HTTP retrieval and stylisation service.

Models and the gallery feature cache load once into an immutable snapshot;
request handlers only read it, so concurrent requests see a consistent
model. The admin reload endpoint builds a fresh snapshot and swaps the
reference atomically.
"""

from __future__ import annotations

import base64
import binascii
import os
from dataclasses import dataclass, replace

import numpy as np
import torch
from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from ..checkpoint import load_sbir_checkpoint, load_style_checkpoint
from ..data.dataset import load_split
from ..data.images import image_to_png_bytes, normalize_image, png_bytes_to_array
from ..errors import BlankImageError
from ..fgsbir.retrieval import GalleryIndex, query_features, rank_gallery
from ..torchutil import batch_from_images, to_image


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    style_checkpoint: str = ""
    sbir_checkpoint: str = ""
    gallery_dir: str = ""
    default_k: int = 10
    max_request_bytes: int = 4_000_000
    photo_size: int = 256

    def with_env_overrides(self) -> "ServiceConfig":
        """Environment variables win over file values for address and paths."""
        updates = {}
        if os.environ.get("SKETCHINVERT_HOST"):
            updates["host"] = os.environ["SKETCHINVERT_HOST"]
        if os.environ.get("SKETCHINVERT_PORT"):
            updates["port"] = int(os.environ["SKETCHINVERT_PORT"])
        if os.environ.get("SKETCHINVERT_STYLE_CKPT"):
            updates["style_checkpoint"] = os.environ["SKETCHINVERT_STYLE_CKPT"]
        if os.environ.get("SKETCHINVERT_SBIR_CKPT"):
            updates["sbir_checkpoint"] = os.environ["SKETCHINVERT_SBIR_CKPT"]
        if os.environ.get("SKETCHINVERT_GALLERY_DIR"):
            updates["gallery_dir"] = os.environ["SKETCHINVERT_GALLERY_DIR"]
        return replace(self, **updates) if updates else self


class ModelSnapshot:
    """Loaded models plus the gallery cache; treated as immutable."""

    def __init__(self, style_model, sbir_model, gallery_index: GalleryIndex, thumbnails: dict[str, bytes]):
        self.style_model = style_model
        self.sbir_model = sbir_model
        self.gallery_index = gallery_index
        self.thumbnails = thumbnails


def load_snapshot(cfg: ServiceConfig) -> ModelSnapshot:
    style_model, _, _ = load_style_checkpoint(cfg.style_checkpoint)
    sbir_model, _, _ = load_sbir_checkpoint(cfg.sbir_checkpoint)
    split = load_split(
        cfg.gallery_dir,
        mode="unpaired",
        sketch_size=style_model.config.image_size,
        photo_size=cfg.photo_size,
    )
    index = GalleryIndex.from_photos(list(split.photos), sbir_model)
    thumbs = {pid: image_to_png_bytes(img) for pid, img in split.photos}
    return ModelSnapshot(style_model, sbir_model, index, thumbs)


class StylizeRequest(BaseModel):
    image: str  # base64 PNG


class RetrieveRequest(BaseModel):
    image: str
    k: int | None = None


def create_app(cfg: ServiceConfig, snapshot: ModelSnapshot | None = None) -> FastAPI:
    app = FastAPI(title="sketchinvert")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    state = {"snapshot": snapshot}

    def current() -> ModelSnapshot:
        snap = state["snapshot"]
        if snap is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return snap

    def decode_image(b64: str) -> np.ndarray:
        if len(b64) > cfg.max_request_bytes * 4 // 3 + 4:
            raise HTTPException(status_code=413, detail="payload too large")
        try:
            raw = base64.b64decode(b64, validate=True)
        except (binascii.Error, ValueError):
            raise HTTPException(status_code=400, detail="invalid base64 payload")
        if len(raw) > cfg.max_request_bytes:
            raise HTTPException(status_code=413, detail="payload too large")
        try:
            return png_bytes_to_array(raw)
        except Exception:
            raise HTTPException(status_code=400, detail="payload is not a decodable image")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "model_loaded": state["snapshot"] is not None}

    @app.post("/stylize")
    def stylize(req: StylizeRequest):
        snap = current()
        arr = decode_image(req.image)
        size = snap.style_model.config.image_size
        try:
            img = normalize_image(arr, size)
        except BlankImageError:
            raise HTTPException(status_code=400, detail="image has no content")
        if img.shape[2] == 3:  # sketch queries are grayscale
            img = img.mean(axis=2, keepdims=True).astype(np.float32)
        snap.style_model.eval()
        with torch.no_grad():
            out = snap.style_model.translate(batch_from_images([img]), "sketch_to_contour")
        png = image_to_png_bytes(to_image(out[0]))
        return {"contour": base64.b64encode(png).decode("ascii")}

    @app.post("/retrieve")
    def retrieve_endpoint(req: RetrieveRequest):
        snap = current()
        k = req.k if req.k is not None else cfg.default_k
        if not 1 <= k <= len(snap.gallery_index):
            raise HTTPException(
                status_code=400,
                detail=f"k must lie in [1, {len(snap.gallery_index)}]",
            )
        arr = decode_image(req.image)
        size = snap.style_model.config.image_size
        try:
            img = normalize_image(arr, size)
        except BlankImageError:
            raise HTTPException(status_code=400, detail="image has no content")
        if img.shape[2] == 3:
            img = img.mean(axis=2, keepdims=True).astype(np.float32)
        q = query_features(img, snap.sbir_model, snap.style_model)
        result = rank_gallery(q, snap.gallery_index)
        return {
            "results": [
                {
                    "id": pid,
                    "distance": round(dist, 6),
                    "thumbnail_url": f"/gallery/{pid}/thumbnail",
                }
                for pid, dist in result.ranking[:k]
            ]
        }

    @app.get("/gallery")
    def gallery(page: int = 0, page_size: int = 20):
        snap = current()
        total = len(snap.gallery_index)
        if page_size < 1 or page_size > max(total, 1):
            raise HTTPException(status_code=400, detail="invalid page_size")
        n_pages = max(1, -(-total // page_size))
        if page < 0 or page >= n_pages:
            raise HTTPException(status_code=400, detail=f"page must lie in [0, {n_pages - 1}]")
        ids = snap.gallery_index.ids[page * page_size : (page + 1) * page_size]
        return {
            "total": total,
            "page": page,
            "page_size": page_size,
            "items": [
                {"id": pid, "thumbnail_url": f"/gallery/{pid}/thumbnail"} for pid in ids
            ],
        }

    @app.get("/gallery/{photo_id}/thumbnail")
    def thumbnail(photo_id: str):
        snap = current()
        if photo_id not in snap.thumbnails:
            raise HTTPException(status_code=404, detail="unknown photo id")
        return Response(content=snap.thumbnails[photo_id], media_type="image/png")

    @app.post("/admin/reload")
    def reload_models():
        state["snapshot"] = load_snapshot(cfg)
        return {"status": "reloaded", "gallery_size": len(state["snapshot"].gallery_index)}

    return app
