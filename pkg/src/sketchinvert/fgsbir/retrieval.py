"""Ranked retrieval against a photo gallery with a cached feature index."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..data.images import resize_image
from ..errors import CheckpointError, EmptyGalleryError
from ..torchutil import batch_from_images, to_tensor
from .backbone import SbirModel

_CACHE_VERSION = 1


@dataclass(frozen=True)
class RetrievalResult:
    query_instance_id: str
    ranking: tuple[tuple[str, float], ...]  # (photo id, squared distance), ascending

    def rank_of(self, instance_id: str) -> int | None:
        """1-based rank of the given photo id, or None if absent."""
        for i, (pid, _) in enumerate(self.ranking):
            if pid == instance_id:
                return i + 1
        return None


class GalleryIndex:
    """Photo ids with their precomputed unit-norm features, in gallery order."""

    def __init__(self, ids, features: np.ndarray):
        self.ids = tuple(ids)
        self.features = np.asarray(features, dtype=np.float64)
        if len(self.ids) != self.features.shape[0]:
            raise ValueError("ids and feature rows differ")

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def from_photos(cls, photos, model: SbirModel, batch_size: int = 32) -> "GalleryIndex":
        if not photos:
            raise EmptyGalleryError("gallery is empty")
        model.eval()
        size = model.config.input_size
        feats = []
        with torch.no_grad():
            for i in range(0, len(photos), batch_size):
                chunk = photos[i : i + batch_size]
                batch = batch_from_images([resize_image(img, size, size) for _, img in chunk])
                feats.append(model.features(batch).numpy())
        return cls([pid for pid, _ in photos], np.concatenate(feats, axis=0))

    def save(self, path: str | Path) -> None:
        np.savez(
            path,
            version=np.int64(_CACHE_VERSION),
            ids=np.array(self.ids, dtype=np.str_),
            features=self.features.astype(np.float32),
        )

    @classmethod
    def load(cls, path: str | Path) -> "GalleryIndex":
        with np.load(path, allow_pickle=False) as data:
            if int(data["version"]) != _CACHE_VERSION:
                raise CheckpointError(f"unsupported gallery cache version {data['version']}")
            return cls([str(s) for s in data["ids"]], data["features"])


def rank_gallery(query: np.ndarray, index: GalleryIndex, query_id: str = "") -> RetrievalResult:
    """Order the gallery by squared distance to the fused query, stable ties."""
    if len(index) == 0:
        raise EmptyGalleryError("gallery is empty")
    d = ((index.features - np.asarray(query, dtype=np.float64)) ** 2).sum(axis=1)
    order = np.argsort(d, kind="stable")
    ranking = tuple((index.ids[i], float(d[i])) for i in order)
    return RetrievalResult(query_instance_id=query_id, ranking=ranking)


def query_features(sketch: np.ndarray, sbir_model: SbirModel, style_model) -> np.ndarray:
    """Fused query vector: branch features of the sketch and its synthesised contour."""
    style_model.eval()
    sbir_model.eval()
    style_size = style_model.config.image_size
    sketch = resize_image(sketch, style_size, style_size)
    with torch.no_grad():
        contour_t = style_model.translate(to_tensor(sketch)[None], "sketch_to_contour")
    size = sbir_model.config.input_size
    s_in = resize_image(sketch, size, size)
    c_in = resize_image(contour_t[0].numpy().transpose(1, 2, 0), size, size)
    with torch.no_grad():
        feats = sbir_model.features(batch_from_images([s_in, c_in]))
    f_s, f_sc = feats[0].numpy(), feats[1].numpy()
    q = f_s.astype(np.float64) + f_sc.astype(np.float64)
    if sbir_model.config.fuse_normalize:
        q = q / np.linalg.norm(q)
    return q


def retrieve(
    sketch: np.ndarray,
    gallery,
    sbir_model: SbirModel,
    style_model,
    query_id: str = "",
) -> RetrievalResult:
    """Full query pipeline against a photo list or prebuilt GalleryIndex."""
    if isinstance(gallery, GalleryIndex):
        index = gallery
    else:
        if not gallery:
            raise EmptyGalleryError("gallery is empty")
        index = GalleryIndex.from_photos(gallery, sbir_model)
    q = query_features(sketch, sbir_model, style_model)
    return rank_gallery(q, index, query_id=query_id)
