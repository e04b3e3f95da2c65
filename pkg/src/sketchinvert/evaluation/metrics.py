"""Retrieval accuracy metrics and evaluation protocols."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

import torch

from ..data.images import resize_image
from ..errors import InvalidKError
from ..fgsbir.retrieval import GalleryIndex, retrieve
from ..torchutil import batch_from_images, to_image


def acc_at_k(results, k: int) -> float:
    """Fraction of queries whose true instance appears in the top k."""
    if k < 1:
        raise InvalidKError(f"k must be >= 1, got {k}")
    if not results:
        return 0.0
    hits = 0
    for r in results:
        top = r.ranking[:k]
        hits += any(pid == r.query_instance_id for pid, _ in top)
    return hits / len(results)


@dataclass(frozen=True)
class EvalReport:
    acc_at_1: float
    acc_at_5: float
    acc_at_10: float
    per_query_ranks: tuple[int, ...]
    n_queries: int
    gallery_size: int
    config_fingerprint: str
    checkpoint_ids: tuple[str, ...] = ()
    mode: str = "sbir"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def _fingerprint(*parts) -> str:
    blob = json.dumps(parts, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _report(results, gallery_size, fingerprint, checkpoint_ids, mode) -> EvalReport:
    ranks = tuple(r.rank_of(r.query_instance_id) or gallery_size + 1 for r in results)
    return EvalReport(
        acc_at_1=acc_at_k(results, 1),
        acc_at_5=acc_at_k(results, 5),
        acc_at_10=acc_at_k(results, 10),
        per_query_ranks=ranks,
        n_queries=len(results),
        gallery_size=gallery_size,
        config_fingerprint=fingerprint,
        checkpoint_ids=tuple(checkpoint_ids),
        mode=mode,
    )


def evaluate_sbir(sbir_model, style_model, split, checkpoint_ids=()) -> EvalReport:
    """Standard protocol: each real sketch queries the split's photo gallery."""
    index = GalleryIndex.from_photos(list(split.photos), sbir_model)
    results = [
        retrieve(s.image, index, sbir_model, style_model, query_id=s.instance_id)
        for s in split.sketches
    ]
    fp = _fingerprint(asdict(sbir_model.config), asdict(style_model.config), list(checkpoint_ids))
    return _report(results, len(index), fp, checkpoint_ids, "sbir")


def evaluate_synthetic(style_model, sbir_model, split, checkpoint_ids=()) -> EvalReport:
    """Synthesised-sketch protocol: replace each test sketch with its
    synthesised contour, then run the standard retrieval pipeline on it."""
    index = GalleryIndex.from_photos(list(split.photos), sbir_model)
    style_model.eval()
    style_size = style_model.config.image_size
    results = []
    for s in split.sketches:
        img = resize_image(s.image, style_size, style_size)
        with torch.no_grad():
            synth = style_model.translate(batch_from_images([img]), "sketch_to_contour")
        results.append(
            retrieve(to_image(synth[0]), index, sbir_model, style_model, query_id=s.instance_id)
        )
    fp = _fingerprint(asdict(sbir_model.config), asdict(style_model.config), list(checkpoint_ids))
    return _report(results, len(index), fp, checkpoint_ids, "synthetic")
