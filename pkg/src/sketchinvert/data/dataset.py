"""Dataset ingestion for the on-disk layout.

Layout: ``root/{sketches,photos,contours}/<instance_id>[_k].png`` plus an
optional ``root/attributes.json`` mapping instance id -> {name: 0/1}.
Sketches and contours are 8-bit grayscale PNGs, photos RGB. A trailing
``_<digits>`` filename suffix marks one of several sketches of the same
instance; instance ids themselves must not end in ``_<digits>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np
from PIL import Image

from ..errors import AnnotationParseError, BrokenPairError
from .attributes import AttributeVector, encode_attributes, DEFAULT_VOCABULARY
from .images import load_image_file, normalize_image, to_uint8


@dataclass(frozen=True)
class SketchSample:
    image: np.ndarray
    instance_id: str
    attributes: AttributeVector | None = None


@dataclass(frozen=True)
class DatasetSplit:
    """Immutable bundle of the three image domains plus the sketch-photo pairing.

    ``pairing`` maps sketch instance ids to photo instance ids; it is absent
    (None) in unpaired mode, where the sketch and contour sets may contain
    disjoint instances.
    """

    sketches: tuple[SketchSample, ...] = ()
    photos: tuple[tuple[str, np.ndarray], ...] = ()
    contours: tuple[tuple[str, np.ndarray], ...] = ()
    pairing: Mapping[str, str] | None = None

    def __post_init__(self):
        if self.pairing is not None and not isinstance(self.pairing, MappingProxyType):
            object.__setattr__(self, "pairing", MappingProxyType(dict(self.pairing)))

    def photo_ids(self) -> tuple[str, ...]:
        return tuple(pid for pid, _ in self.photos)


def instance_id_from_stem(stem: str) -> str:
    """Strip a trailing ``_<digits>`` multi-sketch suffix from a file stem."""
    head, _, tail = stem.rpartition("_")
    if head and tail.isdigit():
        return head
    return stem


def _load_annotations(path: Path) -> dict[str, dict]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise AnnotationParseError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise AnnotationParseError(f"{path} must map instance ids to attribute records")
    return data


def load_split(
    root: str | Path,
    mode: str = "paired",
    sketch_size: int = 64,
    photo_size: int = 256,
    polarity: str = "dark_on_light",
    vocabulary: tuple[str, ...] = DEFAULT_VOCABULARY,
) -> DatasetSplit:
    """Load one split from disk with deterministic (lexicographic) ordering.

    Paired mode validates that every sketch's instance id resolves to a
    photo; a miss raises BrokenPairError. Missing subdirectories yield empty
    domains rather than errors.
    """
    if mode not in ("paired", "unpaired"):
        raise ValueError(f"unknown mode {mode!r}")
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root {root} does not exist")

    annotations: dict[str, dict] = {}
    ann_path = root / "attributes.json"
    if ann_path.exists():
        annotations = _load_annotations(ann_path)

    def files(sub: str) -> list[Path]:
        d = root / sub
        if not d.is_dir():
            return []
        return sorted(p for p in d.iterdir() if p.suffix.lower() == ".png")

    photos = tuple(
        (p.stem, normalize_image(load_image_file(p, grayscale=False), photo_size, polarity))
        for p in files("photos")
    )
    contours = tuple(
        (p.stem, normalize_image(load_image_file(p, grayscale=True), sketch_size, polarity))
        for p in files("contours")
    )

    photo_ids = {pid for pid, _ in photos}
    sketches = []
    for p in files("sketches"):
        iid = instance_id_from_stem(p.stem)
        attrs = None
        if iid in annotations:
            attrs = encode_attributes(annotations[iid], vocabulary=vocabulary)
        if mode == "paired" and iid not in photo_ids:
            raise BrokenPairError(f"sketch {p.name} has no photo for instance {iid!r}")
        img = normalize_image(load_image_file(p, grayscale=True), sketch_size, polarity)
        sketches.append(SketchSample(image=img, instance_id=iid, attributes=attrs))

    pairing = None
    if mode == "paired":
        pairing = {s.instance_id: s.instance_id for s in sketches}
    return DatasetSplit(
        sketches=tuple(sketches), photos=photos, contours=contours, pairing=pairing
    )


def merge_unpaired(sketch_split: DatasetSplit, contour_split: DatasetSplit) -> DatasetSplit:
    """Combine a sketch-domain and a contour-domain split into one unpaired split."""
    return DatasetSplit(
        sketches=sketch_split.sketches,
        photos=sketch_split.photos or contour_split.photos,
        contours=contour_split.contours,
        pairing=None,
    )


def save_split(split: DatasetSplit, root: str | Path) -> None:
    """Write a split back to the documented directory layout."""
    root = Path(root)
    (root / "sketches").mkdir(parents=True, exist_ok=True)
    (root / "photos").mkdir(parents=True, exist_ok=True)
    if split.contours:
        (root / "contours").mkdir(parents=True, exist_ok=True)

    counts: dict[str, int] = {}
    annotations: dict[str, dict] = {}
    for sample in split.sketches:
        k = counts.get(sample.instance_id, 0)
        counts[sample.instance_id] = k + 1
        name = sample.instance_id if k == 0 else f"{sample.instance_id}_{k}"
        _write_png(split_img=sample.image, path=root / "sketches" / f"{name}.png")
        if sample.attributes is not None:
            annotations[sample.instance_id] = {
                n: int(f) for n, f in zip(sample.attributes.names, sample.attributes.flags)
            }
    for pid, img in split.photos:
        _write_png(split_img=img, path=root / "photos" / f"{pid}.png")
    for cid, img in split.contours:
        _write_png(split_img=img, path=root / "contours" / f"{cid}.png")
    if annotations:
        with open(root / "attributes.json", "w", encoding="utf-8") as fh:
            json.dump(annotations, fh, indent=1, sort_keys=True)


def _write_png(split_img: np.ndarray, path: Path) -> None:
    arr = to_uint8(split_img)
    if arr.shape[2] == 1:
        Image.fromarray(arr[:, :, 0], mode="L").save(path)
    else:
        Image.fromarray(arr, mode="RGB").save(path)
