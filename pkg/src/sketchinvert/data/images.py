"""Image normalisation and raster I/O.

Images are numpy float32 arrays of shape (H, W, C), values in [-1, 1].
Sketches and contours carry C=1, photos C=3. Strokes follow the
dark-on-light convention by default: background is +1, ink is darker.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from ..errors import BlankImageError, ShapeError

# Pixels this close to the background value count as background when the
# content bounding box is computed. Generous enough that resampling blur
# never erodes the box (keeps normalize_image idempotent).
_CONTENT_EPS = 1e-3


def validate_image(img: np.ndarray) -> None:
    """Raise ShapeError/ValueError if `img` is not a valid image tensor."""
    if not isinstance(img, np.ndarray) or img.ndim != 3:
        raise ShapeError(f"expected (H, W, C) array, got {getattr(img, 'shape', None)}")
    if img.shape[2] not in (1, 3):
        raise ShapeError(f"expected 1 or 3 channels, got {img.shape[2]}")
    if img.size and (img.min() < -1.0 - 1e-6 or img.max() > 1.0 + 1e-6):
        raise ValueError("image values outside [-1, 1]")


def _as_float(raw: np.ndarray) -> np.ndarray:
    """Map a byte image linearly onto [-1, 1]; pass float images through."""
    arr = np.asarray(raw)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ShapeError(f"expected grayscale or RGB image, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr.astype(np.float32) / 127.5 - 1.0
    return arr.astype(np.float32)


def _background_value(polarity: str) -> float:
    if polarity == "dark_on_light":
        return 1.0
    if polarity == "light_on_dark":
        return -1.0
    raise ValueError(f"unknown polarity {polarity!r}")


def content_bbox(img: np.ndarray, polarity: str = "dark_on_light") -> tuple[int, int, int, int]:
    """Bounding box (top, left, bottom, right), exclusive, of non-background pixels.

    Raises BlankImageError when every pixel is background.
    """
    bg = _background_value(polarity)
    mask = np.any(np.abs(img - bg) > _CONTENT_EPS, axis=2)
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        raise BlankImageError("image contains no foreground content")
    return int(rows[0]), int(cols[0]), int(rows[-1]) + 1, int(cols[-1]) + 1


def fit_transform(
    img: np.ndarray, target_size: int, polarity: str = "dark_on_light"
) -> tuple[float, tuple[int, int], tuple[int, int, int, int]]:
    """Parameters of the centre-and-fit map used by normalize_image.

    Returns (scale, (row_offset, col_offset), bbox): the content crop at
    `bbox` is scaled isotropically by `scale` and its top-left corner lands
    at the offsets inside the target square. Useful for mapping ground-truth
    geometry through the same transform as the image.
    """
    bbox = content_bbox(img, polarity)
    top, left, bottom, right = bbox
    h, w = bottom - top, right - left
    scale = target_size / max(h, w)
    new_h = min(target_size, max(1, round(h * scale)))
    new_w = min(target_size, max(1, round(w * scale)))
    off = ((target_size - new_h) // 2, (target_size - new_w) // 2)
    return scale, off, bbox


def _resize_channel(ch: np.ndarray, size_wh: tuple[int, int], shrinking: bool) -> np.ndarray:
    im = Image.fromarray(ch, mode="F")
    resample = Image.Resampling.BOX if shrinking else Image.Resampling.BILINEAR
    return np.asarray(im.resize(size_wh, resample=resample), dtype=np.float32)


def resize_image(img: np.ndarray, height: int, width: int) -> np.ndarray:
    """Plain resample of a float image (no recentring), preserving channels."""
    if img.shape[0] == height and img.shape[1] == width:
        return img.astype(np.float32)
    shrinking = height < img.shape[0] or width < img.shape[1]
    chans = [
        _resize_channel(np.ascontiguousarray(img[:, :, c], dtype=np.float32), (width, height), shrinking)
        for c in range(img.shape[2])
    ]
    return np.clip(np.stack(chans, axis=2), -1.0, 1.0)


def normalize_image(
    raw: np.ndarray, target_size: int, polarity: str = "dark_on_light"
) -> np.ndarray:
    """Centre, scale and range-normalise an image to a target square.

    Byte input is mapped linearly through v/127.5 - 1; float input is assumed
    to already lie in [-1, 1]. The content (non-background pixels under the
    given polarity) is cropped to its bounding box, isotropically scaled so
    the larger side fills `target_size`, and centred against padding of the
    background value. Idempotent on already-normalised images: when the crop
    already fits exactly, no resampling is performed.

    Raises BlankImageError for an all-background image.
    """
    if target_size < 1:
        raise ValueError("target_size must be positive")
    img = _as_float(raw)
    if img.size == 0:
        raise BlankImageError("empty image")
    bg = _background_value(polarity)
    scale, (off_r, off_c), (top, left, bottom, right) = fit_transform(img, target_size, polarity)
    crop = img[top:bottom, left:right, :]
    h, w = crop.shape[:2]
    new_h = min(target_size, max(1, round(h * scale)))
    new_w = min(target_size, max(1, round(w * scale)))
    if (new_h, new_w) != (h, w):
        shrinking = new_h < h or new_w < w
        chans = [
            _resize_channel(np.ascontiguousarray(crop[:, :, c], dtype=np.float32), (new_w, new_h), shrinking)
            for c in range(crop.shape[2])
        ]
        crop = np.stack(chans, axis=2)
    out = np.full((target_size, target_size, img.shape[2]), bg, dtype=np.float32)
    out[off_r : off_r + new_h, off_c : off_c + new_w, :] = crop
    return np.clip(out, -1.0, 1.0)


def to_uint8(img: np.ndarray) -> np.ndarray:
    """Map a [-1, 1] float image back to bytes."""
    return np.clip(np.rint((img.astype(np.float64) + 1.0) * 127.5), 0, 255).astype(np.uint8)


def image_to_png_bytes(img: np.ndarray) -> bytes:
    """Encode a float image tensor as PNG bytes (grayscale or RGB)."""
    arr = to_uint8(img)
    if arr.shape[2] == 1:
        pil = Image.fromarray(arr[:, :, 0], mode="L")
    else:
        pil = Image.fromarray(arr, mode="RGB")
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def png_bytes_to_array(data: bytes) -> np.ndarray:
    """Decode PNG bytes to a uint8 array (H, W, 1) or (H, W, 3)."""
    with Image.open(io.BytesIO(data)) as pil:
        if pil.mode in ("L", "1", "I;16"):
            arr = np.asarray(pil.convert("L"), dtype=np.uint8)[:, :, None]
        else:
            arr = np.asarray(pil.convert("RGB"), dtype=np.uint8)
    return arr


def load_image_file(path, grayscale: bool) -> np.ndarray:
    """Read an image file to a uint8 array with the requested channel count."""
    with Image.open(path) as pil:
        if grayscale:
            return np.asarray(pil.convert("L"), dtype=np.uint8)[:, :, None]
        return np.asarray(pil.convert("RGB"), dtype=np.uint8)
