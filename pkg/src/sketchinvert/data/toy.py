"""Synthetic desk-scale dataset: convex polygon outlines with detail strokes.

Each instance is a random convex polygon. The contour domain holds the
clean rasterised outline; the sketch domain holds the same outline plus
1-3 interior detail strokes, passed through a smooth sinusoidal warp. The
photo is the filled polygon on a white background. Everything is a pure
function of (seed, n_instances, size, config).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw
from scipy.ndimage import map_coordinates

from .attributes import AttributeVector, _KEPT_ATTRIBUTES
from .dataset import DatasetSplit, SketchSample


@dataclass(frozen=True)
class ToyConfig:
    n_vertices_range: tuple[int, int] = (5, 8)
    radius_range: tuple[float, float] = (0.26, 0.42)
    n_details_range: tuple[int, int] = (1, 3)
    warp_amplitude: float = 1.6
    warp_frequency_range: tuple[int, int] = (1, 2)


@dataclass(frozen=True)
class ToyInstance:
    instance_id: str
    vertices: np.ndarray  # (k, 2) float, (row, col)
    detail_segments: tuple[tuple[float, float, float, float], ...]
    sketch: np.ndarray
    contour: np.ndarray
    photo: np.ndarray
    attributes: AttributeVector


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Andrew's monotone chain; returns hull vertices in ccw order."""
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]

    def cross2(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross2(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _draw_outline(size: int, vertices: np.ndarray) -> Image.Image:
    im = Image.new("L", (size, size), 255)
    draw = ImageDraw.Draw(im)
    xy = [(float(c), float(r)) for r, c in vertices]
    draw.polygon(xy, outline=0)
    return im


def _warp(img: np.ndarray, amplitude: float, freqs: tuple[int, int], phases: tuple[float, float]) -> np.ndarray:
    """Resample through a smooth sinusoidal displacement field (white fill)."""
    size = img.shape[0]
    rr, cc = np.meshgrid(np.arange(size, dtype=np.float64), np.arange(size, dtype=np.float64), indexing="ij")
    dr = amplitude * np.sin(2.0 * np.pi * freqs[0] * cc / size + phases[0])
    dc = amplitude * np.sin(2.0 * np.pi * freqs[1] * rr / size + phases[1])
    warped = map_coordinates(img.astype(np.float64), [rr + dr, cc + dc], order=1, mode="constant", cval=1.0)
    return warped.astype(np.float32)


def _to_float(im: Image.Image) -> np.ndarray:
    return np.asarray(im, dtype=np.float32) / 127.5 - 1.0


def generate_toy_instances(
    seed: int, n_instances: int, size: int, config: ToyConfig = ToyConfig()
) -> tuple[ToyInstance, ...]:
    if n_instances < 2:
        raise ValueError("need at least 2 instances")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_instances):
        k = int(rng.integers(config.n_vertices_range[0], config.n_vertices_range[1] + 1))
        angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, k))
        radii = rng.uniform(config.radius_range[0], config.radius_range[1], k) * size
        center = np.array([size / 2.0, size / 2.0])
        pts = np.stack([center[0] + radii * np.sin(angles), center[1] + radii * np.cos(angles)], axis=1)
        vertices = _convex_hull(pts)

        n_details = int(rng.integers(config.n_details_range[0], config.n_details_range[1] + 1))
        segments = []
        for _ in range(n_details):
            a, b = rng.integers(0, len(vertices), 2)
            ua, ub = rng.uniform(0.2, 0.7, 2)
            p0 = center + ua * (vertices[a] - center)
            p1 = center + ub * (vertices[b] - center)
            segments.append((float(p0[0]), float(p0[1]), float(p1[0]), float(p1[1])))

        outline = _draw_outline(size, vertices)
        sketch_im = outline.copy()
        draw = ImageDraw.Draw(sketch_im)
        for r0, c0, r1, c1 in segments:
            draw.line([(c0, r0), (c1, r1)], fill=0, width=1)

        freqs = tuple(int(f) for f in rng.integers(config.warp_frequency_range[0], config.warp_frequency_range[1] + 1, 2))
        phases = tuple(float(p) for p in rng.uniform(0.0, 2.0 * np.pi, 2))
        sketch = _warp(_to_float(sketch_im), config.warp_amplitude, freqs, phases)[:, :, None]
        contour = _to_float(outline)[:, :, None]

        # supersample the photo so its edges are soft like a real photograph
        fill = tuple(int(v) for v in rng.integers(60, 200, 3))
        ss = 4
        photo_im = Image.new("RGB", (size * ss, size * ss), (255, 255, 255))
        pdraw = ImageDraw.Draw(photo_im)
        pdraw.polygon([(float(c) * ss + (ss - 1) / 2, float(r) * ss + (ss - 1) / 2) for r, c in vertices], fill=fill)
        photo_im = photo_im.resize((size, size), resample=Image.Resampling.BOX)
        photo = np.asarray(photo_im, dtype=np.float32) / 127.5 - 1.0

        flags = np.zeros(len(_KEPT_ATTRIBUTES), dtype=np.float32)
        flags[0] = 1.0 if len(vertices) >= 6 else 0.0
        flags[1] = 1.0 if n_details >= 2 else 0.0
        flags[2] = 1.0 if float(radii.mean()) > 0.5 * (config.radius_range[0] + config.radius_range[1]) * size else 0.0
        flags[3:] = (rng.uniform(0.0, 1.0, len(flags) - 3) < 0.3).astype(np.float32)
        attrs = AttributeVector(flags=flags, names=_KEPT_ATTRIBUTES)

        out.append(
            ToyInstance(
                instance_id=f"toy{i:03d}",
                vertices=vertices,
                detail_segments=tuple(segments),
                sketch=sketch,
                contour=contour,
                photo=photo,
                attributes=attrs,
            )
        )
    return tuple(out)


def make_toy_dataset(
    seed: int, n_instances: int, size: int = 32, config: ToyConfig = ToyConfig()
) -> tuple[DatasetSplit, DatasetSplit]:
    """Build the (sketch-domain, contour-domain) split pair.

    The sketch-domain split carries the warped, detailed sketches plus the
    paired photos (identity pairing); the contour-domain split carries the
    clean unwarped outlines and the same photo gallery. Instance identity is
    shared across the two domains.
    """
    instances = generate_toy_instances(seed, n_instances, size, config)
    sketches = tuple(
        SketchSample(image=inst.sketch, instance_id=inst.instance_id, attributes=inst.attributes)
        for inst in instances
    )
    photos = tuple((inst.instance_id, inst.photo) for inst in instances)
    contours = tuple((inst.instance_id, inst.contour) for inst in instances)
    pairing = {inst.instance_id: inst.instance_id for inst in instances}
    sketch_split = DatasetSplit(sketches=sketches, photos=photos, contours=(), pairing=pairing)
    contour_split = DatasetSplit(sketches=(), photos=photos, contours=contours, pairing=None)
    return sketch_split, contour_split
