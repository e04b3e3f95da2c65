from .images import (
    normalize_image,
    content_bbox,
    fit_transform,
    resize_image,
    image_to_png_bytes,
    png_bytes_to_array,
    to_uint8,
    validate_image,
)
from .attributes import (
    AttributeVector,
    encode_attributes,
    DEFAULT_VOCABULARY,
    DROPPED_ATTRIBUTES,
)
from .dataset import SketchSample, DatasetSplit, load_split, save_split, merge_unpaired
from .toy import ToyConfig, ToyInstance, generate_toy_instances, make_toy_dataset

__all__ = [
    "normalize_image",
    "content_bbox",
    "fit_transform",
    "resize_image",
    "image_to_png_bytes",
    "png_bytes_to_array",
    "to_uint8",
    "validate_image",
    "AttributeVector",
    "encode_attributes",
    "DEFAULT_VOCABULARY",
    "DROPPED_ATTRIBUTES",
    "SketchSample",
    "DatasetSplit",
    "load_split",
    "save_split",
    "merge_unpaired",
    "ToyConfig",
    "ToyInstance",
    "generate_toy_instances",
    "make_toy_dataset",
]
