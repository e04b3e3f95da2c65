"""Binary part-attribute encoding.

The annotation vocabulary carries 37 names; the four decoration-related
ones are dropped at encoding time, leaving the 33 semantic part attributes
the embedding is asked to predict. The vocabulary is configurable; the
default below is a plausible shoe-part inventory.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from ..errors import UnknownAttributeError

DROPPED_ATTRIBUTES: tuple[str, ...] = ("frontal", "lateral", "others", "no decoration")

_KEPT_ATTRIBUTES: tuple[str, ...] = (
    "round-toe",
    "pointed-toe",
    "open-toe",
    "square-toe",
    "flat-heel",
    "low-heel",
    "mid-heel",
    "high-heel",
    "wedge-heel",
    "block-heel",
    "stiletto-heel",
    "laces",
    "velcro-strap",
    "buckle",
    "zipper",
    "slip-on",
    "elastic-panel",
    "ankle-boot",
    "knee-high-shaft",
    "high-top",
    "low-top",
    "platform-sole",
    "thick-sole",
    "thin-sole",
    "sandal-straps",
    "peep-hole",
    "visible-tongue",
    "toe-cap",
    "heel-counter",
    "perforated-upper",
    "visible-stitching",
    "ankle-strap",
    "t-bar-strap",
)

# Full 37-name annotation vocabulary: kept parts plus the dropped decoration names.
DEFAULT_VOCABULARY: tuple[str, ...] = _KEPT_ATTRIBUTES + DROPPED_ATTRIBUTES

N_ATTRIBUTES = len(_KEPT_ATTRIBUTES)


@dataclass(frozen=True)
class AttributeVector:
    """Binary flags over the kept attribute names."""

    flags: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self):
        flags = np.asarray(self.flags, dtype=np.float32)
        if flags.ndim != 1 or flags.shape[0] != len(self.names):
            raise ValueError("flags and names must have matching length")
        if not np.all((flags == 0.0) | (flags == 1.0)):
            raise ValueError("attribute flags must be binary")
        object.__setattr__(self, "flags", flags)

    def __len__(self) -> int:
        return self.flags.shape[0]


def encode_attributes(
    annotation: Mapping[str, int] | Iterable[str],
    vocabulary: tuple[str, ...] = DEFAULT_VOCABULARY,
    dropped: tuple[str, ...] = DROPPED_ATTRIBUTES,
) -> AttributeVector:
    """Encode a raw annotation into the kept-attribute flag vector.

    `annotation` is either a name -> 0/1 mapping (the attributes.json record
    format) or an iterable of present names. Names must come from the
    vocabulary; the dropped decoration names are accepted but never emitted.
    """
    if isinstance(annotation, Mapping):
        present = {name for name, flag in annotation.items() if int(flag) != 0}
        seen = set(annotation.keys())
    else:
        present = set(annotation)
        seen = set(present)
    vocab = set(vocabulary)
    unknown = seen - vocab
    if unknown:
        raise UnknownAttributeError(f"unknown attribute names: {sorted(unknown)}")
    kept = tuple(name for name in vocabulary if name not in dropped)
    flags = np.array([1.0 if name in present else 0.0 for name in kept], dtype=np.float32)
    return AttributeVector(flags=flags, names=kept)
