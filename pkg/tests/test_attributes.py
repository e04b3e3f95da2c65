import numpy as np
import pytest

from sketchinvert.data.attributes import (
    DEFAULT_VOCABULARY,
    DROPPED_ATTRIBUTES,
    AttributeVector,
    encode_attributes,
)
from sketchinvert.errors import UnknownAttributeError


def test_vocabulary_sizes():
    assert len(DEFAULT_VOCABULARY) == 37
    assert len(DROPPED_ATTRIBUTES) == 4
    assert set(DROPPED_ATTRIBUTES) == {"frontal", "lateral", "others", "no decoration"}


def test_full_annotation_drops_decoration_names():
    vec = encode_attributes(set(DEFAULT_VOCABULARY))
    assert len(vec) == 33
    assert not set(vec.names) & set(DROPPED_ATTRIBUTES)
    np.testing.assert_array_equal(vec.flags, np.ones(33, dtype=np.float32))


def test_empty_annotation_is_all_zero():
    vec = encode_attributes(set())
    assert len(vec) == 33
    assert vec.flags.sum() == 0


def test_only_dropped_attribute_is_all_zero():
    vec = encode_attributes({"frontal"})
    assert len(vec) == 33
    assert vec.flags.sum() == 0


def test_mapping_form():
    vec = encode_attributes({"laces": 1, "buckle": 0, "no decoration": 1})
    assert vec.flags[vec.names.index("laces")] == 1.0
    assert vec.flags[vec.names.index("buckle")] == 0.0


def test_unknown_name_raises():
    with pytest.raises(UnknownAttributeError):
        encode_attributes({"wings"})


def test_output_length_is_always_33():
    for annotation in (set(), {"laces"}, set(DEFAULT_VOCABULARY[:10])):
        assert len(encode_attributes(annotation)) == 33


def test_attribute_vector_validates_binary():
    with pytest.raises(ValueError):
        AttributeVector(flags=np.array([0.5]), names=("x",))
