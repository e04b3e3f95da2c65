import numpy as np
import pytest
import torch

from sketchinvert.data import make_toy_dataset, merge_unpaired


@pytest.fixture(scope="session")
def toy_splits():
    return make_toy_dataset(seed=7, n_instances=20, size=32)


@pytest.fixture(scope="session")
def toy_sketch_split(toy_splits):
    return toy_splits[0]


@pytest.fixture(scope="session")
def toy_contour_split(toy_splits):
    return toy_splits[1]


@pytest.fixture(scope="session")
def toy_unpaired(toy_splits):
    return merge_unpaired(*toy_splits)


@pytest.fixture(scope="session")
def tiny_style_model():
    """Untrained toy translation model with fixed init."""
    from sketchinvert.styletransfer import build_style_model, toy_style_config

    model = build_style_model(toy_style_config(32), init_seed=11)
    model.eval()
    return model


@pytest.fixture(scope="session")
def tiny_sbir_model():
    from sketchinvert.fgsbir import SbirModel, toy_sbir_config

    torch.manual_seed(13)
    model = SbirModel(toy_sbir_config(32))
    model.eval()
    return model


@pytest.fixture(scope="session")
def briefly_trained_models(toy_sketch_split, toy_unpaired):
    """Style + SBIR models trained a handful of iterations: cheap but real."""
    from sketchinvert.styletransfer import (
        StyleTrainConfig,
        build_style_model,
        toy_style_config,
        train_style,
    )
    from sketchinvert.fgsbir import SbirModel, SbirTrainConfig, toy_sbir_config, train_sbir

    style = build_style_model(toy_style_config(32), init_seed=1)
    style, _ = train_style(
        style, toy_unpaired, StyleTrainConfig(batch_size=4, iterations=8), rng_seed=3
    )
    torch.manual_seed(0)
    sbir = SbirModel(toy_sbir_config(32))
    sbir, _ = train_sbir(
        sbir,
        toy_sketch_split,
        style,
        SbirTrainConfig(batch_size=8, iterations=8, lambda_decorr=1e-6),
        rng_seed=5,
    )
    return style, sbir
