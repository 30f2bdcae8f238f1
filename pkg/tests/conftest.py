"""Shared fixtures: a small rendered corpus and a model trained on it.

Session-scoped because rendering and extraction dominate suite runtime;
everything derived from them is deterministic, so sharing is safe.
"""

import numpy as np
import pytest

from ddmd.cli import cmd_train, extract_batch, scan_corpus, write_feature_csv
from ddmd.synth import render_corpus


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus-small")
    render_corpus(root, n_per_class=16, seed=2024)
    return root


@pytest.fixture(scope="session")
def small_features_csv(small_corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("features-small") / "features.csv"
    store = extract_batch(scan_corpus(small_corpus), workers=2)
    write_feature_csv(store, out)
    return out


@pytest.fixture(scope="session")
def small_model(small_features_csv, tmp_path_factory):
    path = tmp_path_factory.mktemp("model-small") / "model.json"
    assert cmd_train(small_features_csv, path, trees=30, seed=7) == 0
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
