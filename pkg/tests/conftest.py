import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from vircis import (FrameSpec, MfccConfig, ToneWord, load_wav, read_manifest,
                    synth_dataset, train_vocabulary)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

# Lighter than the 39-dim default; keeps model training in the unit tests fast.
FAST_SPEC = FrameSpec()
FAST_CONFIG = MfccConfig(include_deltas=False, include_delta_deltas=False)

TONE_WORDS = [
    ToneWord("low", ((300.0, 300.0),)),
    ToneWord("high", ((2000.0, 300.0),)),
    ToneWord("rise", ((350.0, 150.0), (700.0, 150.0))),
    ToneWord("fall", ((700.0, 150.0), (350.0, 150.0))),
]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def tone_dataset(tmp_path_factory):
    """Seeded 4-word corpus: 10 train + 10 held-out clips per word."""
    root = tmp_path_factory.mktemp("tones")
    train_manifest, test_manifest = synth_dataset(
        TONE_WORDS, root, train_count=10, test_count=10, seed=42)
    train = [(label, load_wav(path)) for label, path in read_manifest(train_manifest)]
    test = [(label, load_wav(path)) for label, path in read_manifest(test_manifest)]
    return {"dir": str(root), "train_manifest": train_manifest,
            "test_manifest": test_manifest, "train": train, "test": test}


@pytest.fixture(scope="session")
def tone_vocabulary(tone_dataset):
    grouped = {}
    for label, clip in tone_dataset["train"]:
        grouped.setdefault(label, []).append(clip)
    return train_vocabulary(grouped, num_states=5, iterations=10, seed=42,
                            frame_spec=FAST_SPEC, config=FAST_CONFIG)


@pytest.fixture
def fixture_corpus_dir():
    return os.path.join(FIXTURES, "corpus")


@pytest.fixture
def replay_script_path():
    return os.path.join(FIXTURES, "replay_script.txt")
