"""Scikit-learn compatible wrappers over the feature and recognition cores.

These make the recognizer line up with the wider estimator ecosystem:
`MfccExtractor` is a stateless transformer from audio clips to feature
matrices, and `HmmWordRecognizer` is a classifier over clips backed by one
word model per class.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .frontend import FeatureMatrix, FrameSpec, MfccConfig, extract_mfcc
from .recognizer import Vocabulary, score_features, train_vocabulary
from .validation import check_clips, check_fitted, check_labels


class MfccExtractor(TransformerMixin, BaseEstimator):
    """Transform audio clips into cepstral feature matrices.

    Stateless: fit is a no-op kept for pipeline compatibility. transform
    returns one FeatureMatrix per clip (frame counts vary with clip length).
    """

    def __init__(self, frame_spec: Optional[FrameSpec] = None,
                 mfcc_config: Optional[MfccConfig] = None):
        self.frame_spec = frame_spec
        self.mfcc_config = mfcc_config

    def _resolved(self) -> tuple[FrameSpec, MfccConfig]:
        return (self.frame_spec or FrameSpec(), self.mfcc_config or MfccConfig())

    def fit(self, X, y=None):
        check_clips(X)
        return self

    def transform(self, X) -> list[FeatureMatrix]:
        spec, config = self._resolved()
        return [extract_mfcc(clip, spec, config) for clip in check_clips(X)]


class HmmWordRecognizer(ClassifierMixin, BaseEstimator):
    """Isolated-word classifier: one left-to-right word model per class.

    fit trains a model per distinct label; predict scores every model on a
    clip's features and returns the argmax label (ties by label). score()
    from ClassifierMixin reports plain accuracy.
    """

    def __init__(self, n_states: int = 5, n_iter: int = 10, seed: int = 42,
                 frame_spec: Optional[FrameSpec] = None,
                 mfcc_config: Optional[MfccConfig] = None):
        self.n_states = n_states
        self.n_iter = n_iter
        self.seed = seed
        self.frame_spec = frame_spec
        self.mfcc_config = mfcc_config

    def fit(self, X, y):
        clips = check_clips(X)
        labels = check_labels(y, len(clips))
        spec = self.frame_spec or FrameSpec()
        config = self.mfcc_config or MfccConfig()
        by_label: dict[str, list] = {}
        for clip, label in zip(clips, labels):
            by_label.setdefault(label, []).append(clip)
        self.vocabulary_ = train_vocabulary(by_label, self.n_states, self.n_iter,
                                            self.seed, spec, config)
        self.classes_ = np.array(self.vocabulary_.labels)
        return self

    def _features(self, X) -> list[FeatureMatrix]:
        spec = self.frame_spec or FrameSpec()
        config = self.mfcc_config or MfccConfig()
        return [extract_mfcc(clip, spec, config) for clip in check_clips(X)]

    def predict(self, X) -> np.ndarray:
        check_fitted(self, "vocabulary_")
        return np.array([score_features(f, self.vocabulary_).label
                         for f in self._features(X)])

    def decision_function(self, X) -> np.ndarray:
        """Per-class best-path log likelihoods, columns following classes_."""
        check_fitted(self, "vocabulary_")
        vocab: Vocabulary = self.vocabulary_
        rows = []
        for features in self._features(X):
            outcome = score_features(features, vocab)
            by_label = dict(outcome.ranked)
            rows.append([by_label[label] for label in self.classes_])
        return np.array(rows)
