"""Closed-vocabulary isolated-word recognition and its accuracy evaluation."""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .audio import AudioClip
from .errors import ConfigurationError, ModelError, ParameterError
from .frontend import FeatureMatrix, FrameSpec, MfccConfig, extract_mfcc
from .hmm import HmmModel, load_model, save_model, sequence_logprob, train_model


class Vocabulary:
    """A set of word models sharing one feature dimension."""

    def __init__(self, models: Iterable[HmmModel] = ()):
        self._models: dict[str, HmmModel] = {}
        for model in models:
            self.add(model)

    def add(self, model: HmmModel) -> None:
        if not model.label:
            raise ParameterError("vocabulary models need a non-empty label")
        if model.label in self._models:
            raise ParameterError(f"duplicate vocabulary label {model.label!r}")
        if self._models and model.dim != self.dim:
            raise ModelError(
                f"model {model.label!r} has dimension {model.dim}, vocabulary uses {self.dim}")
        self._models[model.label] = model

    def __len__(self) -> int:
        return len(self._models)

    def __contains__(self, label: str) -> bool:
        return label in self._models

    def __getitem__(self, label: str) -> HmmModel:
        return self._models[label]

    @property
    def labels(self) -> list[str]:
        return sorted(self._models)

    @property
    def dim(self) -> int:
        if not self._models:
            raise ConfigurationError("empty vocabulary has no dimension")
        return next(iter(self._models.values())).dim

    def items(self):
        return ((label, self._models[label]) for label in self.labels)


@dataclass(frozen=True)
class RecognitionOutcome:
    """Winning word plus every model's score, best first (ties by label)."""

    label: str
    log_prob: float
    ranked: tuple

    def __post_init__(self):
        if not self.ranked or self.ranked[0][0] != self.label:
            raise ParameterError("outcome label must head the ranked list")


@dataclass
class EvalReport:
    """Recognition counts; accuracy is kept at full precision until display."""

    total: int
    correct: int
    confusion: dict = field(default_factory=dict)

    @property
    def accuracy_percent(self) -> float:
        return 100.0 * self.correct / self.total if self.total else 0.0

    def to_json(self) -> str:
        return json.dumps({"total": self.total, "correct": self.correct,
                           "accuracy_percent": self.accuracy_percent})

    def render_table(self) -> str:
        labels = sorted(set(self.confusion) | {p for row in self.confusion.values() for p in row})
        width = max([len(s) for s in labels] + [5])
        header = " " * (width + 2) + " ".join(f"{p:>{width}}" for p in labels)
        lines = [header]
        for truth in labels:
            row = self.confusion.get(truth, {})
            cells = " ".join(f"{row.get(p, 0):>{width}}" for p in labels)
            lines.append(f"{truth:<{width}}  {cells}")
        lines.append(f"accuracy: {self.correct}/{self.total} = {self.accuracy_percent:.2f}%")
        return "\n".join(lines)


def score_features(features: FeatureMatrix, vocab: Vocabulary) -> RecognitionOutcome:
    if len(vocab) == 0:
        raise ConfigurationError("cannot recognize with an empty vocabulary")
    scores = [(label, sequence_logprob(features, model)) for label, model in vocab.items()]
    ranked = tuple(sorted(scores, key=lambda item: (-item[1], item[0])))
    return RecognitionOutcome(label=ranked[0][0], log_prob=ranked[0][1], ranked=ranked)


def recognize(clip: AudioClip, vocab: Vocabulary,
              frame_spec: FrameSpec = FrameSpec(),
              config: MfccConfig = MfccConfig()) -> RecognitionOutcome:
    """Extract features once and return the best-scoring vocabulary word."""
    if len(vocab) == 0:
        raise ConfigurationError("cannot recognize with an empty vocabulary")
    return score_features(extract_mfcc(clip, frame_spec, config), vocab)


def evaluate(testset: Sequence[tuple[str, AudioClip]], vocab: Vocabulary,
             frame_spec: FrameSpec = FrameSpec(),
             config: MfccConfig = MfccConfig()) -> EvalReport:
    """Word accuracy over labeled clips: 100 * correct / total."""
    if not testset:
        raise ParameterError("test set must be non-empty")
    confusion: dict[str, Counter] = {}
    correct = 0
    for truth, clip in testset:
        predicted = recognize(clip, vocab, frame_spec, config).label
        confusion.setdefault(truth, Counter())[predicted] += 1
        if predicted == truth:
            correct += 1
    plain = {k: dict(v) for k, v in confusion.items()}
    return EvalReport(total=len(testset), correct=correct, confusion=plain)


def train_vocabulary(clips_by_label: Mapping[str, Sequence[AudioClip]],
                     num_states: int = 5, iterations: int = 10, seed: int = 42,
                     frame_spec: FrameSpec = FrameSpec(),
                     config: MfccConfig = MfccConfig()) -> Vocabulary:
    """Train one word model per label from its clips."""
    vocab = Vocabulary()
    for label in sorted(clips_by_label):
        features = [extract_mfcc(c, frame_spec, config) for c in clips_by_label[label]]
        vocab.add(train_model(features, num_states, iterations, seed, label=label))
    return vocab


def save_vocabulary(vocab: Vocabulary, directory: "str | os.PathLike") -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for label, model in vocab.items():
        path = os.path.join(os.fspath(directory), f"{label}.hmm")
        save_model(model, path)
        paths.append(path)
    return paths


def load_vocabulary(directory: "str | os.PathLike") -> Vocabulary:
    names = sorted(n for n in os.listdir(directory) if n.endswith(".hmm"))
    if not names:
        raise ConfigurationError(f"no .hmm model files in {directory}")
    return Vocabulary(load_model(os.path.join(os.fspath(directory), n)) for n in names)
