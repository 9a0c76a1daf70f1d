"""Input validation helpers shared by the estimator-style interfaces."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .audio import AudioClip
from .errors import ParameterError


def check_clips(X) -> list[AudioClip]:
    """Validate a collection of AudioClips sharing one sample rate."""
    clips = list(X)
    if not clips:
        raise ParameterError("expected at least one clip")
    for i, clip in enumerate(clips):
        if not isinstance(clip, AudioClip):
            raise ParameterError(f"item {i} is {type(clip).__name__}, expected AudioClip")
    rates = {c.sample_rate for c in clips}
    if len(rates) != 1:
        raise ParameterError(f"clips mix sample rates {sorted(rates)}")
    return clips


def check_labels(y, n: int) -> list[str]:
    labels = ["" if v is None else str(v) for v in y]
    if len(labels) != n:
        raise ParameterError(f"got {len(labels)} labels for {n} clips")
    if any(not v for v in labels):
        raise ParameterError("labels must be non-empty strings")
    return labels


def check_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise ParameterError(
            f"{type(estimator).__name__} is not fitted; call fit() first")


def as_float_array(values: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} must be finite")
    return arr
