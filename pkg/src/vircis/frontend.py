"""Cepstral feature extraction: framing, mel filterbank, DCT, deltas.

The pipeline per frame: pre-emphasis, window, one-sided power spectrum
|X[k]|^2 / fft_size, triangular mel filterbank on mel(f) = 2595*log10(1+f/700),
natural log with a 1e-10 floor, orthonormal DCT-II, optional log-energy in
place of c0, and +/-2-frame regression deltas.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import BinaryIO, Optional

import numpy as np
from scipy.fft import dct

from .audio import AudioClip
from .errors import InputTooShortError, ParameterError

LOG_FLOOR = 1e-10
DELTA_WINDOW = 2

WINDOW_KINDS = ("hamming", "rectangular")


@dataclass(frozen=True)
class FrameSpec:
    """Short-time analysis parameters."""

    frame_length_ms: float = 25.0
    hop_ms: float = 10.0
    preemphasis_alpha: float = 0.97
    window: str = "hamming"

    def __post_init__(self):
        if not 0 < self.hop_ms <= self.frame_length_ms:
            raise ParameterError(
                f"need 0 < hop_ms <= frame_length_ms, got hop={self.hop_ms}, frame={self.frame_length_ms}")
        if not 0.0 <= self.preemphasis_alpha < 1.0:
            raise ParameterError(f"preemphasis_alpha must be in [0, 1), got {self.preemphasis_alpha}")
        if self.window not in WINDOW_KINDS:
            raise ParameterError(f"window must be one of {WINDOW_KINDS}, got {self.window!r}")

    def frame_length(self, sample_rate: int) -> int:
        return int(round(self.frame_length_ms * sample_rate / 1000.0))

    def hop(self, sample_rate: int) -> int:
        return int(round(self.hop_ms * sample_rate / 1000.0))


@dataclass(frozen=True)
class MfccConfig:
    """Free parameters of the cepstral pipeline; defaults give 13x3 = 39 dims."""

    num_mel_filters: int = 26
    num_cepstra: int = 13
    include_energy: bool = False
    include_deltas: bool = True
    include_delta_deltas: bool = True
    fft_size: int = 512
    low_freq_hz: float = 0.0
    high_freq_hz: float = 8000.0

    def __post_init__(self):
        if self.num_mel_filters < 1 or self.num_cepstra < 1:
            raise ParameterError("filter and cepstrum counts must be positive")
        if self.num_cepstra > self.num_mel_filters:
            raise ParameterError(
                f"num_cepstra ({self.num_cepstra}) cannot exceed num_mel_filters ({self.num_mel_filters})")
        if self.fft_size < 2 or self.fft_size & (self.fft_size - 1):
            raise ParameterError(f"fft_size must be a power of two, got {self.fft_size}")
        if self.low_freq_hz < 0 or self.low_freq_hz >= self.high_freq_hz:
            raise ParameterError("need 0 <= low_freq_hz < high_freq_hz")
        if self.include_delta_deltas and not self.include_deltas:
            raise ParameterError("delta-deltas require deltas")

    @property
    def n_features(self) -> int:
        return self.num_cepstra * (1 + int(self.include_deltas) + int(self.include_delta_deltas))


@dataclass(frozen=True)
class FeatureMatrix:
    """T x D matrix of per-frame coefficients plus the settings that produced it."""

    frames: np.ndarray
    frame_spec: Optional[FrameSpec] = None
    config: Optional[MfccConfig] = None

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ParameterError(f"frames must be a T x D matrix with T, D >= 1, got {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise ParameterError("feature matrix contains non-finite entries")
        if self.config is not None and frames.shape[1] != self.config.n_features:
            raise ParameterError(
                f"feature dimension {frames.shape[1]} does not match configured {self.config.n_features}")
        object.__setattr__(self, "frames", frames)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


def preemphasize(clip: AudioClip, alpha: float) -> AudioClip:
    """First-order high-pass: out[n] = in[n] - alpha*in[n-1], out[0] = in[0]."""
    if not 0.0 <= alpha < 1.0:
        raise ParameterError(f"alpha must be in [0, 1), got {alpha}")
    return AudioClip(_preemphasis(clip.samples, alpha), clip.sample_rate, clip.label)


def _preemphasis(samples: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 0.0:
        return samples.copy()
    return np.concatenate([samples[:1], samples[1:] - alpha * samples[:-1]])


def window_weights(kind: str, length: int) -> np.ndarray:
    if kind == "rectangular":
        return np.ones(length)
    if length == 1:
        return np.ones(1)
    n = np.arange(length)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (length - 1))


def frame_signal(clip: AudioClip, spec: FrameSpec) -> np.ndarray:
    """Cut the clip into windowed frames of shape (T, frame_length).

    Frames start at multiples of the hop; T = max(1, floor(len/hop)) so the
    final partial frame is zero-padded instead of dropped and even a very
    short clip yields one frame.
    """
    samples = _preemphasis(clip.samples, spec.preemphasis_alpha)
    return _frame_array(samples, clip.sample_rate, spec)


def _frame_array(samples: np.ndarray, sample_rate: int, spec: FrameSpec,
                 windowed: bool = True) -> np.ndarray:
    length = spec.frame_length(sample_rate)
    hop = spec.hop(sample_rate)
    if length < 1 or hop < 1:
        raise ParameterError("frame and hop must span at least one sample at this rate")
    if samples.size < 1:
        raise InputTooShortError("no samples to frame")
    num_frames = max(1, samples.size // hop)
    frames = np.zeros((num_frames, length))
    for t in range(num_frames):
        chunk = samples[t * hop:t * hop + length]
        frames[t, :chunk.size] = chunk
    if windowed:
        frames = frames * window_weights(spec.window, length)
    return frames


def power_spectrum(frame: np.ndarray, fft_size: int) -> np.ndarray:
    """One-sided power spectrum |X[k]|^2 / fft_size, k = 0..fft_size/2."""
    if frame.size > fft_size:
        raise ParameterError(f"frame of {frame.size} samples does not fit a {fft_size}-point DFT")
    spectrum = np.fft.rfft(frame, n=fft_size)
    return (spectrum.real ** 2 + spectrum.imag ** 2) / fft_size


def hz_to_mel(freq_hz):
    return 2595.0 * np.log10(1.0 + np.asarray(freq_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filter_centers(config: MfccConfig) -> np.ndarray:
    pts = np.linspace(hz_to_mel(config.low_freq_hz), hz_to_mel(config.high_freq_hz),
                      config.num_mel_filters + 2)
    return mel_to_hz(pts)[1:-1]


def mel_filterbank(config: MfccConfig, sample_rate: int) -> np.ndarray:
    """Triangular filters, one row per filter over the one-sided spectrum bins.

    Filter m rises linearly from edge m to its center and falls to edge m+2,
    the edges being uniformly spaced on the mel scale. Peak weight is 1.
    """
    if config.high_freq_hz > sample_rate / 2.0:
        raise ParameterError(
            f"high_freq_hz {config.high_freq_hz} exceeds Nyquist {sample_rate / 2.0}")
    pts = np.linspace(hz_to_mel(config.low_freq_hz), hz_to_mel(config.high_freq_hz),
                      config.num_mel_filters + 2)
    edges = mel_to_hz(pts)
    bin_freqs = np.arange(config.fft_size // 2 + 1) * (sample_rate / config.fft_size)
    bank = np.zeros((config.num_mel_filters, bin_freqs.size))
    for m in range(config.num_mel_filters):
        left, center, right = edges[m], edges[m + 1], edges[m + 2]
        rising = (bin_freqs - left) / (center - left)
        falling = (right - bin_freqs) / (right - center)
        bank[m] = np.maximum(0.0, np.minimum(rising, falling))
    return bank


def delta_features(coeffs: np.ndarray, window: int = DELTA_WINDOW) -> np.ndarray:
    """Regression slope over +/-window frames with edge replication."""
    num_frames = coeffs.shape[0]
    denom = 2.0 * sum(n * n for n in range(1, window + 1))
    padded = np.concatenate([coeffs[:1].repeat(window, axis=0),
                             coeffs,
                             coeffs[-1:].repeat(window, axis=0)])
    out = np.zeros_like(coeffs)
    for n in range(1, window + 1):
        out += n * (padded[window + n:window + n + num_frames]
                    - padded[window - n:window - n + num_frames])
    return out / denom


def extract_mfcc(clip: AudioClip, spec: FrameSpec = FrameSpec(),
                 config: MfccConfig = MfccConfig()) -> FeatureMatrix:
    """Run the full cepstral pipeline on one clip."""
    length = spec.frame_length(clip.sample_rate)
    if config.fft_size < length:
        raise ParameterError(
            f"fft_size {config.fft_size} smaller than the {length}-sample frame")
    bank = mel_filterbank(config, clip.sample_rate)

    emphasized = _preemphasis(clip.samples, spec.preemphasis_alpha)
    raw_frames = _frame_array(emphasized, clip.sample_rate, spec, windowed=False)
    frames = raw_frames * window_weights(spec.window, length)

    spectra = np.fft.rfft(frames, n=config.fft_size, axis=1)
    power = (spectra.real ** 2 + spectra.imag ** 2) / config.fft_size
    energies = power @ bank.T
    log_energies = np.log(np.maximum(energies, LOG_FLOOR))
    cepstra = dct(log_energies, type=2, norm="ortho", axis=1)[:, :config.num_cepstra]

    if config.include_energy:
        frame_energy = np.sum(raw_frames * raw_frames, axis=1)
        cepstra[:, 0] = np.log(np.maximum(frame_energy, LOG_FLOOR))

    blocks = [cepstra]
    if config.include_deltas:
        deltas = delta_features(cepstra)
        blocks.append(deltas)
        if config.include_delta_deltas:
            blocks.append(delta_features(deltas))
    return FeatureMatrix(np.hstack(blocks), spec, config)


def log_filter_energies(clip: AudioClip, spec: FrameSpec = FrameSpec(),
                        config: MfccConfig = MfccConfig()) -> np.ndarray:
    """Floored log mel-filter energies per frame (the pre-DCT stage)."""
    bank = mel_filterbank(config, clip.sample_rate)
    frames = frame_signal(clip, spec)
    spectra = np.fft.rfft(frames, n=config.fft_size, axis=1)
    power = (spectra.real ** 2 + spectra.imag ** 2) / config.fft_size
    return np.log(np.maximum(power @ bank.T, LOG_FLOOR))


# ---------------------------------------------------------------------------
# Text serialization: "mfcc T D" header then one row of floats per frame
# ---------------------------------------------------------------------------

def save_features(features: FeatureMatrix, target: "str | os.PathLike | BinaryIO") -> None:
    lines = [f"mfcc {features.num_frames} {features.dim}"]
    for row in features.frames:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text.encode("ascii"))  # type: ignore[union-attr]
    else:
        with open(target, "w", encoding="ascii") as fh:
            fh.write(text)


def load_features(source: "str | os.PathLike | BinaryIO") -> FeatureMatrix:
    if hasattr(source, "read"):
        text = source.read().decode("ascii")  # type: ignore[union-attr]
    else:
        with open(source, "r", encoding="ascii") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParameterError("empty feature file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "mfcc":
        raise ParameterError(f"bad feature header {lines[0]!r}")
    num_frames, dim = int(head[1]), int(head[2])
    if len(lines) - 1 != num_frames:
        raise ParameterError(f"expected {num_frames} rows, found {len(lines) - 1}")
    rows = np.array([[float(v) for v in ln.split()] for ln in lines[1:]], dtype=np.float64)
    if rows.shape != (num_frames, dim):
        raise ParameterError("row width does not match header dimension")
    return FeatureMatrix(rows)
