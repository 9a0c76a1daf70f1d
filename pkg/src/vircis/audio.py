"""Audio I/O and synthesis: RIFF/WAVE PCM-16 parsing, tone-word fixtures, silence splitting.

Samples are stored as float64 in [-1, 1]; 16-bit integers map to amplitude
via division by 32768, so -32768 reads back as exactly -1.0.
"""

from __future__ import annotations

import io
import os
import re
import struct
from dataclasses import dataclass
from typing import BinaryIO, Optional, Sequence

import numpy as np

from .errors import AudioFormatError, ParameterError, UnsupportedAudioError

PCM_SCALE = 32768.0

_LABEL_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


@dataclass(frozen=True)
class AudioClip:
    """A mono waveform with its sample rate and an optional word label.

    The unit-range convention (samples in [-1, 1]) is enforced wherever a
    clip crosses an I/O boundary (`load_wav`, `save_wav`, synthesis); the
    constructor itself only checks structure so that intermediate signals
    such as pre-emphasis output, which can exceed unit range, remain
    representable.
    """

    samples: np.ndarray
    sample_rate: int
    label: Optional[str] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ParameterError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size < 1:
            raise ParameterError("a clip must contain at least one sample")
        if not np.all(np.isfinite(samples)):
            raise ParameterError("samples must be finite")
        if not isinstance(self.sample_rate, (int, np.integer)) or self.sample_rate <= 0:
            raise ParameterError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate

    def scaled(self, gain: float) -> "AudioClip":
        return AudioClip(self.samples * gain, self.sample_rate, self.label)


def check_unit_range(samples: np.ndarray) -> None:
    peak = np.max(np.abs(samples)) if samples.size else 0.0
    if peak > 1.0:
        raise ParameterError(f"samples exceed [-1, 1] (peak {peak:.6g})")


def _read_exact(stream: BinaryIO, n: int, what: str) -> bytes:
    data = stream.read(n)
    if len(data) != n:
        raise AudioFormatError(f"truncated file while reading {what}")
    return data


def load_wav(source: "str | os.PathLike | BinaryIO") -> AudioClip:
    """Read a PCM-16 RIFF/WAVE file (mono or stereo) into an AudioClip.

    Stereo input is downmixed by averaging the two channels. Raises
    AudioFormatError for malformed containers and UnsupportedAudioError
    for valid WAV files using a codec or layout we do not handle.
    """
    if hasattr(source, "read"):
        return _load_wav_stream(source)  # type: ignore[arg-type]
    with open(source, "rb") as fh:
        return _load_wav_stream(fh)


def _load_wav_stream(stream: BinaryIO) -> AudioClip:
    riff = _read_exact(stream, 12, "RIFF header")
    if riff[0:4] != b"RIFF" or riff[8:12] != b"WAVE":
        raise AudioFormatError("not a RIFF/WAVE file")

    fmt = None
    data = None
    while True:
        head = stream.read(8)
        if len(head) == 0:
            break
        if len(head) != 8:
            raise AudioFormatError("truncated chunk header")
        chunk_id, size = struct.unpack("<4sI", head)
        if chunk_id == b"fmt ":
            if size < 16:
                raise AudioFormatError("fmt chunk too small")
            fmt = struct.unpack("<HHIIHH", _read_exact(stream, 16, "fmt chunk")[:16])
            if size > 16:
                stream.read(size - 16)
        elif chunk_id == b"data":
            data = _read_exact(stream, size, "data chunk")
        else:
            stream.read(size)
        if size % 2 == 1:  # chunks are word-aligned
            stream.read(1)

    if fmt is None:
        raise AudioFormatError("missing fmt chunk")
    if data is None:
        raise AudioFormatError("missing data chunk")

    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1:
        raise UnsupportedAudioError(f"only PCM is supported (format tag {audio_format})")
    if bits != 16:
        raise UnsupportedAudioError(f"only 16-bit samples are supported (got {bits})")
    if channels not in (1, 2):
        raise UnsupportedAudioError(f"only mono or stereo is supported (got {channels} channels)")
    if len(data) % (2 * channels) != 0:
        raise AudioFormatError("data chunk size is not a whole number of frames")
    if len(data) == 0:
        raise AudioFormatError("data chunk contains no samples")

    raw = np.frombuffer(data, dtype="<i2").astype(np.float64) / PCM_SCALE
    if channels == 2:
        raw = (raw[0::2] + raw[1::2]) / 2.0
    return AudioClip(raw, sample_rate)


def save_wav(clip: AudioClip, target: "str | os.PathLike | BinaryIO") -> None:
    """Write a mono PCM-16 WAV file; inverse of load_wav up to 1 LSB."""
    check_unit_range(clip.samples)
    quantized = np.clip(np.rint(clip.samples * PCM_SCALE), -32768, 32767).astype("<i2")
    payload = quantized.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, 1, 1,
        clip.sample_rate,
        clip.sample_rate * 2,  # byte rate = rate * block align (mono 16-bit)
        2, 16,
        b"data", len(payload),
    )
    if hasattr(target, "write"):
        target.write(header + payload)  # type: ignore[union-attr]
    else:
        with open(target, "wb") as fh:
            fh.write(header + payload)


def wav_bytes(clip: AudioClip) -> bytes:
    buf = io.BytesIO()
    save_wav(clip, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Synthetic tone words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ToneWord:
    """A synthetic vocabulary word rendered as a sequence of pure tones."""

    label: str
    segments: tuple  # of (freq_hz, duration_ms)

    def __post_init__(self):
        if not _LABEL_RE.match(self.label):
            raise ParameterError(f"bad word label {self.label!r}")
        if not self.segments:
            raise ParameterError("a tone word needs at least one segment")
        for freq, dur in self.segments:
            if freq <= 0 or dur <= 0:
                raise ParameterError("tone segments need positive frequency and duration")


def synth_tone(freq_hz: float, duration_ms: float, sample_rate: int,
               amplitude: float = 0.35, phase: float = 0.0) -> np.ndarray:
    n = max(1, int(round(duration_ms * sample_rate / 1000.0)))
    t = np.arange(n, dtype=np.float64)
    return amplitude * np.sin(phase + 2.0 * np.pi * freq_hz * t / sample_rate)


def render_tone_word(word: ToneWord, sample_rate: int = 16000, *,
                     amplitude: float = 0.35,
                     rng: Optional[np.random.Generator] = None,
                     noise_sigma: float = 0.0,
                     freq_jitter: float = 0.0,
                     duration_jitter: float = 0.0,
                     pad_ms: float = 50.0) -> AudioClip:
    """Render one clip of a tone word, optionally with seeded variation.

    Phase is kept continuous across segments. Jitter fractions perturb each
    segment's frequency and duration; Gaussian noise is added over the whole
    clip including the silence padding, then the result is clipped to keep
    the unit-range contract.
    """
    if amplitude <= 0 or amplitude > 0.9:
        raise ParameterError("amplitude must be in (0, 0.9] to leave noise headroom")
    pieces = []
    phase = 0.0
    for freq, dur in word.segments:
        if rng is not None and freq_jitter > 0:
            freq = freq * (1.0 + rng.uniform(-freq_jitter, freq_jitter))
        if rng is not None and duration_jitter > 0:
            dur = dur * (1.0 + rng.uniform(-duration_jitter, duration_jitter))
        seg = synth_tone(freq, dur, sample_rate, amplitude, phase)
        phase += 2.0 * np.pi * freq * seg.size / sample_rate
        pieces.append(seg)
    pad = np.zeros(int(round(pad_ms * sample_rate / 1000.0)))
    samples = np.concatenate([pad] + pieces + [pad])
    if rng is not None and noise_sigma > 0:
        samples = samples + rng.normal(0.0, noise_sigma, samples.size)
    samples = np.clip(samples, -1.0, 1.0)
    return AudioClip(samples, sample_rate, word.label)


def load_tone_vocab(path: "str | os.PathLike") -> list[ToneWord]:
    """Parse a tone-word vocabulary file.

    One word per line: ``label freq[:ms] freq[:ms] ...``; the per-segment
    duration defaults to 150 ms. Blank lines and ``#`` comments are skipped.
    """
    words = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ParameterError(f"{path}:{lineno}: expected 'label freq[:ms] ...'")
            segments = []
            for token in parts[1:]:
                freq_s, _, ms_s = token.partition(":")
                try:
                    freq = float(freq_s)
                    dur = float(ms_s) if ms_s else 150.0
                except ValueError as exc:
                    raise ParameterError(f"{path}:{lineno}: bad tone segment {token!r}") from exc
                segments.append((freq, dur))
            words.append(ToneWord(parts[0], tuple(segments)))
    if not words:
        raise ParameterError(f"{path}: vocabulary file defines no words")
    return words


def synth_dataset(words: Sequence[ToneWord], out_dir: "str | os.PathLike", *,
                  train_count: int = 10, test_count: int = 10, seed: int = 42,
                  sample_rate: int = 16000, amplitude: float = 0.35,
                  noise_sigma: float = 0.005) -> tuple[str, str]:
    """Write seeded train/test clips plus manifests; returns the manifest paths.

    Manifest lines are ``label<TAB>wav-path`` with paths relative to the
    manifest's directory.
    """
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)
    manifests = {}
    for split, count in (("train", train_count), ("test", test_count)):
        lines = []
        for word in words:
            for i in range(count):
                clip = render_tone_word(
                    word, sample_rate, amplitude=amplitude * (1.0 + rng.uniform(-0.25, 0.25)),
                    rng=rng, noise_sigma=noise_sigma,
                    freq_jitter=0.02, duration_jitter=0.1,
                    pad_ms=rng.uniform(40.0, 80.0),
                )
                name = f"{word.label}_{split}_{i:02d}.wav"
                save_wav(clip, os.path.join(out_dir, name))
                lines.append(f"{word.label}\t{name}")
        manifest_path = os.path.join(out_dir, f"{split}.tsv")
        with open(manifest_path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        manifests[split] = manifest_path
    return manifests["train"], manifests["test"]


def read_manifest(path: "str | os.PathLike") -> list[tuple[str, str]]:
    """Read ``label<TAB>wav-path`` lines; relative paths resolve against the manifest."""
    base = os.path.dirname(os.path.abspath(os.fspath(path)))
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            label, sep, wav = line.partition("\t")
            if not sep or not label or not wav:
                raise ParameterError(f"{path}:{lineno}: expected 'label<TAB>wav-path'")
            if not os.path.isabs(wav):
                wav = os.path.join(base, wav)
            entries.append((label, wav))
    return entries


# ---------------------------------------------------------------------------
# Silence segmentation (used to turn multi-word clips into word clips)
# ---------------------------------------------------------------------------

def split_on_silence(clip: AudioClip, *, threshold: float = 0.01,
                     min_silence_ms: float = 200.0,
                     window_ms: float = 10.0) -> list[AudioClip]:
    """Split a clip into voiced segments separated by long quiet runs.

    A window is quiet when its RMS falls below `threshold`; quiet runs of at
    least `min_silence_ms` separate segments, shorter dips are kept inside a
    segment. Returns the voiced segments in order (possibly empty).
    """
    if threshold <= 0:
        raise ParameterError("threshold must be positive")
    win = max(1, int(round(window_ms * clip.sample_rate / 1000.0)))
    n_win = (clip.samples.size + win - 1) // win
    rms = np.empty(n_win)
    for i in range(n_win):
        chunk = clip.samples[i * win:(i + 1) * win]
        rms[i] = np.sqrt(np.mean(chunk * chunk))
    quiet = rms < threshold
    min_gap = max(1, int(round(min_silence_ms / window_ms)))

    segments = []
    start = None
    gap = 0
    for i, q in enumerate(quiet):
        if not q:
            if start is None:
                start = i
            gap = 0
        elif start is not None:
            gap += 1
            if gap >= min_gap:
                segments.append((start, i - gap + 1))
                start = None
                gap = 0
    if start is not None:
        end = len(quiet)
        while end > start and quiet[end - 1]:
            end -= 1
        segments.append((start, end))

    clips = []
    for a, b in segments:
        samples = clip.samples[a * win:min(b * win, clip.samples.size)]
        if samples.size:
            clips.append(AudioClip(samples, clip.sample_rate))
    return clips
