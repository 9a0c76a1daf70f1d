import io
import struct

import numpy as np
import pytest

from vircis import (AudioClip, AudioFormatError, ParameterError, ToneWord,
                    UnsupportedAudioError, load_tone_vocab, load_wav,
                    read_manifest, render_tone_word, save_wav,
                    split_on_silence, synth_dataset, synth_tone, wav_bytes)
from helpers import tone_clip


def _pcm16_wav(samples, rate=16000, channels=1, fmt=1, bits=16):
    payload = struct.pack(f"<{len(samples)}h", *samples)
    return struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, fmt, channels, rate,
        rate * channels * bits // 8, channels * bits // 8, bits,
        b"data", len(payload)) + payload


class TestLoadWav:
    def test_silence_second(self, tmp_path):
        path = tmp_path / "sil.wav"
        save_wav(AudioClip(np.zeros(16000), 16000), path)
        clip = load_wav(path)
        assert clip.sample_rate == 16000
        assert clip.samples.size == 16000
        assert np.all(clip.samples == 0.0)

    def test_scale_endpoint(self):
        clip = load_wav(io.BytesIO(_pcm16_wav([-32768, 32767])))
        assert clip.samples[0] == -1.0
        assert clip.samples[1] == 32767 / 32768

    def test_tone_roundtrip_bit_exact(self):
        tone = AudioClip(synth_tone(440, 500, 16000), 16000)
        raw = wav_bytes(tone)
        assert wav_bytes(load_wav(io.BytesIO(raw))) == raw

    def test_stereo_downmix(self):
        # L=1000, R=3000 interleaved -> mean 2000/32768
        clip = load_wav(io.BytesIO(_pcm16_wav([1000, 3000, -2000, 2000], channels=2)))
        assert np.allclose(clip.samples, [2000 / 32768, 0.0])

    def test_malformed_header(self):
        with pytest.raises(AudioFormatError):
            load_wav(io.BytesIO(b"RIFX" + b"\x00" * 40))

    def test_truncated(self):
        raw = _pcm16_wav([1, 2, 3])
        with pytest.raises(AudioFormatError):
            load_wav(io.BytesIO(raw[:-2]))

    def test_non_pcm_codec(self):
        with pytest.raises(UnsupportedAudioError):
            load_wav(io.BytesIO(_pcm16_wav([0, 0], fmt=3)))

    def test_wrong_bit_depth(self):
        raw = _pcm16_wav([0, 0], bits=8)
        with pytest.raises(UnsupportedAudioError):
            load_wav(io.BytesIO(raw))


class TestSaveWav:
    def test_small_clip_roundtrip(self, tmp_path):
        path = tmp_path / "c.wav"
        save_wav(AudioClip(np.array([0.0, 0.5, -0.5]), 8000), path)
        clip = load_wav(path)
        assert np.array_equal(clip.samples, [0.0, 0.5, -0.5])

    def test_empty_rejected(self):
        with pytest.raises(ParameterError):
            AudioClip(np.array([]), 16000)

    def test_header_byte_rate(self):
        raw = wav_bytes(AudioClip(synth_tone(440, 100, 22050), 22050))
        byte_rate = struct.unpack_from("<I", raw, 28)[0]
        assert byte_rate == 22050 * 2

    def test_roundtrip_within_one_lsb(self, rng):
        samples = rng.uniform(-1, 1, 512)
        buf = io.BytesIO()
        save_wav(AudioClip(samples, 16000), buf)
        buf.seek(0)
        back = load_wav(buf)
        assert np.max(np.abs(back.samples - samples)) <= 1.0 / 32768

    def test_out_of_range_rejected(self):
        clip = AudioClip(np.array([1.5, 0.0]), 16000)  # constructible, not writable
        with pytest.raises(ParameterError):
            save_wav(clip, io.BytesIO())


class TestClipInvariants:
    def test_rate_positive(self):
        with pytest.raises(ParameterError):
            AudioClip(np.zeros(4), 0)

    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError):
            AudioClip(np.array([0.0, np.nan]), 16000)

    def test_two_dimensional_rejected(self):
        with pytest.raises(ParameterError):
            AudioClip(np.zeros((2, 2)), 16000)


class TestToneWords:
    def test_render_has_padding_and_label(self):
        clip = render_tone_word(ToneWord("w", ((440.0, 100.0),)), 16000, pad_ms=50)
        assert clip.label == "w"
        assert clip.samples.size == 800 + 1600 + 800
        assert np.all(clip.samples[:800] == 0.0)

    def test_vocab_file_roundtrip(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("# comment\none 400\ntwo 500:80 900:120\n")
        words = load_tone_vocab(path)
        assert [w.label for w in words] == ["one", "two"]
        assert words[0].segments == ((400.0, 150.0),)
        assert words[1].segments == ((500.0, 80.0), (900.0, 120.0))

    def test_vocab_file_bad_segment(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("one 4x0\n")
        with pytest.raises(ParameterError):
            load_tone_vocab(path)

    def test_synth_dataset_deterministic(self, tmp_path):
        words = [ToneWord("a", ((300.0, 80.0),)), ToneWord("b", ((900.0, 80.0),))]
        m1, _ = synth_dataset(words, tmp_path / "one", train_count=2, test_count=1, seed=9)
        m2, _ = synth_dataset(words, tmp_path / "two", train_count=2, test_count=1, seed=9)
        for (l1, p1), (l2, p2) in zip(read_manifest(m1), read_manifest(m2)):
            assert l1 == l2
            assert open(p1, "rb").read() == open(p2, "rb").read()


class TestSilenceSplit:
    def _joined(self, gap_ms):
        a = tone_clip(500, 0.2).samples
        b = tone_clip(1500, 0.2).samples
        gap = np.zeros(int(16000 * gap_ms / 1000))
        return AudioClip(np.concatenate([a, gap, b]), 16000)

    def test_long_gap_splits(self):
        segments = split_on_silence(self._joined(300))
        assert len(segments) == 2

    def test_short_gap_kept_together(self):
        segments = split_on_silence(self._joined(100))
        assert len(segments) == 1

    def test_all_silence_yields_nothing(self):
        assert split_on_silence(AudioClip(np.zeros(8000), 16000)) == []

    def test_bad_threshold(self):
        with pytest.raises(ParameterError):
            split_on_silence(tone_clip(500, 0.1), threshold=0.0)
