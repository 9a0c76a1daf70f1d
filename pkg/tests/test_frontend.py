import io
import math

import numpy as np
import pytest

from vircis import (AudioClip, FeatureMatrix, FrameSpec, MfccConfig,
                    ParameterError, delta_features, extract_mfcc, frame_signal,
                    load_features, mel_filterbank, power_spectrum, preemphasize,
                    save_features)
from vircis.frontend import (LOG_FLOOR, log_filter_energies,
                             mel_filter_centers, window_weights)
from helpers import tone_clip

RATE = 16000
NO_DELTAS = MfccConfig(include_deltas=False, include_delta_deltas=False)


class TestPreemphasis:
    def test_alpha_zero_identity(self, rng):
        clip = AudioClip(rng.uniform(-1, 1, 100), RATE)
        out = preemphasize(clip, 0.0)
        assert np.array_equal(out.samples, clip.samples)

    def test_constant_signal(self):
        clip = AudioClip(np.full(10, 0.5), RATE)
        out = preemphasize(clip, 0.97)
        assert out.samples[0] == 0.5
        assert np.allclose(out.samples[1:], 0.5 - 0.97 * 0.5)

    def test_impulse(self):
        out = preemphasize(AudioClip(np.array([1.0, 0.0, 0.0]), RATE), 0.97)
        assert np.allclose(out.samples, [1.0, -0.97, 0.0])

    @pytest.mark.parametrize("alpha", [-0.1, 1.0, 1.5])
    def test_alpha_range(self, alpha):
        with pytest.raises(ParameterError):
            preemphasize(AudioClip(np.zeros(4), RATE), alpha)


class TestFraming:
    def test_frame_count_with_padding(self):
        # 400 samples at 16 kHz with 25 ms frames / 10 ms hop: one full
        # frame plus one zero-padded frame.
        spec = FrameSpec(preemphasis_alpha=0.0, window="rectangular")
        clip = AudioClip(np.arange(1, 401) / 1000.0, RATE)
        frames = frame_signal(clip, spec)
        assert frames.shape == (2, 400)
        assert np.array_equal(frames[0], clip.samples)
        assert np.array_equal(frames[1, :240], clip.samples[160:])
        assert np.all(frames[1, 240:] == 0.0)

    def test_short_clip_single_frame(self):
        spec = FrameSpec(preemphasis_alpha=0.0, window="rectangular")
        frames = frame_signal(AudioClip(np.ones(100), RATE), spec)
        assert frames.shape == (1, 400)
        assert np.all(frames[0, 100:] == 0.0)

    def test_rectangular_window_is_raw_slice(self):
        spec = FrameSpec(preemphasis_alpha=0.0, window="rectangular")
        clip = AudioClip(np.linspace(-0.5, 0.5, 800), RATE)
        frames = frame_signal(clip, spec)
        assert np.array_equal(frames[0], clip.samples[:400])

    def test_hamming_endpoint(self):
        weights = window_weights("hamming", 400)
        assert weights[0] == pytest.approx(0.08)
        assert weights[200] == pytest.approx(0.54 - 0.46 * math.cos(2 * math.pi * 200 / 399))

    def test_hop_larger_than_frame_rejected(self):
        with pytest.raises(ParameterError):
            FrameSpec(frame_length_ms=10.0, hop_ms=20.0)


class TestPowerSpectrum:
    def test_parseval(self, rng):
        for _ in range(20):
            frame = rng.normal(size=400)
            power = power_spectrum(frame, 512)
            # one-sided spectrum: interior bins count twice
            total = power[0] + power[-1] + 2.0 * np.sum(power[1:-1])
            energy = np.sum(frame * frame)
            assert abs(total - energy) <= 1e-6 * energy

    def test_frame_too_long(self):
        with pytest.raises(ParameterError):
            power_spectrum(np.zeros(600), 512)


class TestMelFilterbank:
    def test_rows_nonnegative_and_cover(self):
        bank = mel_filterbank(MfccConfig(), RATE)
        assert bank.shape == (26, 257)
        assert np.all(bank >= 0.0)
        assert np.all(bank.sum(axis=1) > 0.0)

    def test_nyquist_cap(self):
        with pytest.raises(ParameterError):
            mel_filterbank(MfccConfig(high_freq_hz=9000.0), RATE)

    def test_tone_peaks_at_nearest_filter(self):
        config = NO_DELTAS
        clip = tone_clip(1000, 0.5)
        energies = log_filter_energies(clip, FrameSpec(), config)
        centers = mel_filter_centers(config)
        expected = int(np.argmin(np.abs(centers - 1000.0)))
        for t in range(1, energies.shape[0] - 1):
            assert int(np.argmax(energies[t])) == expected


class TestExtractMfcc:
    def test_silence_hits_log_floor(self):
        clip = AudioClip(np.zeros(RATE), RATE)
        energies = log_filter_energies(clip)
        assert np.all(energies == math.log(LOG_FLOOR))
        features = extract_mfcc(clip, config=NO_DELTAS)
        assert np.allclose(features.frames, features.frames[0])

    def test_constant_spectrum_dct(self):
        # silence: every log energy equals log(LOG_FLOOR), so the DCT keeps
        # everything in c0 = v * sqrt(M) and zeros the higher cepstra.
        clip = AudioClip(np.zeros(RATE), RATE)
        features = extract_mfcc(clip, config=NO_DELTAS)
        v = math.log(LOG_FLOOR)
        assert features.frames[0, 0] == pytest.approx(v * math.sqrt(26))
        assert np.allclose(features.frames[:, 1:], 0.0, atol=1e-12)

    def test_deterministic(self):
        clip = tone_clip(700, 0.3)
        a = extract_mfcc(clip)
        b = extract_mfcc(clip)
        assert np.array_equal(a.frames, b.frames)

    def test_dimension_layout(self):
        clip = tone_clip(700, 0.2)
        assert extract_mfcc(clip, config=NO_DELTAS).dim == 13
        assert extract_mfcc(clip, config=MfccConfig(include_delta_deltas=False)).dim == 26
        assert extract_mfcc(clip).dim == 39

    def test_energy_replaces_c0(self):
        clip = tone_clip(700, 0.2)
        config = MfccConfig(include_energy=True, include_deltas=False,
                            include_delta_deltas=False)
        plain = extract_mfcc(clip, config=NO_DELTAS)
        with_energy = extract_mfcc(clip, config=config)
        assert not np.array_equal(plain.frames[:, 0], with_energy.frames[:, 0])
        assert np.array_equal(plain.frames[:, 1:], with_energy.frames[:, 1:])

    def test_period_shift_leaves_interior_frames(self):
        # 100 Hz tone: period (160 samples) equals the hop, so delaying by
        # one period only relabels frames; interior coefficients must agree.
        period = 160
        base = tone_clip(100, 0.5)
        shifted = AudioClip(np.concatenate([np.zeros(period), base.samples]), RATE)
        a = extract_mfcc(base)
        b = extract_mfcc(shifted)
        common = min(a.num_frames, b.num_frames)
        # pre-emphasis leaks one frame past the zero-fill and delta-deltas
        # reach +/-4 frames, so stay well clear of both clip edges
        interior = slice(7, common - 7)
        assert interior.stop - interior.start > 20
        assert np.max(np.abs(a.frames[interior] - b.frames[interior])) < 1e-3

    def test_fft_shorter_than_frame_rejected(self):
        with pytest.raises(ParameterError):
            extract_mfcc(tone_clip(500, 0.1), config=MfccConfig(fft_size=256))


class TestDeltas:
    def test_constant_sequence_zero(self):
        coeffs = np.tile([1.0, -2.0, 3.0], (10, 1))
        assert np.all(delta_features(coeffs) == 0.0)

    def test_linear_ramp_slope(self):
        coeffs = np.arange(20, dtype=float).reshape(-1, 1)
        deltas = delta_features(coeffs)
        assert np.allclose(deltas[3:-3], 1.0)


class TestConfigValidation:
    def test_cepstra_bounded_by_filters(self):
        with pytest.raises(ParameterError):
            MfccConfig(num_mel_filters=10, num_cepstra=11)

    def test_fft_power_of_two(self):
        with pytest.raises(ParameterError):
            MfccConfig(fft_size=500)

    def test_delta_deltas_require_deltas(self):
        with pytest.raises(ParameterError):
            MfccConfig(include_deltas=False, include_delta_deltas=True)

    def test_band_edges(self):
        with pytest.raises(ParameterError):
            MfccConfig(low_freq_hz=4000.0, high_freq_hz=400.0)


class TestFeatureSerialization:
    def test_roundtrip_bit_exact(self, rng):
        features = extract_mfcc(tone_clip(440, 0.2))
        buf = io.BytesIO()
        save_features(features, buf)
        text = buf.getvalue()
        loaded = load_features(io.BytesIO(text))
        assert np.array_equal(loaded.frames, features.frames)
        buf2 = io.BytesIO()
        save_features(loaded, buf2)
        assert buf2.getvalue() == text

    def test_header_format(self, tmp_path):
        features = FeatureMatrix(np.array([[1.0, 2.0], [3.0, 4.0]]))
        path = tmp_path / "f.txt"
        save_features(features, path)
        assert path.read_text().splitlines()[0] == "mfcc 2 2"

    def test_bad_header(self):
        with pytest.raises(ParameterError):
            load_features(io.BytesIO(b"nope 1 1\n0.0\n"))

    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError):
            FeatureMatrix(np.array([[np.inf]]))
