import struct
import wave

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from occam.audio import AudioVector, l2_distance, local_smooth, read_wav, resample, snr_db, to_pcm16, write_wav
from occam.errors import DimensionError, UndefinedSNRError, ValidationError, WavFormatError

amplitudes = arrays(np.float64, st.integers(1, 200), elements=st.floats(-1.0, 1.0))


def _raw_wav(path, ints, channels=1, width=2, rate=16000):
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(channels)
        wf.setsampwidth(width)
        wf.setframerate(rate)
        fmt = {1: "b", 2: "h"}[width]
        wf.writeframes(struct.pack("<%d%s" % (len(ints), fmt), *ints))


class TestAudioVector:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            AudioVector([0.0, 1.5])

    def test_rejects_nonfinite_and_empty(self):
        with pytest.raises(ValidationError):
            AudioVector([0.0, float("nan")])
        with pytest.raises(ValidationError):
            AudioVector([])

    def test_immutable(self):
        a = AudioVector([0.1, 0.2])
        with pytest.raises(ValueError):
            a.samples[0] = 0.5


class TestWav:
    def test_zeros(self, tmp_path):
        _raw_wav(tmp_path / "z.wav", [0, 0, 0])
        a = read_wav(tmp_path / "z.wav")
        assert a.samples.tolist() == [0.0, 0.0, 0.0]
        assert a.sample_rate == 16000

    def test_half_scale(self, tmp_path):
        _raw_wav(tmp_path / "h.wav", [16384], rate=8000)
        a = read_wav(tmp_path / "h.wav")
        assert a.samples[0] == 0.5
        assert a.sample_rate == 8000

    def test_clamp_rule(self):
        assert to_pcm16([0.0, 1.0, -1.0]).tolist() == [0, 32767, -32768]

    @pytest.mark.parametrize("channels,width", [(2, 2), (1, 1)])
    def test_rejects_non_mono_16bit(self, tmp_path, channels, width):
        _raw_wav(tmp_path / "bad.wav", [0, 0, 0, 0], channels=channels, width=width)
        with pytest.raises(WavFormatError):
            read_wav(tmp_path / "bad.wav")

    def test_rejects_garbage(self, tmp_path):
        (tmp_path / "g.wav").write_bytes(b"not a wav file at all")
        with pytest.raises(WavFormatError):
            read_wav(tmp_path / "g.wav")

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            write_wav(AudioVector([0.0]), tmp_path / "missing" / "x.wav")

    @settings(max_examples=50, deadline=None)
    @given(amplitudes)
    def test_roundtrip(self, tmp_path_factory, samples):
        path = tmp_path_factory.mktemp("rt") / "a.wav"
        a = AudioVector(samples, 22050)
        write_wav(a, path)
        b = read_wav(path)
        assert b.sample_rate == 22050
        assert np.max(np.abs(a.samples - b.samples)) <= 1 / 32768


class TestMetrics:
    def test_l2(self):
        assert l2_distance([0.0, 0.0], [3.0, 4.0]) == 5.0
        assert l2_distance([1.0], [0.0]) == 1.0
        a = AudioVector([0.3, -0.2])
        assert l2_distance(a, a) == 0.0

    def test_l2_length_mismatch(self):
        with pytest.raises(DimensionError):
            l2_distance([0.0], [0.0, 1.0])

    def test_snr_values(self):
        x = np.full(10, 0.5)
        assert snr_db(x, np.full(10, 0.55)) == pytest.approx(20.0, abs=1e-9)
        assert snr_db(x, 2 * x) == pytest.approx(0.0, abs=1e-12)

    def test_snr_undefined(self):
        with pytest.raises(UndefinedSNRError):
            snr_db([0.5, 0.5], [0.5, 0.5])
        with pytest.raises(UndefinedSNRError):
            snr_db([0.0, 0.0], [0.1, 0.0])

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1), st.floats(1.01, 10.0))
    def test_snr_decreases_with_noise_scale(self, seed, factor):
        rng = np.random.default_rng(seed)
        x = rng.uniform(-0.5, 0.5, 32)
        noise = rng.normal(0, 0.01, 32)
        assert snr_db(x, x + factor * noise) < snr_db(x, x + noise)


class TestSmoothing:
    def test_identity(self):
        a = AudioVector([0.1, -0.4, 0.9])
        assert local_smooth(a, 0).samples.tolist() == a.samples.tolist()

    def test_spike_example(self):
        out = local_smooth(AudioVector([0.0, 0.3, 0.0]), 1)
        # replicate padding: windows (0,0,.3), (0,.3,0), (.3,0,0)
        np.testing.assert_allclose(out.samples, [0.1, 0.1, 0.1], rtol=0, atol=1e-15)

    def test_spike_example_exact(self):
        assert local_smooth(np.array([0.0, 3.0, 0.0]), 1).tolist() == [1.0, 1.0, 1.0]
        out = local_smooth(AudioVector([0.0, 0.75, 0.0]), 1)
        assert out.samples.tolist() == [0.25, 0.25, 0.25]

    def test_raw_array_identity_copies(self):
        x = np.array([0.5, 2.0])
        out = local_smooth(x, 0)
        assert out.tolist() == [0.5, 2.0] and out is not x

    def test_constant(self):
        a = AudioVector(np.full(20, -0.3))
        for h in (1, 3, 10):
            np.testing.assert_allclose(local_smooth(a, h).samples, a.samples, rtol=0, atol=1e-15)

    def test_median_option(self):
        out = local_smooth(AudioVector([0.0, 0.9, 0.0, 0.0]), 1, method="median")
        assert out.samples.tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_negative_h(self):
        with pytest.raises(ValidationError):
            local_smooth(AudioVector([0.0]), -1)

    @settings(max_examples=60)
    @given(amplitudes, st.integers(0, 12), st.sampled_from(["mean", "median"]))
    def test_length_and_range(self, samples, h, method):
        a = AudioVector(samples)
        out = local_smooth(a, h, method=method).samples
        assert out.shape == samples.shape
        assert out.min() >= samples.min() - 1e-12
        assert out.max() <= samples.max() + 1e-12


class TestResample:
    def test_same_rate_identity(self):
        a = AudioVector([0.1, 0.2, 0.3])
        assert resample(a, 16000) is a

    def test_constant(self):
        a = AudioVector(np.full(100, 0.25))
        for rate in (8000, 12000, 44100):
            out = resample(a, rate)
            np.testing.assert_allclose(out.samples, 0.25, rtol=0, atol=1e-15)
            assert len(out) == round(100 * rate / 16000)

    def test_ramp_down_up(self):
        ramp = AudioVector(np.arange(8) * 0.1)
        down = resample(ramp, 8000)
        assert len(down) == 4 and down.sample_rate == 8000
        up = resample(down, 16000)
        assert len(up) == 8
        np.testing.assert_allclose(up.samples[1:-1], ramp.samples[1:-1], rtol=0, atol=1e-6)

    def test_length_rule(self):
        a = AudioVector(np.zeros(1001))
        assert len(resample(a, 12000)) == round(1001 * 12000 / 16000)

    def test_raw_array(self):
        out = resample(np.arange(8) * 0.1, 8000, sample_rate=16000)
        assert isinstance(out, np.ndarray) and out.shape == (4,)
        with pytest.raises(ValidationError):
            resample(np.zeros(4), 8000)

    def test_bad_rate(self):
        with pytest.raises(ValidationError):
            resample(AudioVector([0.0]), 0)

