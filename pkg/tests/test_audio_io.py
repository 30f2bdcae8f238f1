"""Codec, resampler and normalization tests.

Decode tests craft RIFF bytes by hand with struct.pack rather than going
through encode_wav, so the two directions check each other.
"""

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddmd.audio_io import (
    AudioClip,
    CanonicalClip,
    decode_wav,
    encode_wav,
    load_audio,
    mixdown_mono,
    peak_normalize,
    resample,
)
from ddmd.config import AudioConfig
from ddmd.errors import DecodeError, TranscodeFailed, TranscoderUnavailable, UnsupportedFormat
from ddmd.spectral import detect_peaks, fft_forward


def make_wav(payload: bytes, channels=1, rate=8000, bits=16, audio_format=1,
             fmt_extra=b"") -> bytes:
    """Assemble a minimal RIFF/WAVE file around a raw data payload."""
    block_align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", audio_format, channels, rate,
                      rate * block_align, block_align, bits) + fmt_extra
    chunks = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    chunks += b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) % 2:
        chunks += b"\x00"
    return b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks


def pcm16(*values) -> bytes:
    return struct.pack(f"<{len(values)}h", *values)


def test_decode_16bit_known_values():
    clip = decode_wav(make_wav(pcm16(0, 16384, -32768), rate=8000))
    assert clip.sample_rate == 8000
    assert clip.channels == 1
    assert np.array_equal(clip.samples[0], [0.0, 0.5, -1.0])


def test_decode_sample_count_one_second():
    clip = decode_wav(make_wav(b"\x00\x00" * 22050, rate=22050))
    assert clip.n_samples == 22050
    assert clip.duration_s == pytest.approx(1.0)


def test_decode_8bit_unsigned():
    clip = decode_wav(make_wav(bytes([128, 255, 0]), bits=8))
    assert np.allclose(clip.samples[0], [0.0, 127 / 128, -1.0])


def test_decode_24bit_sign_extension():
    payload = (8388607).to_bytes(3, "little", signed=True)
    payload += (-8388608).to_bytes(3, "little", signed=True)
    clip = decode_wav(make_wav(payload, bits=24))
    assert np.allclose(clip.samples[0], [8388607 / 8388608, -1.0])


def test_decode_32bit_int():
    payload = struct.pack("<ii", 2**31 - 1, -(2**31))
    clip = decode_wav(make_wav(payload, bits=32))
    assert np.allclose(clip.samples[0], [(2**31 - 1) / 2**31, -1.0])


def test_decode_float32():
    payload = struct.pack("<3f", 0.25, -1.0, 0.5)
    clip = decode_wav(make_wav(payload, bits=32, audio_format=3))
    assert np.allclose(clip.samples[0], [0.25, -1.0, 0.5])


def test_decode_extensible_wraps_pcm():
    # WAVE_FORMAT_EXTENSIBLE: cbSize, valid bits, channel mask, PCM subformat GUID.
    guid = struct.pack("<H", 1) + bytes.fromhex("000000001000800000aa00389b71")
    extra = struct.pack("<HHI", 22, 16, 0x4) + guid
    clip = decode_wav(make_wav(pcm16(1000, -1000), audio_format=0xFFFE, fmt_extra=extra))
    assert np.allclose(clip.samples[0], [1000 / 32768, -1000 / 32768])


def test_decode_stereo_interleaving():
    clip = decode_wav(make_wav(pcm16(100, -100, 200, -200), channels=2))
    assert clip.channels == 2
    assert np.allclose(clip.samples[0] * 32768, [100, 200])
    assert np.allclose(clip.samples[1] * 32768, [-100, -200])


def test_decode_truncated_header():
    with pytest.raises(DecodeError):
        decode_wav(b"RIFF\x00\x00")
    with pytest.raises(DecodeError):
        decode_wav(b"not audio at all")


def test_decode_truncated_data_chunk():
    good = make_wav(pcm16(1, 2, 3, 4))
    with pytest.raises(DecodeError):
        decode_wav(good[:-5])


def test_decode_float_nan_rejected():
    payload = struct.pack("<2f", float("nan"), 0.0)
    with pytest.raises(DecodeError):
        decode_wav(make_wav(payload, bits=32, audio_format=3))


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    bits=st.sampled_from([8, 16, 24, 32]),
    channels=st.integers(1, 2),
)
def test_integer_roundtrip_exact(seed, bits, channels):
    rng = np.random.default_rng(seed)
    samples = rng.uniform(-1, 1, size=(channels, 50))
    clip = decode_wav(encode_wav(AudioClip(samples, 22050), bit_depth=bits))
    again = decode_wav(encode_wav(clip, bit_depth=bits))
    assert np.array_equal(clip.samples, again.samples)


def test_encode_float_roundtrip_lossless():
    rng = np.random.default_rng(5)
    samples = rng.uniform(-1, 1, size=(1, 64))
    clip = decode_wav(encode_wav(AudioClip(samples, 22050), bit_depth="float"))
    assert np.array_equal(clip.samples, samples.astype(np.float32).astype(np.float64))


def test_mixdown_two_channels():
    clip = AudioClip(np.array([[1.0, 0.5], [0.0, 0.5]]), 22050)
    assert np.array_equal(mixdown_mono(clip).samples, [[0.5, 0.5]])


def test_mixdown_mono_identity():
    clip = AudioClip(np.array([[0.1, -0.2, 0.3]]), 22050)
    assert np.array_equal(mixdown_mono(clip).samples, clip.samples)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), channels=st.integers(1, 6))
def test_mixdown_equals_sample_mean_oracle(seed, channels):
    rng = np.random.default_rng(seed)
    samples = rng.normal(size=(channels, 30))
    mixed = mixdown_mono(AudioClip(samples, 44100))
    expected = np.array([sum(samples[c][i] for c in range(channels)) / channels
                         for i in range(30)])
    assert np.array_equal(mixed.samples[0], samples.mean(axis=0))
    assert np.allclose(mixed.samples[0], expected, atol=1e-12)


def test_resample_output_length():
    clip = AudioClip(np.zeros((1, 8000)), 8000)
    assert resample(clip, 22050).n_samples == 22050
    assert resample(clip, 22050).sample_rate == 22050


def test_resample_equal_rate_passthrough():
    rng = np.random.default_rng(3)
    clip = AudioClip(rng.normal(size=(1, 100)), 22050)
    out = resample(clip, 22050)
    assert np.array_equal(out.samples, clip.samples)


def test_resample_preserves_dominant_tone():
    fs_in = 44100
    x = np.sin(2 * np.pi * 1000 * np.arange(fs_in) / fs_in)
    out = resample(AudioClip(x[None, :], fs_in), 22050)
    spectrum = fft_forward(out.samples[0], 22050)
    peaks = detect_peaks(spectrum)
    dominant = peaks.peak_freqs[np.argmax(peaks.peak_mags)]
    assert abs(dominant - 1000.0) < 22050 / spectrum.n


def test_resample_downsample_kills_aliasing():
    # A 9 kHz tone is unrepresentable at 8 kHz output and must not fold back.
    # Edge samples see a truncated kernel, so judge the interior only.
    fs_in = 44100
    x = np.sin(2 * np.pi * 9000 * np.arange(fs_in) / fs_in)
    out = resample(AudioClip(x[None, :], fs_in), 8000)
    assert np.max(np.abs(out.samples[0][20:-20])) < 0.02


def test_peak_normalize_known_values():
    clip = AudioClip(np.array([[0.0, 0.5, -2.0]]), 22050)
    assert np.array_equal(peak_normalize(clip).samples, [[0.0, 0.25, -1.0]])


def test_peak_normalize_zero_signal_passthrough():
    clip = AudioClip(np.zeros((1, 10)), 22050)
    assert np.array_equal(peak_normalize(clip).samples, np.zeros((1, 10)))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_peak_normalize_idempotent_and_shape_preserving(seed):
    rng = np.random.default_rng(seed)
    clip = AudioClip(rng.normal(size=(1, 40)) * rng.uniform(0.01, 100), 22050)
    once = peak_normalize(clip)
    twice = peak_normalize(once)
    assert np.array_equal(once.samples, twice.samples)
    assert np.max(np.abs(once.samples)) == pytest.approx(1.0, abs=np.finfo(np.float64).eps)
    assert np.array_equal(np.sign(once.samples), np.sign(clip.samples))
    assert np.argmax(np.abs(once.samples)) == np.argmax(np.abs(clip.samples))


def test_load_audio_full_pipeline(tmp_path):
    rng = np.random.default_rng(11)
    stereo = rng.uniform(-0.5, 0.5, size=(2, 44100))
    path = tmp_path / "clip.wav"
    path.write_bytes(encode_wav(AudioClip(stereo, 44100)))
    canonical = load_audio(path)
    assert isinstance(canonical, CanonicalClip)
    assert canonical.sample_rate == 22050
    assert canonical.samples.ndim == 1
    assert len(canonical.samples) == 22050
    assert np.max(np.abs(canonical.samples)) == pytest.approx(1.0, abs=1e-12)


def test_load_audio_from_bytes_with_hint():
    x = np.sin(2 * np.pi * 440 * np.arange(2205) / 22050)
    data = encode_wav(AudioClip(x[None, :], 22050))
    canonical = load_audio(data, format_hint="wav")
    assert len(canonical.samples) == 2205


def test_load_audio_unknown_extension(tmp_path):
    path = tmp_path / "mystery.xyz"
    path.write_bytes(b"whatever")
    with pytest.raises(UnsupportedFormat):
        load_audio(path)


def test_load_audio_mp3_without_transcoder(tmp_path):
    path = tmp_path / "song.mp3"
    path.write_bytes(b"ID3junk")
    with pytest.raises(TranscoderUnavailable):
        load_audio(path)


def test_load_audio_transcoder_hook(tmp_path):
    # "cat" stands in for a real converter: the .mp3 file already holds WAV bytes.
    x = np.sin(2 * np.pi * 300 * np.arange(4410) / 22050)
    path = tmp_path / "fake.mp3"
    path.write_bytes(encode_wav(AudioClip(x[None, :], 22050)))
    config = AudioConfig(transcoder="cat {input}")
    canonical = load_audio(path, config=config)
    assert len(canonical.samples) == 4410


def test_load_audio_transcoder_failure(tmp_path):
    path = tmp_path / "bad.ogg"
    path.write_bytes(b"OggS")
    config = AudioConfig(transcoder="false")
    with pytest.raises(TranscodeFailed):
        load_audio(path, config=config)
