"""Frame-based music features and the combined 34-element feature vector.

Layout of the vector (schema version 1), frozen because it defines both the
model's feature indices and the CSV column order:

    [freq_mean, freq_std, mfcc_0..12, chroma_0..11, contrast_0..6]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import CanonicalClip
from .config import (
    DEFAULT_CONFIG,
    FEATURE_SCHEMA_VERSION,
    N_CHROMA,
    N_CONTRAST,
    N_FEATURES,
    N_MFCC,
    FeatureConfig,
    PipelineConfig,
)
from .errors import InvalidInput
from .spectral import fft_pow2, frequency_features

# Frames per FFT batch; bounds transform scratch memory for long files.
_STFT_CHUNK = 1024


@dataclass(frozen=True)
class StftFrames:
    """Magnitude spectrogram: frames shaped (n_frames, frame_length/2 + 1)."""

    frames: np.ndarray
    frame_length: int
    hop: int
    sample_rate: float

    @property
    def bin_freqs(self) -> np.ndarray:
        """Center frequency in Hz of every retained bin."""
        return np.arange(self.frames.shape[1]) * self.sample_rate / self.frame_length


@dataclass(frozen=True)
class FeatureVector:
    """Ordered 34-element descriptor of one audio file."""

    values: np.ndarray
    schema_version: int = FEATURE_SCHEMA_VERSION

    def __post_init__(self):
        if self.values.shape != (N_FEATURES,):
            raise InvalidInput(f"feature vector must have {N_FEATURES} values, got {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise InvalidInput("feature vector contains non-finite values")


def stft(clip: CanonicalClip, config: FeatureConfig = FeatureConfig()) -> StftFrames:
    """Hann-windowed magnitude STFT.

    Frames start at multiples of the hop; a trailing partial frame is dropped.
    A clip shorter than one frame yields a single zero-padded frame.
    """
    x = np.asarray(clip.samples, dtype=np.float64)
    n = config.frame_length
    if x.size < n:
        frame = np.zeros((1, n))
        frame[0, : x.size] = x
        windows = frame
    else:
        windows = np.lib.stride_tricks.sliding_window_view(x, n)[:: config.hop]
    # Periodic Hann window.
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
    n_bins = n // 2 + 1
    mags = np.empty((windows.shape[0], n_bins), dtype=np.float64)
    for start in range(0, windows.shape[0], _STFT_CHUNK):
        chunk = windows[start : start + _STFT_CHUNK] * window
        mags[start : start + chunk.shape[0]] = np.abs(fft_pow2(chunk)[:, :n_bins])
    return StftFrames(frames=mags, frame_length=n, hop=config.hop, sample_rate=clip.sample_rate)


def _hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def _mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_filters: int, frame_length: int, sample_rate: float) -> np.ndarray:
    """Triangular mel filters spanning 0..sample_rate/2, shaped (n_filters, n_bins)."""
    n_bins = frame_length // 2 + 1
    bin_freqs = np.arange(n_bins) * sample_rate / frame_length
    hz_points = _mel_to_hz(np.linspace(_hz_to_mel(0.0), _hz_to_mel(sample_rate / 2.0), n_filters + 2))
    lo, mid, hi = hz_points[:-2, None], hz_points[1:-1, None], hz_points[2:, None]
    rising = (bin_freqs[None, :] - lo) / (mid - lo)
    falling = (hi - bin_freqs[None, :]) / (hi - mid)
    return np.clip(np.minimum(rising, falling), 0.0, None)


def dct_ii_ortho(n_in: int, n_out: int) -> np.ndarray:
    """Orthonormal DCT-II matrix shaped (n_out, n_in)."""
    k = np.arange(n_out)[:, None]
    n = np.arange(n_in)[None, :]
    mat = np.sqrt(2.0 / n_in) * np.cos(np.pi * (2 * n + 1) * k / (2 * n_in))
    mat[0] *= np.sqrt(0.5)
    return mat


def mfcc(frames: StftFrames, config: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """Frame-averaged mel-frequency cepstral coefficients 0..12.

    Per frame: power spectrum -> triangular mel filterbank -> natural log with
    a small floor -> orthonormal DCT-II, keeping the first 13 coefficients.
    """
    fb = mel_filterbank(config.n_mel_filters, frames.frame_length, frames.sample_rate)
    dct = dct_ii_ortho(config.n_mel_filters, N_MFCC)
    energies = (frames.frames**2) @ fb.T
    log_energies = np.log(np.maximum(energies, config.log_floor))
    return (log_energies @ dct.T).mean(axis=0)


def chroma(frames: StftFrames, config: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """Frame-averaged 12-class pitch profile, max-normalized per frame.

    Every bin at or above config.chroma_min_hz contributes its energy to the
    pitch class of the nearest equal-tempered note (A4 = chroma_ref_hz,
    C = class 0). Silent frames are skipped by the normalization and stay zero.
    """
    freqs = frames.bin_freqs
    audible = freqs >= config.chroma_min_hz
    classes = np.zeros(freqs.shape, dtype=np.int64)
    classes[audible] = (
        np.round(12.0 * np.log2(freqs[audible] / config.chroma_ref_hz)).astype(np.int64) + 69
    ) % 12
    indicator = np.zeros((N_CHROMA, freqs.size))
    indicator[classes[audible], np.nonzero(audible)[0]] = 1.0
    energy = (frames.frames**2) @ indicator.T
    peak = energy.max(axis=1, keepdims=True)
    scaled = np.divide(energy, peak, out=np.zeros_like(energy), where=peak > 0)
    return scaled.mean(axis=0)


def spectral_contrast(frames: StftFrames, config: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """Frame-averaged log peak-to-valley contrast over 7 frequency bands.

    Within each band every frame's bin magnitudes are sorted; the peak (valley)
    is the mean of the top (bottom) ceil(quantile * band_size) magnitudes, and
    the contrast is the difference of their logs. Bands without bins yield 0.
    """
    freqs = frames.bin_freqs
    nyquist = frames.sample_rate / 2.0
    edges = list(config.contrast_edges_hz) + [nyquist]
    out = np.zeros(N_CONTRAST)
    for band in range(N_CONTRAST):
        lo, hi = edges[band], edges[band + 1]
        if band == N_CONTRAST - 1:
            mask = (freqs >= lo) & (freqs <= hi)
        else:
            mask = (freqs >= lo) & (freqs < hi)
        n_bins = int(mask.sum())
        if n_bins == 0:
            continue
        q = max(1, int(np.ceil(config.contrast_quantile * n_bins)))
        band_mags = np.sort(frames.frames[:, mask], axis=1)
        valley = band_mags[:, :q].mean(axis=1)
        peak = band_mags[:, -q:].mean(axis=1)
        out[band] = np.mean(np.log(peak + config.log_floor) - np.log(valley + config.log_floor))
    return out


def extract_feature_vector(clip: CanonicalClip, config: PipelineConfig = DEFAULT_CONFIG) -> FeatureVector:
    """Full 34-element descriptor of a canonical clip.

    Pure function of (samples, config): repeated extraction of the same bytes
    yields bit-identical vectors.
    """
    frames = stft(clip, config.features)
    values = np.concatenate(
        [
            frequency_features(clip, config.spectral),
            mfcc(frames, config.features),
            chroma(frames, config.features),
            spectral_contrast(frames, config.features),
        ]
    )
    return FeatureVector(values=values)
