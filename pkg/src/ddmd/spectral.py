"""Whole-signal frequency analysis.

A radix-2 FFT over the (zero-padded) signal, peak detection in the magnitude
spectrum with a 10%-of-max threshold, and the two frequency-domain features:
mean and population standard deviation of the detected peak frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SpectralConfig
from .errors import InvalidInput


@dataclass(frozen=True)
class Spectrum:
    """Complex transform output of a real signal.

    bins holds X[k] for k = 0..n-1 where n is the padded transform length;
    sample_rate is the rate of the analyzed signal in Hz.
    """

    bins: np.ndarray
    n: int
    sample_rate: float

    def magnitudes(self) -> np.ndarray:
        """|X[k]| = sqrt(Re^2 + Im^2) for every bin."""
        return np.abs(self.bins)

    def phases(self) -> np.ndarray:
        """phi[k] = atan2(Im, Re) for every bin."""
        return np.angle(self.bins)


@dataclass(frozen=True)
class PeakSet:
    """Detected spectral peaks: bin indices, frequencies (Hz) and magnitudes."""

    peak_bins: np.ndarray
    peak_freqs: np.ndarray
    peak_mags: np.ndarray

    def __len__(self) -> int:
        return len(self.peak_bins)


@dataclass(frozen=True)
class FreqStats:
    """Mean/std (Hz) of detected peak frequencies; std is the population form."""

    mean: float
    std: float
    n_peaks: int


def next_pow2(n: int) -> int:
    """Smallest power of two >= n (n >= 1)."""
    return 1 << (n - 1).bit_length()


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros_like(idx)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def fft_pow2(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 decimation-in-time transform along the last axis.

    The last-axis length must be a power of two. Accepts batched input, so a
    whole STFT frame matrix transforms in one call.
    """
    x = np.asarray(x)
    n = x.shape[-1]
    if n & (n - 1):
        raise InvalidInput(f"transform length {n} is not a power of two")
    buf = np.asarray(x, dtype=np.complex128)[..., _bit_reverse_indices(n)]
    half = 1
    while half < n:
        step = 2 * half
        twiddle = np.exp((-2j * np.pi / step) * np.arange(half))
        grouped = buf.reshape(*buf.shape[:-1], -1, step)
        even = grouped[..., :half].copy()
        odd = grouped[..., half:] * twiddle
        grouped[..., :half] = even + odd
        grouped[..., half:] = even - odd
        half = step
    return buf


def fft_forward(signal: np.ndarray, sample_rate: float) -> Spectrum:
    """Transform a real signal to the frequency domain.

    The signal is zero-padded to the next power of two; the padded length
    becomes the transform length N, and all bin frequencies are expressed
    relative to that N.

    Raises:
        InvalidInput: if the signal is empty.
    """
    signal = np.asarray(signal, dtype=np.float64)
    if signal.ndim != 1:
        raise InvalidInput(f"expected a 1-D signal, got shape {signal.shape}")
    if signal.size == 0:
        raise InvalidInput("cannot transform an empty signal")
    n = next_pow2(signal.size)
    padded = np.zeros(n, dtype=np.float64)
    padded[: signal.size] = signal
    return Spectrum(bins=fft_pow2(padded), n=n, sample_rate=float(sample_rate))


def bin_frequency(k, n: int, sample_rate: float):
    """Frequency in Hz of bin k for an n-point transform at the given rate."""
    return k * sample_rate / n


def detect_peaks(spectrum: Spectrum, config: SpectralConfig = SpectralConfig()) -> PeakSet:
    """Find spectral peaks in the positive-frequency half of the spectrum.

    Scans bins 1..N/2-1 (DC and Nyquist excluded). A bin is a peak iff its
    magnitude is strictly greater than both neighbors and at least
    config.peak_threshold times the maximum magnitude over the scanned range.
    """
    mags = spectrum.magnitudes()
    half = spectrum.n // 2
    empty = PeakSet(
        peak_bins=np.empty(0, dtype=np.int64),
        peak_freqs=np.empty(0, dtype=np.float64),
        peak_mags=np.empty(0, dtype=np.float64),
    )
    if half < 2:
        return empty
    scanned = mags[1:half]
    max_mag = scanned.max()
    if max_mag == 0.0:
        return empty
    local_max = (scanned > mags[0 : half - 1]) & (scanned > mags[2 : half + 1])
    above = scanned >= config.peak_threshold * max_mag
    bins = np.nonzero(local_max & above)[0] + 1
    return PeakSet(
        peak_bins=bins,
        peak_freqs=bin_frequency(bins, spectrum.n, spectrum.sample_rate),
        peak_mags=mags[bins],
    )


def freq_stats(peaks: PeakSet) -> FreqStats:
    """Mean and population standard deviation of the detected frequencies.

    No peaks yields (0, 0) so degenerate signals stay classifiable.
    """
    n = len(peaks)
    if n == 0:
        return FreqStats(mean=0.0, std=0.0, n_peaks=0)
    freqs = np.asarray(peaks.peak_freqs, dtype=np.float64)
    mean = float(freqs.mean())
    std = float(np.sqrt(np.mean((freqs - mean) ** 2)))
    return FreqStats(mean=mean, std=std, n_peaks=n)


def frequency_features(clip, config: SpectralConfig = SpectralConfig()) -> np.ndarray:
    """The two frequency-domain features of a canonical mono clip: (mean_hz, std_hz).

    Accepts anything with .samples (1-D array) and .sample_rate. Analyzes at
    most the first config.max_fft_samples samples to bound memory.
    """
    samples = np.asarray(clip.samples, dtype=np.float64)
    spectrum = fft_forward(samples[: config.max_fft_samples], clip.sample_rate)
    stats = freq_stats(detect_peaks(spectrum, config))
    return np.array([stats.mean, stats.std], dtype=np.float64)
