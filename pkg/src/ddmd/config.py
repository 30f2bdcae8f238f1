"""Frozen configuration dataclasses for the analysis pipeline.

All numeric analysis parameters live here so a run is reproducible from
(input bytes, config, seed) alone. The default values define feature schema
version 1; changing anything that alters the emitted vector requires bumping
FEATURE_SCHEMA_VERSION.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Version stamped into feature vectors, CSV stores and model files.
FEATURE_SCHEMA_VERSION = 1
MODEL_SCHEMA_VERSION = 1

# Fixed layout of the 34-element feature vector.
N_FREQ_FEATURES = 2
N_MFCC = 13
N_CHROMA = 12
N_CONTRAST = 7
N_FEATURES = N_FREQ_FEATURES + N_MFCC + N_CHROMA + N_CONTRAST

FEATURE_NAMES: tuple[str, ...] = (
    ("freq_mean", "freq_std")
    + tuple(f"mfcc_{i}" for i in range(N_MFCC))
    + tuple(f"chroma_{i}" for i in range(N_CHROMA))
    + tuple(f"contrast_{i}" for i in range(N_CONTRAST))
)

# File extensions the loader accepts (lowercase, no dot). WAV decodes
# natively; everything else goes through the external transcoder hook.
ACCEPTED_EXTENSIONS = ("wav", "mp3", "mp4", "aiff", "aac", "ogg", "flac")


@dataclass(frozen=True)
class AudioConfig:
    """Decoding and canonicalization parameters."""

    canonical_rate: int = 22050
    resample_taps: int = 64
    # Command template for non-WAV inputs, e.g. "ffmpeg -i {input} -f wav -".
    # Must write RIFF/WAVE bytes to stdout.
    transcoder: str | None = None


@dataclass(frozen=True)
class SpectralConfig:
    """Whole-signal frequency-analysis parameters."""

    # Cap on samples fed to the whole-file transform (~190 s at 22050 Hz).
    max_fft_samples: int = 1 << 22
    # Peaks must reach this fraction of the strongest scanned magnitude.
    peak_threshold: float = 0.1


@dataclass(frozen=True)
class FeatureConfig:
    """Frame-based feature parameters (STFT, MFCC, chroma, contrast)."""

    frame_length: int = 2048
    hop: int = 512
    n_mel_filters: int = 26
    log_floor: float = 1e-10
    chroma_min_hz: float = 20.0
    chroma_ref_hz: float = 440.0
    # Seven bands: 0-200 Hz plus six octave-doubling bands up to Nyquist.
    contrast_edges_hz: tuple[float, ...] = (0.0, 200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0)
    contrast_quantile: float = 0.02


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a feature extraction run depends on."""

    audio: AudioConfig = field(default_factory=AudioConfig)
    spectral: SpectralConfig = field(default_factory=SpectralConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)


DEFAULT_CONFIG = PipelineConfig()
