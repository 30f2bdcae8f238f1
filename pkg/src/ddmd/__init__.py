"""Digital-drug audio detection: spectral features plus a random-forest verdict.

The pipeline runs decode -> canonicalize -> 34-dim feature vector ->
forest classification, with a CLI (`ddmd`) and an HTTP service on top.
"""

from .audio_io import AudioClip, CanonicalClip, decode_wav, encode_wav, load_audio, mixdown_mono, peak_normalize, resample
from .config import (
    AudioConfig,
    DEFAULT_CONFIG,
    FEATURE_NAMES,
    FeatureConfig,
    N_FEATURES,
    PipelineConfig,
    SpectralConfig,
)
from .errors import (
    BatchError,
    CorpusLayoutError,
    DecodeError,
    InvalidInput,
    InvalidSpec,
    PipelineError,
    SchemaError,
    TranscodeFailed,
    TranscoderUnavailable,
    UnsupportedFormat,
)
from .evalkit import ClassificationReport, evaluate, report_from_predictions, split_train_test
from .features import FeatureVector, extract_feature_vector, stft
from .forest import ForestModel, Hyperparams, TrainingSet, fit, gini, load_model, predict, predict_proba, save_model
from .spectral import FreqStats, PeakSet, Spectrum, detect_peaks, fft_forward, freq_stats, frequency_features
from .synth import SynthSpec, render_corpus, synthesize

__all__ = [
    "AudioClip", "CanonicalClip", "decode_wav", "encode_wav", "load_audio",
    "mixdown_mono", "peak_normalize", "resample",
    "AudioConfig", "DEFAULT_CONFIG", "FEATURE_NAMES", "FeatureConfig",
    "N_FEATURES", "PipelineConfig", "SpectralConfig",
    "BatchError", "CorpusLayoutError", "DecodeError", "InvalidInput",
    "InvalidSpec", "PipelineError", "SchemaError", "TranscodeFailed",
    "TranscoderUnavailable", "UnsupportedFormat",
    "ClassificationReport", "evaluate", "report_from_predictions", "split_train_test",
    "FeatureVector", "extract_feature_vector", "stft",
    "ForestModel", "Hyperparams", "TrainingSet", "fit", "gini",
    "load_model", "predict", "predict_proba", "save_model",
    "FreqStats", "PeakSet", "Spectrum", "detect_peaks", "fft_forward",
    "freq_stats", "frequency_features",
    "SynthSpec", "render_corpus", "synthesize",
]
