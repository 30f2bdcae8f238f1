"""Deterministic synthesis of labeled test audio.

The DD class is covered by binaural beats (a slightly different carrier in
each ear) and isochronic tones (a single carrier gated on and off at a
regular rate). The NDD class is covered by music surrogates: seeded chord
progressions of harmonic-rich tones plus low-level noise, and single musical
tones with vibrato. Everything is a pure function of its SynthSpec, so
corpora re-render byte-identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import AudioClip, encode_wav
from .errors import InvalidSpec

KIND_BINAURAL = "binaural"
KIND_ISOCHRONIC = "isochronic"
KIND_TONE = "tone"
KIND_MUSIC_SURROGATE = "music_surrogate"
KIND_NOISE = "noise"

_KINDS = (KIND_BINAURAL, KIND_ISOCHRONIC, KIND_TONE, KIND_MUSIC_SURROGATE, KIND_NOISE)

# Raised-cosine ramp length applied to isochronic gate edges; prevents
# broadband clicks that would make the class separable by artifacts alone.
_GATE_RAMP_S = 0.005


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic signal."""

    kind: str
    carrier_hz: float = 440.0
    beat_hz: float = 0.0
    duration_s: float = 3.0
    sample_rate: int = 22050
    amplitude: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}")
        if self.duration_s <= 0:
            raise InvalidSpec(f"duration must be positive, got {self.duration_s}")
        if not 0 < self.amplitude <= 1:
            raise InvalidSpec(f"amplitude must be in (0, 1], got {self.amplitude}")
        if self.kind in (KIND_BINAURAL, KIND_ISOCHRONIC) and not 0 < self.beat_hz < self.carrier_hz:
            raise InvalidSpec(
                f"{self.kind} requires 0 < beat_hz < carrier_hz, got beat={self.beat_hz} carrier={self.carrier_hz}"
            )

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.sample_rate))


def _time_axis(spec: SynthSpec) -> np.ndarray:
    return np.arange(spec.n_samples, dtype=np.float64) / spec.sample_rate


def synth_binaural(spec: SynthSpec) -> AudioClip:
    """Stereo clip: carrier in the left ear, carrier + beat in the right."""
    if spec.kind != KIND_BINAURAL:
        raise InvalidSpec(f"expected kind={KIND_BINAURAL!r}, got {spec.kind!r}")
    t = _time_axis(spec)
    left = spec.amplitude * np.sin(2 * np.pi * spec.carrier_hz * t)
    right = spec.amplitude * np.sin(2 * np.pi * (spec.carrier_hz + spec.beat_hz) * t)
    return AudioClip(samples=np.stack([left, right]), sample_rate=spec.sample_rate)


def synth_isochronic(spec: SynthSpec) -> AudioClip:
    """Mono clip: carrier sine gated by a 50%-duty square wave at beat_hz.

    Gate edges are smoothed by a raised-cosine ramp (5 ms, shortened when the
    on-phase is too brief to fit two ramps).
    """
    if spec.kind != KIND_ISOCHRONIC:
        raise InvalidSpec(f"expected kind={KIND_ISOCHRONIC!r}, got {spec.kind!r}")
    t = _time_axis(spec)
    period = 1.0 / spec.beat_hz
    half = period / 2.0
    ramp = min(_GATE_RAMP_S, half / 2.0)
    phase = np.mod(t, period)
    gate = np.zeros_like(t)
    rising = phase < ramp
    flat = (phase >= ramp) & (phase < half - ramp)
    falling = (phase >= half - ramp) & (phase < half)
    gate[rising] = 0.5 * (1.0 - np.cos(np.pi * phase[rising] / ramp))
    gate[flat] = 1.0
    gate[falling] = 0.5 * (1.0 - np.cos(np.pi * (half - phase[falling]) / ramp))
    mono = spec.amplitude * np.sin(2 * np.pi * spec.carrier_hz * t) * gate
    return AudioClip(samples=mono[None, :], sample_rate=spec.sample_rate)


def _equal_tempered_hz(midi_note) -> np.ndarray:
    return 440.0 * 2.0 ** ((np.asarray(midi_note, dtype=np.float64) - 69.0) / 12.0)


def _scale_to_amplitude(x: np.ndarray, amplitude: float) -> np.ndarray:
    peak = np.max(np.abs(x))
    if peak == 0.0:
        return x
    return np.clip(x * (amplitude / peak), -amplitude, amplitude)


def synth_tone(spec: SynthSpec) -> AudioClip:
    """Mono musical tone: harmonic series on the carrier with gentle vibrato.

    Harmonic count, decay, vibrato rate and depth derive from the seed.
    """
    if spec.kind != KIND_TONE:
        raise InvalidSpec(f"expected kind={KIND_TONE!r}, got {spec.kind!r}")
    rng = np.random.default_rng(spec.seed)
    t = _time_axis(spec)
    vib_rate = rng.uniform(4.0, 7.0)
    vib_dev = spec.carrier_hz * rng.uniform(0.005, 0.02)
    n_harmonics = int(rng.integers(3, 6))
    decay = rng.uniform(0.8, 1.5)
    # Phase modulation with index vib_dev/vib_rate gives a peak frequency
    # deviation of vib_dev Hz on the fundamental.
    phase = 2 * np.pi * spec.carrier_hz * t + (vib_dev / vib_rate) * np.sin(2 * np.pi * vib_rate * t)
    mono = np.zeros_like(t)
    for h in range(1, n_harmonics + 1):
        mono += np.sin(h * phase + rng.uniform(0, 2 * np.pi)) / h**decay
    return AudioClip(samples=_scale_to_amplitude(mono, spec.amplitude)[None, :], sample_rate=spec.sample_rate)


def synth_noise(spec: SynthSpec) -> AudioClip:
    """Mono pink-ish noise (spectrum shaped by 1/sqrt(f))."""
    if spec.kind != KIND_NOISE:
        raise InvalidSpec(f"expected kind={KIND_NOISE!r}, got {spec.kind!r}")
    rng = np.random.default_rng(spec.seed)
    mono = _pinkish_noise(rng, spec.n_samples)
    return AudioClip(samples=_scale_to_amplitude(mono, spec.amplitude)[None, :], sample_rate=spec.sample_rate)


def _pinkish_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    white = rng.standard_normal(n)
    shaped = np.fft.rfft(white)
    bins = np.arange(shaped.size, dtype=np.float64)
    shaped /= np.sqrt(np.maximum(bins, 1.0))
    return np.fft.irfft(shaped, n=n)


def synth_music_surrogate(spec: SynthSpec) -> AudioClip:
    """Mono chord progression standing in for real music.

    4-8 segments, each a chord of 3-5 harmonic-rich equal-tempered tones with
    varied amplitudes, plus noise 30 dB below the tones. Deterministic per seed.
    """
    if spec.kind != KIND_MUSIC_SURROGATE:
        raise InvalidSpec(f"expected kind={KIND_MUSIC_SURROGATE!r}, got {spec.kind!r}")
    rng = np.random.default_rng(spec.seed)
    n = spec.n_samples
    rate = spec.sample_rate
    n_segments = int(rng.integers(4, 9))
    bounds = np.linspace(0, n, n_segments + 1).astype(np.int64)
    mono = np.zeros(n, dtype=np.float64)
    edge = max(1, int(round(_GATE_RAMP_S * rate)))
    for seg in range(n_segments):
        start, stop = bounds[seg], bounds[seg + 1]
        length = stop - start
        if length <= 0:
            continue
        t = np.arange(length, dtype=np.float64) / rate
        chord = np.zeros(length, dtype=np.float64)
        notes = rng.integers(45, 81, size=int(rng.integers(3, 6)))
        for note in notes:
            f0 = float(_equal_tempered_hz(note))
            gain = rng.uniform(0.3, 1.0)
            n_harmonics = int(rng.integers(2, 6))
            for h in range(1, n_harmonics + 1):
                if h * f0 >= rate / 2:
                    break
                chord += gain * np.sin(2 * np.pi * h * f0 * t + rng.uniform(0, 2 * np.pi)) / h
        fade = min(edge, length // 2)
        if fade > 0:
            envelope = np.ones(length)
            envelope[:fade] = 0.5 * (1 - np.cos(np.pi * np.arange(fade) / fade))
            envelope[length - fade :] = envelope[:fade][::-1]
            chord *= envelope
        mono[start:stop] = chord
    peak = np.max(np.abs(mono))
    if peak > 0:
        noise = _pinkish_noise(rng, n)
        noise_peak = np.max(np.abs(noise))
        if noise_peak > 0:
            mono += noise * (peak * 10 ** (-30 / 20) / noise_peak)
    return AudioClip(samples=_scale_to_amplitude(mono, spec.amplitude)[None, :], sample_rate=spec.sample_rate)


_SYNTHESIZERS = {
    KIND_BINAURAL: synth_binaural,
    KIND_ISOCHRONIC: synth_isochronic,
    KIND_TONE: synth_tone,
    KIND_MUSIC_SURROGATE: synth_music_surrogate,
    KIND_NOISE: synth_noise,
}


def synthesize(spec: SynthSpec) -> AudioClip:
    """Dispatch to the generator for spec.kind."""
    return _SYNTHESIZERS[spec.kind](spec)


_LABEL_IDS = {"NDD": 0, "DD": 1}


def _file_seed(master_seed: int, label: str, index: int) -> int:
    # Schedule-independent per-file stream: files can render in any order.
    seq = np.random.SeedSequence([master_seed, _LABEL_IDS[label], index])
    return int(seq.generate_state(1)[0])


def _dd_spec(master_seed: int, index: int, sample_rate: int) -> SynthSpec:
    seed = _file_seed(master_seed, "DD", index)
    rng = np.random.default_rng(seed)
    kind = KIND_BINAURAL if index % 2 == 0 else KIND_ISOCHRONIC
    return SynthSpec(
        kind=kind,
        carrier_hz=float(rng.uniform(100.0, 800.0)),
        beat_hz=float(rng.uniform(1.0, 30.0)),
        duration_s=float(rng.uniform(2.5, 4.0)),
        sample_rate=sample_rate,
        amplitude=float(rng.uniform(0.5, 0.9)),
        seed=seed,
    )


def _ndd_spec(master_seed: int, index: int, sample_rate: int) -> SynthSpec:
    seed = _file_seed(master_seed, "NDD", index)
    rng = np.random.default_rng(seed)
    kind = KIND_MUSIC_SURROGATE if index % 2 == 0 else KIND_TONE
    return SynthSpec(
        kind=kind,
        carrier_hz=float(_equal_tempered_hz(int(rng.integers(57, 94)))),
        duration_s=float(rng.uniform(2.5, 4.0)),
        sample_rate=sample_rate,
        amplitude=float(rng.uniform(0.5, 0.9)),
        seed=seed,
    )


def render_corpus(
    out_dir: str | Path,
    n_per_class: int,
    seed: int,
    sample_rate: int = 22050,
) -> list[tuple[Path, str]]:
    """Write a two-class WAV corpus under out_dir/DD and out_dir/NDD.

    DD alternates binaural and isochronic signals (carriers 100-800 Hz, beats
    1-30 Hz); NDD alternates music surrogates and vibrato tones. Files are
    16-bit WAV at sample_rate. Returns (path, label) pairs in write order.

    Rendering is a pure function of (n_per_class, seed): reruns are
    byte-identical.
    """
    out_dir = Path(out_dir)
    manifest: list[tuple[Path, str]] = []
    for label, make_spec in (("DD", _dd_spec), ("NDD", _ndd_spec)):
        class_dir = out_dir / label
        class_dir.mkdir(parents=True, exist_ok=True)
        for index in range(n_per_class):
            spec = make_spec(seed, index, sample_rate)
            clip = synthesize(spec)
            path = class_dir / f"{label.lower()}_{index:05d}_{spec.kind}.wav"
            try:
                path.write_bytes(encode_wav(clip, bit_depth=16))
            except OSError as exc:
                raise OSError(f"failed to write corpus file {path}: {exc}") from exc
            manifest.append((path, label))
    return manifest
