"""Audio decoding and canonicalization.

Native RIFF/WAVE decode (integer PCM 8/16/24/32 and float32), channel
mixdown, windowed-sinc resampling and peak normalization. Every analysis
stage downstream consumes the canonical form produced here: mono, fixed
sample rate, max |x| <= 1.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ACCEPTED_EXTENSIONS, AudioConfig
from .errors import (
    DecodeError,
    InvalidInput,
    TranscodeFailed,
    TranscoderUnavailable,
    UnsupportedFormat,
)

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE

# Full-scale magnitude per integer bit depth; the most negative code maps
# to exactly -1.0.
_INT_SCALE = {8: 128, 16: 32768, 24: 8388608, 32: 2147483648}


@dataclass(frozen=True)
class AudioClip:
    """Decoded PCM audio: samples shaped (channels, n), float64 in ~[-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.samples.ndim != 2:
            raise InvalidInput(f"samples must be (channels, n), got shape {self.samples.shape}")
        if self.sample_rate <= 0:
            raise InvalidInput(f"sample rate must be positive, got {self.sample_rate}")

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate


@dataclass(frozen=True)
class CanonicalClip:
    """Mono clip at the canonical rate, peak-normalized. samples is 1-D."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.samples.ndim != 1:
            raise InvalidInput(f"canonical samples must be 1-D, got shape {self.samples.shape}")
        if self.sample_rate <= 0:
            raise InvalidInput(f"sample rate must be positive, got {self.sample_rate}")


def decode_wav(data: bytes) -> AudioClip:
    """Decode a RIFF/WAVE container.

    Supports integer PCM at 8/16/24/32 bits and 32-bit float, 1-2 channels.
    Integer samples are scaled to [-1, 1] by the type's maximum magnitude.

    Raises:
        DecodeError: malformed container or non-finite float samples.
        UnsupportedFormat: unknown codec tag, bit depth or channel count.
    """
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise DecodeError("not a RIFF/WAVE container")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        size = int.from_bytes(data[pos + 4 : pos + 8], "little")
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise DecodeError(f"truncated {chunk_id!r} chunk: expected {size} bytes, got {len(body)}")
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise DecodeError("missing fmt chunk")
    if payload is None:
        raise DecodeError("missing data chunk")

    codec, channels, rate, bits = fmt
    if channels < 1 or channels > 2:
        raise UnsupportedFormat(f"unsupported channel count {channels}")
    if rate <= 0:
        raise DecodeError(f"invalid sample rate {rate}")

    frame_bytes = channels * (bits // 8)
    payload = payload[: len(payload) - len(payload) % frame_bytes]
    if codec == _WAVE_FORMAT_PCM:
        flat = _decode_int_pcm(payload, bits)
    elif codec == _WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedFormat(f"unsupported float bit depth {bits}")
        flat = np.frombuffer(payload, dtype="<f4").astype(np.float64)
        if not np.isfinite(flat).all():
            raise DecodeError("float samples contain NaN or Inf")
    else:
        raise UnsupportedFormat(f"unsupported codec tag 0x{codec:04x}")

    return AudioClip(samples=flat.reshape(-1, channels).T.copy(), sample_rate=rate)


def _parse_fmt(body: bytes) -> tuple[int, int, int, int]:
    if len(body) < 16:
        raise DecodeError("fmt chunk too short")
    codec = int.from_bytes(body[0:2], "little")
    channels = int.from_bytes(body[2:4], "little")
    rate = int.from_bytes(body[4:8], "little")
    bits = int.from_bytes(body[14:16], "little")
    if codec == _WAVE_FORMAT_EXTENSIBLE:
        # Actual codec is the first two bytes of the SubFormat GUID.
        if len(body) < 26:
            raise DecodeError("extensible fmt chunk too short")
        codec = int.from_bytes(body[24:26], "little")
    return codec, channels, rate, bits


def _decode_int_pcm(payload: bytes, bits: int) -> np.ndarray:
    if bits not in _INT_SCALE:
        raise UnsupportedFormat(f"unsupported PCM bit depth {bits}")
    scale = _INT_SCALE[bits]
    if bits == 8:
        codes = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) - 128.0
    elif bits == 16:
        codes = np.frombuffer(payload, dtype="<i2").astype(np.float64)
    elif bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        codes = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        codes = np.where(codes >= 1 << 23, codes - (1 << 24), codes).astype(np.float64)
    else:
        codes = np.frombuffer(payload, dtype="<i4").astype(np.float64)
    return codes / scale


def encode_wav(clip: AudioClip, bit_depth: int = 16) -> bytes:
    """Encode a clip as RIFF/WAVE (integer PCM or float32 for bit_depth='float').

    Integer encoding rounds x * scale and clips to the code range, so
    decode -> encode at the same depth reproduces the original codes exactly.
    """
    interleaved = clip.samples.T.reshape(-1)
    if bit_depth == "float":
        codec, bits = _WAVE_FORMAT_IEEE_FLOAT, 32
        body = interleaved.astype("<f4").tobytes()
    else:
        if bit_depth not in _INT_SCALE:
            raise InvalidInput(f"unsupported bit depth {bit_depth}")
        codec, bits = _WAVE_FORMAT_PCM, bit_depth
        scale = _INT_SCALE[bit_depth]
        codes = np.round(interleaved * scale)
        if bit_depth == 8:
            body = np.clip(codes + 128, 0, 255).astype(np.uint8).tobytes()
        elif bit_depth == 16:
            body = np.clip(codes, -scale, scale - 1).astype("<i2").tobytes()
        elif bit_depth == 24:
            c = np.clip(codes, -scale, scale - 1).astype(np.int64) & 0xFFFFFF
            packed = np.empty((len(c), 3), dtype=np.uint8)
            packed[:, 0] = c & 0xFF
            packed[:, 1] = (c >> 8) & 0xFF
            packed[:, 2] = (c >> 16) & 0xFF
            body = packed.tobytes()
        else:
            body = np.clip(codes, -scale, scale - 1).astype("<i4").tobytes()

    channels = clip.channels
    block_align = channels * (bits // 8)
    fmt = (
        codec.to_bytes(2, "little")
        + channels.to_bytes(2, "little")
        + clip.sample_rate.to_bytes(4, "little")
        + (clip.sample_rate * block_align).to_bytes(4, "little")
        + block_align.to_bytes(2, "little")
        + bits.to_bytes(2, "little")
    )
    pad = b"\x00" if len(body) % 2 else b""
    riff_size = 4 + 8 + len(fmt) + 8 + len(body) + len(pad)
    return (
        b"RIFF" + riff_size.to_bytes(4, "little") + b"WAVE"
        + b"fmt " + len(fmt).to_bytes(4, "little") + fmt
        + b"data" + len(body).to_bytes(4, "little") + body + pad
    )


def mixdown_mono(clip: AudioClip) -> AudioClip:
    """Average all channels into one; mono input is returned unchanged."""
    if clip.channels == 1:
        return clip
    mono = clip.samples.mean(axis=0, keepdims=True)
    return AudioClip(samples=mono, sample_rate=clip.sample_rate)


def resample(clip: AudioClip, target_rate: int, taps: int = 64) -> AudioClip:
    """Band-limited resampling of a mono clip via windowed-sinc interpolation.

    Output length is round(n * target_rate / input_rate). When downsampling,
    the sinc cutoff drops to the target Nyquist so aliasing is filtered out.
    Equal rates pass the clip through untouched.
    """
    if clip.channels != 1:
        raise InvalidInput("resample expects a mono clip")
    if target_rate <= 0:
        raise InvalidInput(f"target rate must be positive, got {target_rate}")
    if target_rate == clip.sample_rate:
        return clip
    n_in = clip.n_samples
    n_out = int(np.floor(n_in * target_rate / clip.sample_rate + 0.5))
    if n_in == 0 or n_out == 0:
        return AudioClip(samples=np.zeros((1, 0)), sample_rate=target_rate)

    x = clip.samples[0]
    ratio = target_rate / clip.sample_rate
    cutoff = min(1.0, ratio)
    half = taps / 2
    padded = np.concatenate([np.zeros(taps), x, np.zeros(taps)])
    offsets = np.arange(taps)
    out = np.empty(n_out, dtype=np.float64)

    block = 65536
    for start in range(0, n_out, block):
        m = np.arange(start, min(start + block, n_out), dtype=np.float64)
        pos = m * (clip.sample_rate / target_rate)
        k0 = np.floor(pos).astype(np.int64) - taps // 2 + 1
        k = k0[:, None] + offsets[None, :]
        t = k - pos[:, None]
        window = 0.5 + 0.5 * np.cos(np.pi * np.clip(t / half, -1.0, 1.0))
        kernel = cutoff * np.sinc(cutoff * t) * window
        out[start : start + len(m)] = np.sum(padded[k + taps] * kernel, axis=1)

    return AudioClip(samples=out[None, :], sample_rate=target_rate)


def peak_normalize(clip: AudioClip) -> AudioClip:
    """Divide a mono clip by its maximum absolute sample.

    All-zero input is returned unchanged so silent files keep flowing through
    the pipeline. The operation is exactly idempotent.
    """
    if clip.channels != 1:
        raise InvalidInput("peak_normalize expects a mono clip")
    if clip.n_samples == 0:
        return clip
    peak = np.max(np.abs(clip.samples))
    if peak == 0.0:
        return clip
    return AudioClip(samples=clip.samples / peak, sample_rate=clip.sample_rate)


def load_audio(
    source: str | Path | bytes,
    format_hint: str | None = None,
    config: AudioConfig = AudioConfig(),
) -> CanonicalClip:
    """Load any accepted audio format into the canonical analysis form.

    Pipeline order: decode -> mixdown -> resample to the canonical rate ->
    peak normalize. WAV decodes natively; other accepted extensions require
    config.transcoder (a command template that writes WAV to stdout).

    Args:
        source: file path, or raw container bytes (format_hint required).
        format_hint: extension-like format name overriding the path suffix.

    Raises:
        UnsupportedFormat: extension not in the accepted list.
        TranscoderUnavailable / TranscodeFailed: non-WAV handling problems.
        DecodeError: malformed audio.
    """
    if isinstance(source, bytes):
        ext = (format_hint or "wav").lower().lstrip(".")
        data, path = source, None
    else:
        path = Path(source)
        ext = (format_hint or path.suffix).lower().lstrip(".")
        data = None

    if ext not in ACCEPTED_EXTENSIONS:
        raise UnsupportedFormat(f"extension {ext!r} is not one of {ACCEPTED_EXTENSIONS}")

    if ext == "wav":
        wav_bytes = data if data is not None else Path(path).read_bytes()
    else:
        wav_bytes = _transcode_to_wav(data, path, ext, config)

    clip = peak_normalize(
        resample(mixdown_mono(decode_wav(wav_bytes)), config.canonical_rate, config.resample_taps)
    )
    return CanonicalClip(samples=clip.samples[0], sample_rate=clip.sample_rate)


def _transcode_to_wav(data: bytes | None, path: Path | None, ext: str, config: AudioConfig) -> bytes:
    if not config.transcoder:
        raise TranscoderUnavailable(
            f"no transcoder configured for {ext!r} input; set AudioConfig.transcoder"
        )
    if path is None:
        # Transcoders take a file path; spool bytes input to a temp file.
        with tempfile.NamedTemporaryFile(suffix=f".{ext}", delete=False) as tmp:
            tmp.write(data)
            path = Path(tmp.name)
        try:
            return _run_transcoder(config.transcoder, path)
        finally:
            path.unlink(missing_ok=True)
    return _run_transcoder(config.transcoder, path)


def _run_transcoder(template: str, path: Path) -> bytes:
    argv = [tok.replace("{input}", str(path)) for tok in shlex.split(template)]
    try:
        proc = subprocess.run(argv, capture_output=True, check=False)
    except OSError as exc:
        raise TranscodeFailed(f"transcoder failed to start: {exc}") from exc
    if proc.returncode != 0:
        tail = proc.stderr.decode(errors="replace")[-500:]
        raise TranscodeFailed(f"transcoder exited {proc.returncode} for {path}: {tail}")
    return proc.stdout
