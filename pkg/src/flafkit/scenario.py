"""Simulated loudspeaker-enclosure-microphone scenarios.

Builds paired (far-end x, microphone d) streams: a source signal (white,
AR(1)-colored, or a WAV file) is volume-scheduled, pushed through a
memoryless distortion modeling loudspeaker saturation, convolved with a
synthetic room impulse response, and mixed with white noise at a target
SNR. Everything is deterministic given the configured seeds.
"""
from __future__ import annotations

import math
import wave
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import signal

from .errors import ConfigError, InvalidInputError


class SourceKind(str, Enum):
    WHITE = "white"
    AR1 = "ar1"
    WAV = "wav"


class NonlinearityKind(str, Enum):
    NONE = "none"
    SOFT_CLIP = "soft-clip"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class RirSpec:
    """Synthetic room impulse response: seeded noise under an exponential
    decay envelope, with a dominant direct-path tap, energy-normalized.

    ``drr_db`` sets the direct-to-reverberant energy ratio; 0 dB (equal
    energy in the direct tap and the tail) is typical of a close-range
    teleconferencing setup.
    """

    t60_ms: float = 150.0
    length: int = 300
    fs: int = 8000
    seed: int = 0
    drr_db: float = 0.0

    def __post_init__(self):
        if self.length < 1:
            raise ConfigError("RIR length must be >= 1")
        if self.t60_ms <= 0 or self.fs <= 0:
            raise ConfigError("t60_ms and fs must be positive")


@dataclass(frozen=True)
class ScenarioConfig:
    source: SourceKind = SourceKind.WHITE
    ar1_alpha: float = 0.8
    wav_path: str | None = None
    nonlinearity: NonlinearityKind = NonlinearityKind.NONE
    zeta: float = 0.2
    rir: RirSpec = field(default_factory=RirSpec)
    snr_db: float = 20.0
    duration_samples: int = 8000
    seed: int = 0
    volume_schedule: tuple[tuple[int, float], ...] | None = None
    drive_rms: float | None = None

    def __post_init__(self):
        if self.nonlinearity == NonlinearityKind.SOFT_CLIP and not 0.0 < self.zeta <= 0.5:
            raise ConfigError(f"soft-clip threshold must be in (0, 0.5], got {self.zeta}")
        if self.source == SourceKind.AR1 and not abs(self.ar1_alpha) < 1.0:
            raise ConfigError(f"AR(1) coefficient must satisfy |alpha| < 1, got {self.ar1_alpha}")
        if self.source == SourceKind.WAV and not self.wav_path:
            raise ConfigError("wav source requires wav_path")
        if self.duration_samples < 1:
            raise ConfigError("duration_samples must be >= 1")
        if not (math.isfinite(self.snr_db) or self.snr_db == math.inf):
            raise ConfigError("snr_db must be finite or +inf")
        if self.drive_rms is not None and not 0.0 < self.drive_rms <= 1.0:
            raise ConfigError(f"drive_rms must be in (0, 1], got {self.drive_rms}")


@dataclass
class ScenarioStream:
    """Paired far-end / microphone streams plus the ground-truth plant."""

    x: np.ndarray
    d: np.ndarray
    echo: np.ndarray
    rir: np.ndarray
    fs: int

    def blocks(self, hop: int):
        """Yield aligned (x_block, d_block) hops, dropping any tail
        shorter than ``hop``."""
        n = (len(self.x) // hop) * hop
        for start in range(0, n, hop):
            yield self.x[start: start + hop], self.d[start: start + hop]


def soft_clip(x, zeta: float):
    """Symmetric soft-clipping saturation with threshold ``zeta``.

    Linear slope 2/(3 zeta) up to |x| = zeta, a quadratic knee up to
    2 zeta, hard saturation at +-1 beyond; odd symmetric, and inputs past
    |x| = 1 are treated as |x| = 1.
    """
    if not 0.0 < zeta <= 0.5:
        raise ConfigError(f"soft-clip threshold must be in (0, 0.5], got {zeta}")
    x = np.asarray(x, dtype=float)
    ax = np.minimum(np.abs(x), 1.0)
    out = np.where(
        ax <= zeta,
        2.0 * ax / (3.0 * zeta),
        np.where(ax <= 2.0 * zeta, (3.0 - (2.0 - ax / zeta) ** 2) / 3.0, 1.0),
    )
    result = np.sign(x) * out
    return result if result.ndim else float(result)


def composite_nl(x_now, x_lag4):
    """Composite memory-4 distortion: a cubed-sine term of the current
    sample plus a cosine term of the sample four steps back."""
    x_now = np.asarray(x_now, dtype=float)
    x_lag4 = np.asarray(x_lag4, dtype=float)
    denom = x_now**3 + 2.0
    if np.any(denom == 0.0):
        raise InvalidInputError("composite nonlinearity undefined at x^3 = -2")
    out = (
        0.6 * np.sin(np.pi * x_now - 2.0 / denom) ** 3
        - 0.1 * np.cos(4.0 * np.pi * x_lag4)
        + 1.125
    )
    return out if out.ndim else float(out)


def ar1_colorize(white: np.ndarray, alpha: float) -> np.ndarray:
    """First-order autoregressive coloring with unit-variance gain
    sqrt(1 - alpha^2); y[-1] = 0."""
    if not abs(alpha) < 1.0:
        raise ConfigError(f"AR(1) coefficient must satisfy |alpha| < 1, got {alpha}")
    white = np.asarray(white, dtype=float)
    gain = math.sqrt(1.0 - alpha * alpha)
    return signal.lfilter([gain], [1.0, -alpha], white)


def generate_rir(spec: RirSpec) -> np.ndarray:
    """Synthetic room impulse response per :class:`RirSpec`."""
    rng = np.random.default_rng(spec.seed)
    n = np.arange(spec.length)
    t60_samples = spec.fs * spec.t60_ms / 1000.0
    envelope = 10.0 ** (-3.0 * n / t60_samples)
    h = rng.standard_normal(spec.length) * envelope
    h[0] = 0.0
    tail_energy = float(np.sum(h**2))
    if tail_energy > 0.0:
        # scale the reverberant tail so the unit direct tap carries the
        # configured share of the total energy
        h *= math.sqrt(10.0 ** (-spec.drr_db / 10.0) / tail_energy)
    h[0] = 1.0
    return h / np.linalg.norm(h)


def read_wav_mono(path: str, fs: int) -> np.ndarray:
    """Load a 16-bit PCM mono WAV at the expected sample rate, in [-1, 1)."""
    try:
        with wave.open(path, "rb") as wf:
            if wf.getnchannels() != 1:
                raise ConfigError(f"{path}: expected mono audio")
            if wf.getsampwidth() != 2:
                raise ConfigError(f"{path}: expected 16-bit PCM")
            if wf.getframerate() != fs:
                raise ConfigError(
                    f"{path}: sample rate {wf.getframerate()} != scenario rate {fs}"
                )
            raw = wf.readframes(wf.getnframes())
    except (OSError, wave.Error) as exc:
        raise ConfigError(f"cannot read WAV file {path}: {exc}") from exc
    return np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0


def run_scenario(config: ScenarioConfig) -> ScenarioStream:
    """Generate the paired (x, d) streams for one scenario."""
    rng = np.random.default_rng(config.seed)
    n = config.duration_samples

    if config.source == SourceKind.WHITE:
        src = rng.standard_normal(n)
    elif config.source == SourceKind.AR1:
        src = ar1_colorize(rng.standard_normal(n), config.ar1_alpha)
    else:
        src = read_wav_mono(config.wav_path, config.rir.fs)
        if src.size < n:
            raise ConfigError(
                f"{config.wav_path}: {src.size} samples, scenario needs {n}"
            )
        src = src[:n]
    # Normalize into the [-1, 1] operating range: either to peak, or to a
    # target drive level with hard limiting (stronger loudspeaker drive).
    if config.drive_rms is not None:
        rms = float(np.sqrt(np.mean(src**2)))
        if rms > 0:
            src = np.clip(src * (config.drive_rms / rms), -1.0, 1.0)
    else:
        peak = np.max(np.abs(src))
        if peak > 0:
            src = src / peak

    x = src.copy()
    if config.volume_schedule:
        sched = sorted(config.volume_schedule)
        for i, (start, gain) in enumerate(sched):
            stop = sched[i + 1][0] if i + 1 < len(sched) else n
            x[start:stop] *= gain

    if config.nonlinearity == NonlinearityKind.SOFT_CLIP:
        distorted = soft_clip(x, config.zeta)
    elif config.nonlinearity == NonlinearityKind.COMPOSITE:
        lagged = np.concatenate([np.zeros(4), x])[:n]
        distorted = composite_nl(x, lagged)
    else:
        distorted = x

    h = generate_rir(config.rir)
    echo = signal.fftconvolve(distorted, h)[:n]

    if config.snr_db == math.inf:
        noise = np.zeros(n)
    else:
        echo_power = float(np.mean(echo**2))
        noise_power = echo_power / (10.0 ** (config.snr_db / 10.0))
        noise = rng.standard_normal(n) * math.sqrt(noise_power)

    return ScenarioStream(x=x, d=echo + noise, echo=echo, rir=h, fs=config.rir.fs)
