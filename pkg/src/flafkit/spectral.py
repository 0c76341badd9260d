"""Real-input block transform engine.

Forward/inverse transforms on the half-spectrum of a real signal,
overlap-save fast convolution, and the gradient-constraint projection
shared by the frequency-domain adaptive filters.

Convention: unscaled forward transform, 1/N on the inverse
(numpy.fft.rfft / irfft), so inverse(forward(x)) == x.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


@dataclass
class Spectrum:
    """Half-spectrum of a real length-``n_fft`` signal."""

    bins: np.ndarray
    n_fft: int

    def __post_init__(self):
        if self.bins.shape[-1] != self.n_fft // 2 + 1:
            raise InvalidInputError(
                f"expected {self.n_fft // 2 + 1} bins for n_fft={self.n_fft}, "
                f"got {self.bins.shape[-1]}"
            )

    def copy(self) -> "Spectrum":
        return Spectrum(self.bins.copy(), self.n_fft)


def forward(x: np.ndarray, n_fft: int | None = None) -> Spectrum:
    """Half-spectrum of a real block of exactly ``n_fft`` samples."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] if n_fft is None else n_fft
    if x.shape[-1] != n:
        raise InvalidInputError(f"expected block of length {n}, got {x.shape[-1]}")
    return Spectrum(np.fft.rfft(x), n)


def inverse(spec: Spectrum) -> np.ndarray:
    """Real time-domain signal of length ``n_fft``."""
    return np.fft.irfft(spec.bins, n=spec.n_fft)


def gradient_constrain(g: Spectrum, keep: int) -> Spectrum:
    """Zero the time-domain image of ``g`` beyond the first ``keep`` samples.

    This is the aliasing-suppression projection applied to frequency-domain
    gradients; it is idempotent, and the identity when ``keep == n_fft``.
    """
    if keep > g.n_fft:
        raise InvalidInputError(f"keep={keep} exceeds n_fft={g.n_fft}")
    if keep == g.n_fft:
        return g.copy()
    return Spectrum(constrain_bins(g.bins, keep, g.n_fft), g.n_fft)


def constrain_bins(bins: np.ndarray, keep: int, n_fft: int) -> np.ndarray:
    """Array form of :func:`gradient_constrain`; broadcasts over leading axes."""
    t = np.fft.irfft(bins, n=n_fft)
    t[..., keep:] = 0.0
    return np.fft.rfft(t)


@dataclass
class OverlapSaveBuffer:
    """Sliding input frame for overlap-save convolution.

    Holds the last ``n_fft`` input samples; each new hop of ``hop`` samples
    shifts the frame left by exactly ``hop``.
    """

    filter_len: int
    hop: int
    n_fft: int | None = None
    history: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.n_fft is None:
            self.n_fft = self.filter_len + self.hop
        if self.n_fft < self.filter_len + self.hop:
            raise InvalidInputError(
                f"n_fft={self.n_fft} too small for filter_len={self.filter_len}, hop={self.hop}"
            )
        if self.history is None:
            self.history = np.zeros(self.n_fft)

    def push(self, new_block: np.ndarray) -> np.ndarray:
        """Shift in one hop of samples; returns the current frame."""
        new_block = np.asarray(new_block, dtype=float)
        if new_block.shape != (self.hop,):
            raise InvalidInputError(f"expected block of length {self.hop}, got {new_block.shape}")
        self.history = np.concatenate([self.history[self.hop:], new_block])
        return self.history


def os_convolve(buf: OverlapSaveBuffer, w: Spectrum, new_block: np.ndarray) -> np.ndarray:
    """One overlap-save step: returns the ``hop`` newest output samples.

    ``w`` must be the transform of a zero-padded filter of at most
    ``buf.filter_len`` taps; the returned samples then equal linear
    convolution of the input stream with that filter.
    """
    if w.n_fft != buf.n_fft:
        raise InvalidInputError(f"filter n_fft {w.n_fft} != buffer n_fft {buf.n_fft}")
    frame = buf.push(new_block)
    y = np.fft.irfft(np.fft.rfft(frame) * w.bins, n=buf.n_fft)
    return y[-buf.hop:]


def filter_spectrum(taps: np.ndarray, n_fft: int) -> Spectrum:
    """Transform of a zero-padded FIR filter."""
    taps = np.asarray(taps, dtype=float)
    if taps.size > n_fft:
        raise InvalidInputError(f"{taps.size} taps do not fit in n_fft={n_fft}")
    padded = np.zeros(n_fft)
    padded[: taps.size] = taps
    return forward(padded)
