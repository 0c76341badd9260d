"""Partitioned-block frequency-domain functional-link adaptive filter.

Each branch's filter is split into partitions of ``part_len`` taps; the
output is the sum over partitions of (delayed input spectrum) x (partition
weights), so latency drops to one hop regardless of total filter length.
The error spectrum is loop-invariant across partitions and is computed
once per block.

Also provides the per-bin convergence analysis: a Monte-Carlo estimate of
the normalized correlation matrix across partition-delayed spectra of one
frequency bin, and the condition number of the tridiagonal Toeplitz
correlation model for that bin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, InvalidInputError
from .expansions import Expander, ExpansionConfig, ExpansionKind
from .fdaf import WEIGHT_LIMIT, FeatureBranch
from .spectral import constrain_bins


class PartitionedBranch:
    """Bank of parallel partitioned-block frequency-domain branches.

    Partition ``l`` filters the input spectrum from ``l`` hops ago; with
    ``part_len`` taps per partition, partition l therefore covers taps
    [l * part_len, (l+1) * part_len) of the modeled response. ``part_len``
    is ``min(filter_len, hop)``, so a branch no longer than one hop stays a
    single unpartitioned block.
    """

    def __init__(
        self,
        filter_len: int,
        hop: int,
        mu: float,
        forget: float = 0.9,
        reg: float = 1e-6,
        power_init: float = 1e-3,
        constrained: bool = True,
        channels: int = 1,
        n_parts: int | None = None,
    ):
        if filter_len < 1 or hop < 1:
            raise InvalidInputError("filter_len and hop must be positive")
        if not 0.0 < forget <= 1.0:
            raise InvalidInputError(f"forgetting factor must be in (0, 1], got {forget}")
        self.part_len = min(filter_len, hop)
        self.n_parts = n_parts if n_parts is not None else math.ceil(filter_len / self.part_len)
        if self.n_parts < 1:
            raise InvalidInputError("need at least one partition")
        if self.n_parts > 1 and self.part_len != hop:
            raise InvalidInputError("multi-partition branches require part_len == hop")
        self.filter_len = min(filter_len, self.n_parts * self.part_len)
        self.hop = hop
        self.n_fft = self.part_len + hop
        self.mu = mu
        self.forget = forget
        self.reg = reg
        self.constrained = constrained
        self.channels = channels
        n_bins = self.n_fft // 2 + 1
        self.W = np.zeros((channels, self.n_parts, n_bins), dtype=complex)
        self.X_hist = np.zeros((channels, self.n_parts, n_bins), dtype=complex)
        self.power = np.full((channels, n_bins), float(power_init))
        self.frames = np.zeros((channels, self.n_fft))

    def filter_block(self, blocks: np.ndarray) -> np.ndarray:
        """Push one hop per channel; returns the channel-summed output."""
        blocks = np.atleast_2d(np.asarray(blocks, dtype=float))
        if blocks.shape != (self.channels, self.hop):
            raise InvalidInputError(
                f"expected blocks of shape {(self.channels, self.hop)}, got {blocks.shape}"
            )
        self.frames = np.concatenate([self.frames[:, self.hop:], blocks], axis=1)
        x0 = np.fft.rfft(self.frames, axis=1)
        self.X_hist = np.roll(self.X_hist, 1, axis=1)
        self.X_hist[:, 0, :] = x0
        y_bins = np.sum(self.X_hist * self.W, axis=(0, 1))
        return np.fft.irfft(y_bins, n=self.n_fft)[-self.hop:]

    def adapt(self, e_block: np.ndarray) -> None:
        """Update every partition from the shared error block."""
        x0 = self.X_hist[:, 0, :]
        # per-sample bin power with the same current-block floor as
        # FreqBranch.adapt
        inst = np.abs(x0) ** 2 / self.n_fft
        self.power = self.forget * self.power + (1.0 - self.forget) * inst
        # normalize by the power the joint update mixes: channel sum times
        # the partition count (the delay line feeds every partition)
        if self.channels > 1:
            denom = self.n_parts * np.maximum(
                np.sum(self.power, axis=0), np.sum(inst, axis=0)
            )[None, :]
        else:
            denom = self.n_parts * np.maximum(self.power, inst)
        e_pad = np.zeros(self.n_fft)
        e_pad[-self.hop:] = e_block
        E = np.fft.rfft(e_pad)
        mu_bins = self.mu / (self.reg + denom)
        grad = mu_bins[:, None, :] * np.conj(self.X_hist) * E
        if self.constrained:
            grad = constrain_bins(grad, self.part_len, self.n_fft)
        self.W += grad
        if not np.all(np.isfinite(self.W)) or np.max(np.abs(self.W)) > WEIGHT_LIMIT:
            raise DivergenceError("partitioned weights diverged")

    def time_weights(self) -> np.ndarray:
        """(channels, filter_len) time-domain image of the partitions."""
        parts = np.fft.irfft(self.W, n=self.n_fft, axis=2)[:, :, : self.part_len]
        return parts.reshape(self.channels, -1)[:, : self.filter_len]

    def set_time_weights(self, taps: np.ndarray) -> None:
        taps = np.atleast_2d(np.asarray(taps, dtype=float))
        total = self.n_parts * self.part_len
        if taps.shape[0] != self.channels or taps.shape[1] > total:
            raise InvalidInputError(f"cannot load taps of shape {taps.shape}")
        padded = np.zeros((self.channels, total))
        padded[:, : taps.shape[1]] = taps
        chunks = padded.reshape(self.channels, self.n_parts, self.part_len)
        framed = np.zeros((self.channels, self.n_parts, self.n_fft))
        framed[:, :, : self.part_len] = chunks
        self.W = np.fft.rfft(framed, axis=2)


class PbFdFlaf:
    """Partitioned-block frequency-domain split functional-link filter."""

    def __init__(
        self,
        m_lin: int,
        hop: int,
        expansion: ExpansionConfig | None = None,
        mu_lin: float = 0.01,
        mu_nl: float = 0.001,
        forget: float = 0.9,
        reg: float = 1e-6,
        power_init: float = 1e-3,
        constrained: bool = True,
        n_partitions: int | None = None,
    ):
        self.hop = hop
        self.lin = PartitionedBranch(
            m_lin, hop, mu_lin, forget, reg, power_init, constrained, n_parts=n_partitions
        )
        self.expander: Expander | None = None
        self.nl: PartitionedBranch | None = None
        self.features: FeatureBranch | None = None
        self.skipped = 0
        if expansion is not None:
            self.expander = Expander(expansion)
            if expansion.kind == ExpansionKind.RANDOM_VECTOR:
                self.features = FeatureBranch(
                    expansion.feature_len, mu_nl, forget, reg, power_init,
                    bias=self.expander.rv_bias,
                )
            else:
                self.nl = PartitionedBranch(
                    expansion.input_len,
                    hop,
                    mu_nl,
                    forget,
                    reg,
                    power_init,
                    constrained,
                    channels=expansion.channels,
                )

    def process_block(self, x_block: np.ndarray, d_block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Filter one hop of input against the desired block; returns (y, e)."""
        x_block = np.asarray(x_block, dtype=float)
        d_block = np.asarray(d_block, dtype=float)
        if x_block.shape != (self.hop,) or d_block.shape != (self.hop,):
            raise InvalidInputError(f"blocks must have length {self.hop}")
        if not (np.all(np.isfinite(x_block)) and np.all(np.isfinite(d_block))):
            self.skipped += 1
            return np.zeros(self.hop), np.zeros(self.hop)

        frame = self.expander.expand_block(x_block) if self.expander else None
        y = self.lin.filter_block(x_block[None, :])
        if self.nl is not None:
            y = y + self.nl.filter_block(frame.channels)
        if self.features is not None:
            y = y + self.features.filter_block(frame.feature_matrix())
        e = d_block - y

        self.lin.adapt(e)
        if self.nl is not None:
            self.nl.adapt(e)
        if self.features is not None:
            self.features.adapt(e)
        self._maybe_adapt_ae(e)
        return y, e

    def equivalent_time_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Time-domain (w_lin, w_nl) with w_nl in interleaved channel order."""
        w_lin = self.lin.time_weights()[0]
        if self.nl is not None:
            w_nl = self.nl.time_weights().T.ravel()
        elif self.features is not None:
            w_nl = self.features.w.copy()
        else:
            w_nl = np.zeros(0)
        return w_lin, w_nl

    def _maybe_adapt_ae(self, e_block: np.ndarray) -> None:
        if (
            self.expander is not None
            and self.expander.config.kind == ExpansionKind.ADAPTIVE_EXPONENTIAL
            and self.expander.config.ae_step > 0.0
        ):
            _, w_nl = self.equivalent_time_weights()
            self.expander.ae_adapt(
                self.expander.recent_inputs(), float(np.mean(e_block)), w_nl
            )


@dataclass
class AnalysisReport:
    """Per-bin correlation structure across partition-delayed spectra."""

    corr: np.ndarray
    alpha_est: complex
    cond: float


def estimate_bin_correlation(
    x: np.ndarray, m_len: int, hop: int, n_parts: int, bin_index: int, n_blocks: int
) -> AnalysisReport:
    """Monte-Carlo estimate of the normalized per-bin correlation matrix.

    Frames of ``m_len + hop`` samples advance by ``hop``; successive
    partitions see spectra spaced ``m_len / hop`` hops apart (one partition
    length). The estimate averages outer products of the stacked bin values
    over ``n_blocks`` frames, normalizes symmetrically to unit diagonal,
    and reports the mean first off-diagonal and the condition number.
    """
    x = np.asarray(x, dtype=float)
    if m_len % hop != 0:
        raise InvalidInputError(f"hop {hop} must divide partition length {m_len}")
    if n_blocks < 4 * n_parts:
        raise InvalidInputError(f"need n_blocks >> n_parts, got {n_blocks} vs {n_parts}")
    p = m_len // hop
    n_fft = m_len + hop
    n_bins = n_fft // 2 + 1
    if not 0 <= bin_index < n_bins:
        raise InvalidInputError(f"bin {bin_index} out of range for n_fft={n_fft}")
    n_frames = n_blocks + p * (n_parts - 1)
    need = (n_frames - 1) * hop + n_fft
    if x.size < need:
        raise InvalidInputError(f"stream too short: need {need} samples, got {x.size}")

    idx = np.arange(n_frames)[:, None] * hop + np.arange(n_fft)[None, :]
    basis = np.exp(-2j * np.pi * bin_index * np.arange(n_fft) / n_fft)
    v = x[idx] @ basis
    start = p * (n_parts - 1)
    rows = np.stack(
        [v[start - p * l: start - p * l + n_blocks] for l in range(n_parts)], axis=1
    )
    r_mat = (rows[:, :, None] * rows[:, None, :].conj()).mean(axis=0)
    d = np.sqrt(np.real(np.diag(r_mat)))
    corr = r_mat / np.outer(d, d)
    np.fill_diagonal(corr, 1.0)
    if n_parts > 1:
        alpha = complex(np.mean(np.diagonal(corr, offset=1)))
    else:
        alpha = 0.0 + 0.0j
    herm = 0.5 * (corr + corr.conj().T)
    eigs = np.linalg.eigvalsh(herm)
    if eigs.min() <= 0:
        raise InvalidInputError("estimated correlation matrix is not positive definite")
    return AnalysisReport(corr=corr, alpha_est=alpha, cond=float(eigs.max() / eigs.min()))


def tridiag_condition(n_parts: int, alpha: complex) -> float:
    """Condition number of the unit-diagonal tridiagonal Toeplitz matrix
    with off-diagonal ``alpha``.

    Uses the closed-form eigenvalues 1 + 2|alpha| cos(k pi / (n_parts+1));
    depends on alpha only through its magnitude.
    """
    if n_parts < 1:
        raise InvalidInputError("n_parts must be >= 1")
    a = abs(alpha)
    if n_parts == 1:
        return 1.0
    k = np.arange(1, n_parts + 1)
    eigs = 1.0 + 2.0 * a * np.cos(k * np.pi / (n_parts + 1))
    lo, hi = eigs.min(), eigs.max()
    if lo <= 0.0:
        raise InvalidInputError(
            f"tridiagonal matrix singular or indefinite for |alpha|={a}, n_parts={n_parts}"
        )
    return float(hi / lo)
