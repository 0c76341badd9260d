"""Overlap-save frequency-domain functional-link adaptive filter.

A linear branch of ``m_lin`` taps runs in parallel with the nonlinear
branch. The samplewise expansions give Q per-channel sample streams, each
filtered by its own ``M_i``-tap frequency-domain filter; their summed
output equals the time-domain split filter's block output, and the total
nonlinear parameter count is Q * M_i. The random-vector expansion instead
adapts one instantaneous weight per feature with per-feature power
normalization.

All branches share the hop L, adapt with per-bin normalized step sizes
derived from exponentially averaged bin powers, and (by default) project
each gradient so the filter's time-domain image keeps a zero tail.
"""
from __future__ import annotations

import numpy as np

from .errors import DivergenceError, InvalidInputError
from .expansions import Expander, ExpansionConfig, ExpansionKind
from .spectral import constrain_bins

# Any weight magnitude beyond this is treated as divergence.
WEIGHT_LIMIT = 1e6


class FreqBranch:
    """Bank of parallel overlap-save frequency-domain branches.

    All ``channels`` branches share filter length, hop, and adaptation
    parameters; each keeps its own weights, input frame, and per-bin power
    estimate. ``filter_block`` returns the channel-summed output.
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
    ):
        if filter_len < 1 or hop < 1:
            raise InvalidInputError("filter_len and hop must be positive")
        if not 0.0 < forget <= 1.0:
            raise InvalidInputError(f"forgetting factor must be in (0, 1], got {forget}")
        self.filter_len = filter_len
        self.hop = hop
        self.n_fft = filter_len + hop
        self.mu = mu
        self.forget = forget
        self.reg = reg
        self.constrained = constrained
        self.channels = channels
        n_bins = self.n_fft // 2 + 1
        self.W = np.zeros((channels, n_bins), dtype=complex)
        self.power = np.full((channels, n_bins), float(power_init))
        self.frames = np.zeros((channels, self.n_fft))
        self._X = np.zeros((channels, n_bins), dtype=complex)

    def filter_block(self, blocks: np.ndarray) -> np.ndarray:
        """Push one hop of samples per channel; returns the summed output."""
        blocks = np.atleast_2d(np.asarray(blocks, dtype=float))
        if blocks.shape != (self.channels, self.hop):
            raise InvalidInputError(
                f"expected blocks of shape {(self.channels, self.hop)}, got {blocks.shape}"
            )
        self.frames = np.concatenate([self.frames[:, self.hop:], blocks], axis=1)
        self._X = np.fft.rfft(self.frames, axis=1)
        y = np.fft.irfft(np.sum(self._X * self.W, axis=0), n=self.n_fft)
        return y[-self.hop:]

    def adapt(self, e_block: np.ndarray) -> None:
        """Per-bin normalized update from the shared error block."""
        # B tracks per-sample bin power (|X|^2 / N), the scale on which the
        # published step sizes and the power seed delta are meaningful
        inst = np.abs(self._X) ** 2 / self.n_fft
        self.power = self.forget * self.power + (1.0 - self.forget) * inst
        # The step divides by all the power one update mixes together: the
        # bin power summed over the bank's channels, times the hops of
        # input history the filter spans. The averaged power is floored by
        # the current block's own power, which bounds the per-block step
        # while the average warms up from its seed and during input bursts.
        depth = -(-self.filter_len // self.hop)
        if self.channels > 1:
            denom = depth * np.maximum(
                np.sum(self.power, axis=0), np.sum(inst, axis=0)
            )[None, :]
        else:
            denom = depth * np.maximum(self.power, inst)
        e_pad = np.zeros(self.n_fft)
        e_pad[-self.hop:] = e_block
        E = np.fft.rfft(e_pad)
        grad = (self.mu / (self.reg + denom)) * np.conj(self._X) * E
        if self.constrained:
            grad = constrain_bins(grad, self.filter_len, self.n_fft)
        self.W += grad
        if not np.all(np.isfinite(self.W)) or np.max(np.abs(self.W)) > WEIGHT_LIMIT:
            raise DivergenceError("frequency-domain weights diverged")

    def time_weights(self) -> np.ndarray:
        """(channels, filter_len) time-domain image of the weights."""
        return np.fft.irfft(self.W, n=self.n_fft, axis=1)[:, : self.filter_len]

    def set_time_weights(self, taps: np.ndarray) -> None:
        taps = np.atleast_2d(np.asarray(taps, dtype=float))
        if taps.shape[0] != self.channels or taps.shape[1] > self.filter_len:
            raise InvalidInputError(f"cannot load taps of shape {taps.shape}")
        padded = np.zeros((self.channels, self.n_fft))
        padded[:, : taps.shape[1]] = taps
        self.W = np.fft.rfft(padded, axis=1)


class FeatureBranch:
    """Instantaneous weight layer over a feature stream (random-vector
    expansion), block-adapted with per-feature power normalization.

    Raw sigmoid features carry a constant and a first-order component of
    the input window, which would make this branch compete with the linear
    branch for the same signal. Each feature is therefore reduced to its
    purely nonlinear part before filtering: running estimates of the
    feature's mean and of its regression slope onto the pre-activation
    (recovered exactly from the sigmoid output) remove the constant and
    the linear component.
    """

    def __init__(
        self,
        n_features: int,
        mu: float,
        forget: float = 0.9,
        reg: float = 1e-6,
        power_init: float = 1e-3,
        bias: np.ndarray | None = None,
    ):
        self.mu = mu
        self.forget = forget
        self.reg = reg
        self.w = np.zeros(n_features)
        self.power = np.full(n_features, float(power_init))
        self.bias = np.zeros(n_features) if bias is None else np.asarray(bias, dtype=float)
        mid = 1.0 / (1.0 + np.exp(-self.bias))
        # seeded with the Taylor slope at the bias; refined online
        self._mean_z = self.bias.copy()
        self._mean_g = mid.copy()
        self._var_z = np.ones(n_features)
        self._cov_gz = mid * (1.0 - mid)
        self._feats = None

    def filter_block(self, feats: np.ndarray) -> np.ndarray:
        g = np.clip(np.asarray(feats, dtype=float), 1e-12, 1.0 - 1e-12)
        z = np.log(g / (1.0 - g))
        lam = self.forget
        self._mean_z = lam * self._mean_z + (1.0 - lam) * z.mean(axis=0)
        self._mean_g = lam * self._mean_g + (1.0 - lam) * g.mean(axis=0)
        zc = z - self._mean_z
        gc = g - self._mean_g
        self._var_z = lam * self._var_z + (1.0 - lam) * np.mean(zc**2, axis=0)
        self._cov_gz = lam * self._cov_gz + (1.0 - lam) * np.mean(gc * zc, axis=0)
        slope = self._cov_gz / np.maximum(self._var_z, 1e-8)
        self._feats = gc - slope * zc
        return self._feats @ self.w

    def adapt(self, e_block: np.ndarray) -> None:
        # block energy per feature; delinearized features keep the branch
        # off the linear branch's subspace
        self.power = self.forget * self.power + (1.0 - self.forget) * np.sum(
            self._feats**2, axis=0
        )
        self.w += self.mu * (self._feats.T @ e_block) / (self.reg + self.power)
        if not np.all(np.isfinite(self.w)) or np.max(np.abs(self.w)) > WEIGHT_LIMIT:
            raise DivergenceError("feature weights diverged")


class FdFlaf:
    """Frequency-domain split functional-link filter (overlap-save)."""

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
    ):
        if hop > m_lin:
            raise InvalidInputError(f"hop {hop} must not exceed linear filter length {m_lin}")
        self.hop = hop
        self.lin = FreqBranch(m_lin, hop, mu_lin, forget, reg, power_init, constrained)
        self.expander: Expander | None = None
        self.nl: FreqBranch | None = None
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
                self.nl = FreqBranch(
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
            # block-rate surrogate for the samplewise rule: mean error and
            # the current equivalent nonlinear weights
            _, w_nl = self.equivalent_time_weights()
            self.expander.ae_adapt(
                self.expander.recent_inputs(), float(np.mean(e_block)), w_nl
            )
