"""Functional-link expansion blocks.

Five expansion families are provided: Chebyshev and Legendre polynomial
recursions, the memoryless trigonometric set, the random-vector (RV)
sigmoid projection, and the adaptive-exponential (AE) variant of the
trigonometric set. An expander turns a scalar input stream into ``Q``
parallel feature channels (RV: one serialized feature stream), and keeps
an operation tally so filter complexity can be compared portably.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, InvalidInputError, UnsupportedOperationError

# Clamp for the adaptive exponential factor; keeps exp(-a|x|) well
# conditioned over the whole input range.
AE_FACTOR_MAX = 20.0


class ExpansionKind(str, Enum):
    CHEBYSHEV = "chebyshev"
    LEGENDRE = "legendre"
    TRIGONOMETRIC = "trigonometric"
    RANDOM_VECTOR = "random-vector"
    ADAPTIVE_EXPONENTIAL = "adaptive-exponential"


@dataclass(frozen=True)
class ExpansionConfig:
    """Which functional-link set to use and its sizing.

    Parameters
    ----------
    kind : ExpansionKind
        Expansion family.
    order : int
        Expansion order P (ignored for the random-vector kind).
    input_len : int
        Number of input samples M_i the nonlinear branch sees.
    expanded_len : int, optional
        Feature count M_re. Mandatory for the random-vector kind (set a
        priori); for the others it is always ``Q * input_len`` and may be
        omitted.
    seed : int, optional
        Seed for the random projection (random-vector kind only).
    ae_step : float
        Gradient step for the adaptive exponential factor.
    ae_init : float
        Initial adaptive exponential factor a[0].
    """

    kind: ExpansionKind
    order: int = 1
    input_len: int = 1
    expanded_len: int | None = None
    seed: int | None = None
    ae_step: float = 0.0
    ae_init: float = 0.0

    def __post_init__(self):
        if self.order < 1:
            raise ConfigError(f"expansion order must be >= 1, got {self.order}")
        if self.input_len < 1:
            raise ConfigError(f"input_len must be >= 1, got {self.input_len}")
        if self.kind == ExpansionKind.RANDOM_VECTOR:
            if self.expanded_len is None or self.expanded_len < 1:
                raise ConfigError("random-vector expansion requires a positive expanded_len")
            if self.seed is None:
                raise ConfigError("random-vector expansion requires a seed")
        else:
            derived = self.channels * self.input_len
            if self.expanded_len is not None and self.expanded_len != derived:
                raise ConfigError(
                    f"expanded_len {self.expanded_len} inconsistent with "
                    f"Q*M_i = {derived} for kind {self.kind.value}"
                )
        if self.ae_step < 0:
            raise ConfigError("ae_step must be nonnegative")

    @property
    def channels(self) -> int:
        """Number of functional links Q."""
        if self.kind in (ExpansionKind.CHEBYSHEV, ExpansionKind.LEGENDRE):
            return self.order
        if self.kind in (ExpansionKind.TRIGONOMETRIC, ExpansionKind.ADAPTIVE_EXPONENTIAL):
            return 2 * self.order
        return 1

    @property
    def feature_len(self) -> int:
        """Expanded vector length M_re."""
        if self.kind == ExpansionKind.RANDOM_VECTOR:
            return int(self.expanded_len)
        return self.channels * self.input_len


@dataclass
class OpCounter:
    """Per-iteration cost tallies, accumulated per processed input sample."""

    mults: int = 0
    adds: int = 0
    func_evals: int = 0

    def add_samples(self, config: ExpansionConfig, n: int) -> None:
        self.mults += n * predicted_mul_count(config)
        self.adds += n * predicted_add_count(config)
        self.func_evals += n * predicted_func_eval_count(config)


def predicted_mul_count(config: ExpansionConfig) -> int:
    """Multiplications per iteration for the configured expansion."""
    p, mi = config.order, config.input_len
    kind = config.kind
    if kind == ExpansionKind.CHEBYSHEV:
        return 2 * p * mi
    if kind == ExpansionKind.LEGENDRE:
        return 2 * p * (2 * mi + 1)
    if kind == ExpansionKind.TRIGONOMETRIC:
        return p * (mi + 1)
    if kind == ExpansionKind.RANDOM_VECTOR:
        return config.feature_len * (mi + 1)
    # adaptive exponential: trigonometric base + exponentiation + factor update
    return 11 * p * mi + p + 1


def predicted_add_count(config: ExpansionConfig) -> int:
    """Additions per iteration for the configured expansion."""
    p, mi = config.order, config.input_len
    kind = config.kind
    if kind == ExpansionKind.CHEBYSHEV:
        return p * mi
    if kind == ExpansionKind.LEGENDRE:
        return p * (mi + 2)
    if kind == ExpansionKind.TRIGONOMETRIC:
        return 0
    if kind == ExpansionKind.RANDOM_VECTOR:
        return config.feature_len * (mi + 1)
    return 4 * p * mi + 2


def predicted_func_eval_count(config: ExpansionConfig) -> int:
    """Transcendental-function evaluations per iteration."""
    p, mi = config.order, config.input_len
    kind = config.kind
    if kind in (ExpansionKind.CHEBYSHEV, ExpansionKind.LEGENDRE):
        return 0
    if kind == ExpansionKind.TRIGONOMETRIC:
        return 2 * p * mi
    if kind == ExpansionKind.RANDOM_VECTOR:
        return config.feature_len
    return 4 * p * mi


@dataclass
class ExpandedFrame:
    """Block of expanded samples.

    ``channels`` has shape (Q, L) for the samplewise expansions. For the
    random-vector kind it is (1, L * M_re): the per-sample feature vectors
    laid end to end in time order, so flattening is already sample-major.
    """

    channels: np.ndarray
    features_per_sample: int = 1

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def n_samples(self) -> int:
        return self.channels.shape[1] // self.features_per_sample

    def sample_major(self) -> np.ndarray:
        """Flatten to the interleaved layout: all channels of sample 0,
        then sample 1, and so on."""
        if self.features_per_sample > 1:
            return self.channels[0].copy()
        return self.channels.T.ravel()

    def feature_matrix(self) -> np.ndarray:
        """(L, features) array: row n holds every feature of sample n."""
        if self.features_per_sample > 1:
            return self.channels[0].reshape(self.n_samples, self.features_per_sample)
        return self.channels.T


class Expander:
    """Stateful functional-link expander over a scalar input stream.

    Single-writer: one input stream per instance. Inputs outside [-1, 1]
    are clipped (counted in ``saturation_count``) rather than rejected.
    """

    def __init__(self, config: ExpansionConfig):
        self.config = config
        self.ops = OpCounter()
        self.saturation_count = 0
        self.ae_warning = False
        self.ae_factor = float(np.clip(config.ae_init, 0.0, AE_FACTOR_MAX))
        self.rv_weights: np.ndarray | None = None
        self.rv_bias: np.ndarray | None = None
        if config.kind == ExpansionKind.RANDOM_VECTOR:
            rng = np.random.default_rng(config.seed)
            self.rv_weights = rng.uniform(-1.0, 1.0, (config.feature_len, config.input_len))
            self.rv_bias = rng.uniform(-1.0, 1.0, config.feature_len)
        # last M_i (clipped) inputs, oldest first; zeros before stream start
        self._hist = np.zeros(config.input_len)

    # -- expansion -------------------------------------------------------

    def expand_sample(self, x: float) -> np.ndarray:
        """Expand one sample into its Q functional-link values."""
        if self.config.kind == ExpansionKind.RANDOM_VECTOR:
            raise UnsupportedOperationError(
                "random-vector expansion is block structured; use expand_block"
            )
        if not math.isfinite(x):
            raise InvalidInputError(f"non-finite input sample {x!r}")
        xc = self._clip(np.array([float(x)]))
        out = self._basis(xc)[:, 0]
        self._push(xc)
        self.ops.add_samples(self.config, 1)
        return out

    def expand_block(self, block: np.ndarray) -> ExpandedFrame:
        """Expand a block of samples into an ExpandedFrame."""
        block = np.asarray(block, dtype=float)
        if block.ndim != 1 or block.size == 0:
            raise InvalidInputError("expand_block needs a non-empty 1-D block")
        if not np.all(np.isfinite(block)):
            raise InvalidInputError("non-finite samples in block")
        xc = self._clip(block)
        if self.config.kind == ExpansionKind.RANDOM_VECTOR:
            z = self._windows(xc) @ self.rv_weights.T + self.rv_bias
            feats = 1.0 / (1.0 + np.exp(-z))
            frame = ExpandedFrame(
                feats.reshape(1, -1), features_per_sample=self.config.feature_len
            )
        else:
            frame = ExpandedFrame(self._basis(xc))
        self._push(xc)
        self.ops.add_samples(self.config, block.size)
        return frame

    def recent_inputs(self) -> np.ndarray:
        """Most recent M_i inputs, newest first."""
        return self._hist[::-1].copy()

    # -- adaptive exponential factor ---------------------------------------

    def ae_adapt(self, x_recent: np.ndarray, error: float, weights_slice: np.ndarray) -> float:
        """One gradient step of the exponential factor a[n].

        ``x_recent`` is the newest-first input window, ``weights_slice`` the
        nonlinear branch weights in interleaved (sample-major) order. The
        gradient is that of the branch output with respect to a: each
        functional contributes -|x| times its own value. Returns the new
        factor; a non-finite gradient leaves the factor unchanged and sets
        ``ae_warning``.
        """
        if self.config.kind != ExpansionKind.ADAPTIVE_EXPONENTIAL:
            raise UnsupportedOperationError("ae_adapt requires an adaptive-exponential expander")
        if self.config.ae_step == 0.0 or error == 0.0:
            return self.ae_factor
        x_recent = np.clip(np.asarray(x_recent, dtype=float), -1.0, 1.0)
        q = self.config.channels
        phi = self._basis(x_recent)  # (Q, M_i), columns follow x_recent order
        w = np.asarray(weights_slice, dtype=float)[: q * x_recent.size].reshape(-1, q)
        grad = -np.sum(np.abs(x_recent) * np.einsum("iq,qi->i", w, phi))
        step = self.config.ae_step * error * grad
        if not math.isfinite(step):
            self.ae_warning = True
            return self.ae_factor
        self.ae_factor = float(np.clip(self.ae_factor + step, 0.0, AE_FACTOR_MAX))
        return self.ae_factor

    # -- internals ---------------------------------------------------------

    def _clip(self, x: np.ndarray) -> np.ndarray:
        over = np.abs(x) > 1.0
        if np.any(over):
            self.saturation_count += int(np.count_nonzero(over))
            x = np.clip(x, -1.0, 1.0)
        return x

    def _basis(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the Q functional links at each entry of x -> (Q, len)."""
        kind, p = self.config.kind, self.config.order
        if kind == ExpansionKind.CHEBYSHEV:
            out = np.empty((p, x.size))
            prev2, prev1 = np.ones_like(x), x
            for j in range(p):
                cur = 2.0 * x * prev1 - prev2
                out[j] = cur
                prev2, prev1 = prev1, cur
            return out
        if kind == ExpansionKind.LEGENDRE:
            out = np.empty((p, x.size))
            prev2, prev1 = np.ones_like(x), x
            out[0] = x
            for j in range(1, p):
                k = j + 1
                cur = ((2 * k - 1) * x * prev1 - (k - 1) * prev2) / k
                out[j] = cur
                prev2, prev1 = prev1, cur
            return out
        # trigonometric, with an optional exponential damping factor
        out = np.empty((2 * p, x.size))
        for pp in range(1, p + 1):
            out[2 * pp - 2] = np.sin(pp * np.pi * x)
            out[2 * pp - 1] = np.cos(pp * np.pi * x)
        if kind == ExpansionKind.ADAPTIVE_EXPONENTIAL and self.ae_factor != 0.0:
            out *= np.exp(-self.ae_factor * np.abs(x))
        return out

    def _windows(self, block: np.ndarray) -> np.ndarray:
        """Newest-first length-M_i input window ending at each block sample."""
        mi = self.config.input_len
        if mi == 1:
            return block[:, None]
        ext = np.concatenate([self._hist[1:], block])
        win = np.lib.stride_tricks.sliding_window_view(ext, mi)
        return win[:, ::-1]

    def _push(self, block: np.ndarray) -> None:
        mi = self.config.input_len
        if block.size >= mi:
            self._hist = block[-mi:].copy()
        else:
            self._hist = np.concatenate([self._hist[block.size:], block])
