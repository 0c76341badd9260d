"""Time-domain adaptive filters.

A plain NLMS filter and the split functional-link filter: a linear branch
over the raw input in parallel with a nonlinear branch over the expanded
feature stream, adapted jointly sample by sample. The split filter is the
correctness reference for the frequency-domain variants.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DivergenceError
from .expansions import ExpansionConfig, ExpansionKind


class Nlms:
    """Normalized LMS FIR filter, one sample per step."""

    def __init__(self, length: int, mu: float = 0.5, reg: float = 1e-6):
        self.mu = mu
        self.reg = reg
        self.w = np.zeros(length)
        self.buf = np.zeros(length)

    def step(self, x_new: float, d: float) -> tuple[float, float]:
        self.buf[1:] = self.buf[:-1]
        self.buf[0] = x_new
        y = float(np.dot(self.buf, self.w))
        e = d - y
        self.w += self.mu * e * self.buf / (self.reg + np.dot(self.buf, self.buf))
        return y, e


class SplitFlaf:
    """Split functional-link adaptive filter with per-branch NLMS updates.

    The caller owns the expander and feeds ``step`` the expanded values of
    the current sample (``Q`` values for the samplewise expansions, the
    full instantaneous feature vector for the random-vector kind).
    """

    def __init__(
        self,
        m_lin: int,
        expansion: ExpansionConfig | None = None,
        mu_lin: float = 0.5,
        mu_nl: float = 0.5,
        reg: float = 1e-6,
    ):
        self.mu_lin = mu_lin
        self.mu_nl = mu_nl
        self.reg = reg
        self.w_lin = np.zeros(m_lin)
        self.buf_lin = np.zeros(m_lin)
        self.expansion = expansion
        self.skipped = 0
        if expansion is None:
            self._q = 0
            self.w_nl = np.zeros(0)
            self.buf_nl = np.zeros(0)
        else:
            # RV features replace the whole buffer each sample; the other
            # kinds shift Q new values into the interleaved buffer
            self._q = 0 if expansion.kind == ExpansionKind.RANDOM_VECTOR else expansion.channels
            self.w_nl = np.zeros(expansion.feature_len)
            self.buf_nl = np.zeros(expansion.feature_len)

    def step(self, x_new: float, g_new: np.ndarray | None, d: float) -> tuple[float, float]:
        """Advance one sample; returns (y, e)."""
        if not (math.isfinite(x_new) and math.isfinite(d)):
            self.skipped += 1
            return 0.0, 0.0
        self.buf_lin[1:] = self.buf_lin[:-1]
        self.buf_lin[0] = x_new
        if self.expansion is not None:
            g_new = np.asarray(g_new, dtype=float)
            if self._q:
                self.buf_nl[self._q:] = self.buf_nl[: -self._q]
                self.buf_nl[: self._q] = g_new
            else:
                self.buf_nl = g_new

        y = float(np.dot(self.buf_lin, self.w_lin) + np.dot(self.buf_nl, self.w_nl))
        e = d - y
        self.w_lin += self.mu_lin * e * self.buf_lin / (
            self.reg + np.dot(self.buf_lin, self.buf_lin)
        )
        if self.w_nl.size:
            self.w_nl += self.mu_nl * e * self.buf_nl / (
                self.reg + np.dot(self.buf_nl, self.buf_nl)
            )
        if not (np.all(np.isfinite(self.w_lin)) and np.all(np.isfinite(self.w_nl))):
            raise DivergenceError("non-finite weights after update")
        return y, e
