"""Quality measures for echo cancellation runs.

ERLE (echo return loss enhancement) compares sliding-window energies of
the microphone and residual signals in dB; misalignment compares an
estimated impulse response against the ground truth.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

ERLE_CLAMP_DB = 80.0
MISALIGNMENT_FLOOR_DB = -300.0


@dataclass
class ErleTrace:
    """Per-sample ERLE in dB plus run aggregates.

    ``mean_db`` is the whole-run energy ratio excluding the warm-up
    prefix; ``mean_db_full`` includes it. ``clamped`` is set when any
    window had zero residual energy (trace pinned at +80 dB there).
    """

    window: int
    values: np.ndarray
    mean_db: float
    mean_db_full: float
    warmup: int
    clamped: bool


def _sliding_energy(x: np.ndarray, window: int) -> np.ndarray:
    """Trailing-window mean of x^2 (partial windows at the start)."""
    c = np.concatenate([[0.0], np.cumsum(x * x)])
    n = np.arange(1, x.size + 1)
    lo = np.maximum(n - window, 0)
    return (c[n] - c[lo]) / (n - lo)


def _ratio_db(num: float, den: float) -> tuple[float, bool]:
    if den == 0.0:
        return ERLE_CLAMP_DB, True
    if num == 0.0:
        return -ERLE_CLAMP_DB, False
    return 10.0 * np.log10(num / den), False


def erle(d: np.ndarray, e: np.ndarray, window: int = 2048, warmup: int = 0) -> ErleTrace:
    """Echo return loss enhancement trace of a run.

    Per sample: 10 log10 of the ratio of trailing ``window``-sample mean
    energies of ``d`` and ``e``. Zero-energy residual windows clamp at
    +80 dB and set the ``clamped`` flag.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    if d.shape != e.shape or d.ndim != 1:
        raise InvalidInputError("d and e must be 1-D with equal lengths")
    if window < 1:
        raise InvalidInputError("window must be >= 1")
    ed = _sliding_energy(d, window)
    ee = _sliding_energy(e, window)
    clamped = bool(np.any(ee == 0.0))
    with np.errstate(divide="ignore"):
        values = 10.0 * np.log10(np.where(ee > 0, ed, np.nan) / np.where(ee > 0, ee, 1.0))
    values = np.where(ee == 0.0, ERLE_CLAMP_DB, values)
    values = np.where((ed == 0.0) & (ee > 0.0), -ERLE_CLAMP_DB, values)
    values = np.clip(values, -ERLE_CLAMP_DB, ERLE_CLAMP_DB)

    warmup = min(max(int(warmup), 0), d.size)
    mean_db, c1 = _ratio_db(float(np.sum(d[warmup:] ** 2)), float(np.sum(e[warmup:] ** 2)))
    mean_db_full, c2 = _ratio_db(float(np.sum(d**2)), float(np.sum(e**2)))
    return ErleTrace(
        window=window,
        values=values,
        mean_db=mean_db,
        mean_db_full=mean_db_full,
        warmup=warmup,
        clamped=clamped or c1 or c2,
    )


def misalignment(w_est: np.ndarray, w_true: np.ndarray) -> float:
    """Normalized weight-error norm in dB; shorter vector is zero-padded."""
    w_est = np.asarray(w_est, dtype=float)
    w_true = np.asarray(w_true, dtype=float)
    n = max(w_est.size, w_true.size)
    a = np.zeros(n)
    b = np.zeros(n)
    a[: w_est.size] = w_est
    b[: w_true.size] = w_true
    ref = np.linalg.norm(b)
    if ref == 0.0:
        raise InvalidInputError("misalignment undefined for all-zero reference")
    err = np.linalg.norm(a - b)
    if err == 0.0:
        return MISALIGNMENT_FLOOR_DB
    return max(float(20.0 * np.log10(err / ref)), MISALIGNMENT_FLOOR_DB)
