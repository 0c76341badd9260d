"""Figure rendering for experiment reports.

Figures are written next to the CSV output; rendering is headless (Agg).
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_erle_figure(traces: dict[str, np.ndarray], fs: int, path: str | Path) -> Path:
    """Overlay the per-algorithm ERLE traces against time in seconds."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for label, values in traces.items():
        t = np.arange(len(values)) / fs
        ax.plot(t, values, linewidth=1.0, label=label)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("ERLE (dB)")
    ax.grid(True, linewidth=0.4, alpha=0.6)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_corr_figure(
    bins: np.ndarray,
    alpha_abs: np.ndarray,
    cond_est: np.ndarray,
    chi_model: np.ndarray,
    path: str | Path,
) -> Path:
    """Per-bin off-diagonal magnitude and condition numbers."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.8))
    ax1.plot(bins, alpha_abs, "o-", markersize=3)
    ax1.set_xlabel("frequency bin")
    ax1.set_ylabel(r"$|\alpha|$")
    ax1.grid(True, linewidth=0.4, alpha=0.6)
    ax2.plot(bins, cond_est, "o-", markersize=3, label="estimated")
    ax2.plot(bins, chi_model, "s--", markersize=3, label="tridiagonal model")
    ax2.set_xlabel("frequency bin")
    ax2.set_ylabel("condition number")
    ax2.grid(True, linewidth=0.4, alpha=0.6)
    ax2.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
