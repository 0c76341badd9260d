"""Named experiment presets mirroring the published benchmark setups.

Each preset is a plain config mapping (the YAML-equivalent dict) so it can
be dumped, edited, and rerun. Speech presets expect the user to fill in
``scenario.wav_path``; no audio ships with the package.
"""
from __future__ import annotations

import copy

from .errors import ConfigError

_COMMON_FILTER = {
    "mu_lin": 0.01,
    "mu_nl": 0.001,
    "lambda": 0.9,
    "reg": 1e-6,
    "power_init": 1e-3,
    "m": 300,
    "l": 64,
    "m_p": 4,
    "constrained": True,
}


def _flaf_entries(
    name: str, m_i: int, order: int, rv_m_i: int, rv_m_re: int, **overrides
) -> list[dict]:
    base = dict(_COMMON_FILTER, **overrides)
    entries = [dict(base, name="linear-pbfdaf", label="linear-pbfdaf")]
    for kind in ("trigonometric", "chebyshev", "legendre", "random-vector",
                 "adaptive-exponential"):
        if kind == "random-vector":
            # random sigmoid features need a short window to resolve the
            # near-memoryless loudspeaker distortion; M_re is set a priori
            expansion = {"kind": kind, "m_i": rv_m_i, "m_re": rv_m_re, "seed": 42}
        else:
            expansion = {"kind": kind, "p": order, "m_i": m_i}
        if kind == "adaptive-exponential":
            expansion.update(ae_step=0.01, ae_init=0.0)
        entries.append(
            dict(base, name=name, label=f"{name}-{kind}", expansion=expansion)
        )
    return entries


PRESETS: dict[str, dict] = {
    "table2": {
        "description": "Stationary colored-noise scenario, soft-clip 0.2, "
        "T60 150 ms, SNR 20 dB: linear PBFDAF vs PBFD-FLAF with all expansions.",
        "config": {
            "scenario": {
                "source": "ar1",
                "ar1_alpha": 0.8,
                "drive_rms": 0.35,
                "nonlinearity": "soft-clip",
                "zeta": 0.2,
                "snr_db": 20,
                "duration_s": 10.0,
                "seed": 1,
                "rir": {"t60_ms": 150.0, "length": 300, "fs": 8000, "seed": 9, "drr_db": 3.0},
            },
            "algorithms": _flaf_entries("pbfd-flaf", m_i=128, order=10, rv_m_i=4, rv_m_re=1024),
            "output_dir": "out/table2",
        },
    },
    "table3-speech": {
        "description": "Stationary speech scenario (supply scenario.wav_path), "
        "soft-clip 0.2, short nonlinear buffer M_i=16.",
        "config": {
            "scenario": {
                "source": "wav",
                "wav_path": None,
                "nonlinearity": "soft-clip",
                "zeta": 0.2,
                "snr_db": 20,
                "duration_s": 10.0,
                "seed": 1,
                "rir": {"t60_ms": 150.0, "length": 300, "fs": 8000, "seed": 9},
            },
            "algorithms": _flaf_entries("pbfd-flaf", m_i=16, order=10, rv_m_i=8, rv_m_re=256),
            "output_dir": "out/table3-speech",
        },
    },
    "table4": {
        "description": "Colored noise with a stronger saturation (zeta 0.18), "
        "T60 100 ms RIR truncated to 512 taps, M_i=32.",
        "config": {
            "scenario": {
                "source": "ar1",
                "ar1_alpha": 0.8,
                "nonlinearity": "soft-clip",
                "zeta": 0.18,
                "snr_db": 20,
                "duration_s": 10.0,
                "seed": 1,
                "rir": {"t60_ms": 100.0, "length": 512, "fs": 8000, "seed": 9},
            },
            "algorithms": _flaf_entries(
                "pbfd-flaf", m_i=32, order=10, rv_m_i=8, rv_m_re=256, m=512, m_p=8
            ),
            "output_dir": "out/table4",
        },
    },
    "volume-steps": {
        "description": "Nonstationary volume levels: the far-end gain drops "
        "6 dB mid-run (zeta 0.21, T60 100 ms, M=320).",
        "config": {
            "scenario": {
                "source": "ar1",
                "ar1_alpha": 0.8,
                "nonlinearity": "soft-clip",
                "zeta": 0.21,
                "snr_db": 20,
                "duration_s": 10.0,
                "seed": 1,
                "volume_schedule": [[0, 1.0], [40000, 0.5]],
                "rir": {"t60_ms": 100.0, "length": 320, "fs": 8000, "seed": 9},
            },
            "algorithms": _flaf_entries(
                "pbfd-flaf", m_i=32, order=10, rv_m_i=8, rv_m_re=256, m=320, m_p=5
            ),
            "output_dir": "out/volume-steps",
        },
    },
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def preset_description(name: str) -> str:
    return PRESETS[name]["description"]


def preset_config(name: str) -> dict:
    """Deep copy of the preset's raw config mapping."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return copy.deepcopy(PRESETS[name]["config"])
