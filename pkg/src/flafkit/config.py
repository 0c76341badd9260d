"""Experiment configuration: YAML schema, validation, and dataclasses.

The schema is strict: unknown keys anywhere in the file are hard errors,
since a silently ignored typo would corrupt a benchmark. See README for
the full key reference.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ConfigError
from .expansions import ExpansionConfig, ExpansionKind
from .scenario import NonlinearityKind, RirSpec, ScenarioConfig, SourceKind

ALGORITHM_NAMES = ("linear-pbfdaf", "fd-flaf", "pbfd-flaf", "flaf-td")

_TOP_KEYS = {
    "scenario", "algorithms", "output_dir", "report_ops",
    "erle_window", "warmup_s", "figures",
}
_SCENARIO_KEYS = {
    "source", "ar1_alpha", "wav_path", "nonlinearity", "zeta", "snr_db",
    "duration_s", "duration_samples", "seed", "volume_schedule", "rir",
    "drive_rms",
}
_RIR_KEYS = {"t60_ms", "length", "fs", "seed", "drr_db"}
_ALGO_KEYS = {
    "name", "label", "expansion", "mu_lin", "mu_nl", "lambda", "reg",
    "power_init", "m", "l", "m_p", "constrained",
}
_EXPANSION_KEYS = {"kind", "p", "m_i", "m_re", "seed", "ae_step", "ae_init"}

_KIND_ALIASES = {
    "chebyshev": ExpansionKind.CHEBYSHEV,
    "legendre": ExpansionKind.LEGENDRE,
    "trigonometric": ExpansionKind.TRIGONOMETRIC,
    "random-vector": ExpansionKind.RANDOM_VECTOR,
    "adaptive-exponential": ExpansionKind.ADAPTIVE_EXPONENTIAL,
}


@dataclass(frozen=True)
class AlgorithmSpec:
    """One adaptive filter entry of an experiment."""

    name: str
    label: str
    expansion: ExpansionConfig | None = None
    mu_lin: float = 0.01
    mu_nl: float = 0.001
    forget: float = 0.9
    reg: float = 1e-6
    power_init: float = 1e-3
    m: int = 256
    l: int = 64
    m_p: int | None = None
    constrained: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioConfig
    algorithms: tuple[AlgorithmSpec, ...]
    output_dir: str = "out"
    report_ops: bool = True
    erle_window: int = 2048
    warmup_s: float = 0.5
    figures: bool = True


def _require_keys(mapping: dict, allowed: set, path: str) -> None:
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(mapping).__name__}")
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {', '.join(unknown)}")


def _get(mapping: dict, key: str, default, path: str, cast=None):
    val = mapping.get(key, default)
    if val is None or cast is None:
        return val
    try:
        return cast(val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.{key}: {exc}") from exc


def parse_expansion(raw: dict | None, path: str) -> ExpansionConfig | None:
    if raw is None:
        return None
    _require_keys(raw, _EXPANSION_KEYS, path)
    kind_name = str(raw.get("kind", "")).lower()
    if kind_name not in _KIND_ALIASES:
        raise ConfigError(
            f"{path}.kind: expected one of {sorted(_KIND_ALIASES)}, got {kind_name!r}"
        )
    try:
        return ExpansionConfig(
            kind=_KIND_ALIASES[kind_name],
            order=_get(raw, "p", 1, path, int),
            input_len=_get(raw, "m_i", 1, path, int),
            expanded_len=_get(raw, "m_re", None, path, int),
            seed=_get(raw, "seed", None, path, int),
            ae_step=_get(raw, "ae_step", 0.0, path, float),
            ae_init=_get(raw, "ae_init", 0.0, path, float),
        )
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_scenario(raw: dict, path: str = "scenario") -> ScenarioConfig:
    _require_keys(raw, _SCENARIO_KEYS, path)
    rir_raw = raw.get("rir", {}) or {}
    _require_keys(rir_raw, _RIR_KEYS, f"{path}.rir")
    rir = RirSpec(
        t60_ms=_get(rir_raw, "t60_ms", 150.0, f"{path}.rir", float),
        length=_get(rir_raw, "length", 300, f"{path}.rir", int),
        fs=_get(rir_raw, "fs", 8000, f"{path}.rir", int),
        seed=_get(rir_raw, "seed", 0, f"{path}.rir", int),
        drr_db=_get(rir_raw, "drr_db", 0.0, f"{path}.rir", float),
    )

    if "duration_samples" in raw and "duration_s" in raw:
        raise ConfigError(f"{path}: give duration_s or duration_samples, not both")
    if "duration_samples" in raw:
        duration = _get(raw, "duration_samples", None, path, int)
    else:
        duration = round(_get(raw, "duration_s", 1.0, path, float) * rir.fs)

    source_name = str(raw.get("source", "white")).lower()
    try:
        source = SourceKind(source_name)
    except ValueError:
        raise ConfigError(f"{path}.source: unknown source {source_name!r}") from None
    nl_name = str(raw.get("nonlinearity", "none")).lower()
    try:
        nonlinearity = NonlinearityKind(nl_name)
    except ValueError:
        raise ConfigError(f"{path}.nonlinearity: unknown nonlinearity {nl_name!r}") from None

    schedule = raw.get("volume_schedule")
    if schedule is not None:
        try:
            schedule = tuple((int(s), float(g)) for s, g in schedule)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}.volume_schedule: {exc}") from exc

    snr_raw = raw.get("snr_db", 20.0)
    snr_db = float("inf") if str(snr_raw).lower() in ("inf", ".inf", "infinity") else float(snr_raw)

    try:
        return ScenarioConfig(
            source=source,
            ar1_alpha=_get(raw, "ar1_alpha", 0.8, path, float),
            wav_path=raw.get("wav_path"),
            nonlinearity=nonlinearity,
            zeta=_get(raw, "zeta", 0.2, path, float),
            rir=rir,
            snr_db=snr_db,
            duration_samples=duration,
            seed=_get(raw, "seed", 0, path, int),
            volume_schedule=schedule,
            drive_rms=_get(raw, "drive_rms", None, path, float),
        )
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_algorithm(raw: dict, index: int) -> AlgorithmSpec:
    path = f"algorithms[{index}]"
    _require_keys(raw, _ALGO_KEYS, path)
    name = str(raw.get("name", "")).lower()
    if name not in ALGORITHM_NAMES:
        raise ConfigError(f"{path}.name: expected one of {ALGORITHM_NAMES}, got {name!r}")
    expansion = parse_expansion(raw.get("expansion"), f"{path}.expansion")
    if name == "linear-pbfdaf" and expansion is not None:
        raise ConfigError(f"{path}: linear-pbfdaf takes no expansion")
    if name in ("pbfd-flaf", "fd-flaf", "flaf-td") and expansion is None:
        raise ConfigError(f"{path}: {name} requires an expansion block")
    label = raw.get("label") or (name if expansion is None else f"{name}-{expansion.kind.value}")
    spec = AlgorithmSpec(
        name=name,
        label=str(label),
        expansion=expansion,
        mu_lin=_get(raw, "mu_lin", 0.01, path, float),
        mu_nl=_get(raw, "mu_nl", 0.001, path, float),
        forget=_get(raw, "lambda", 0.9, path, float),
        reg=_get(raw, "reg", 1e-6, path, float),
        power_init=_get(raw, "power_init", 1e-3, path, float),
        m=_get(raw, "m", 256, path, int),
        l=_get(raw, "l", 64, path, int),
        m_p=_get(raw, "m_p", None, path, int),
        constrained=bool(raw.get("constrained", True)),
    )
    if spec.m < 1 or spec.l < 1:
        raise ConfigError(f"{path}: m and l must be positive")
    if name != "flaf-td" and spec.l & (spec.l - 1):
        raise ConfigError(f"{path}.l: block advance must be a power of two, got {spec.l}")
    if not 0.0 < spec.forget <= 1.0:
        raise ConfigError(f"{path}.lambda: must be in (0, 1], got {spec.forget}")
    return spec


def parse_config(raw: dict) -> ExperimentConfig:
    _require_keys(raw, _TOP_KEYS, "top level")
    if "scenario" not in raw:
        raise ConfigError("top level: missing scenario section")
    if not raw.get("algorithms"):
        raise ConfigError("top level: need at least one algorithms entry")
    scenario = parse_scenario(raw["scenario"])
    algorithms = tuple(
        parse_algorithm(entry, i) for i, entry in enumerate(raw["algorithms"])
    )
    labels = [a.label for a in algorithms]
    if len(set(labels)) != len(labels):
        raise ConfigError("algorithm labels must be unique (set label: explicitly)")
    return ExperimentConfig(
        scenario=scenario,
        algorithms=algorithms,
        output_dir=str(raw.get("output_dir", "out")),
        report_ops=bool(raw.get("report_ops", True)),
        erle_window=int(raw.get("erle_window", 2048)),
        warmup_s=float(raw.get("warmup_s", 0.5)),
        figures=bool(raw.get("figures", True)),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate an experiment config file."""
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    return parse_config(raw)
