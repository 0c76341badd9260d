"""Command-line benchmark runner.

Subcommands:

* ``run <config-or-preset>``: run an experiment from a YAML config file or
  a named preset; writes per-algorithm CSVs, summary.csv, and erle.png.
* ``analyze-corr``: Monte-Carlo per-bin correlation / conditioning study
  of the partitioned delay line; writes analysis.csv and alpha_chi.png.
* ``presets list`` / ``presets show <name>``: inspect bundled presets.

The environment variable FLAFKIT_OUTPUT_DIR overrides any configured
output directory.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import yaml

from .config import load_config, parse_config
from .errors import ConfigError, DivergenceError, InvalidInputError
from .presets import preset_config, preset_description, preset_names
from .runner import analyze_corr, run_experiment

ENV_OUTPUT_DIR = "FLAFKIT_OUTPUT_DIR"


def _parse_bins(text: str) -> list[int]:
    bins: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            bins.extend(range(int(lo), int(hi) + 1))
        else:
            bins.append(int(part))
    if not bins:
        raise ConfigError(f"no bins in {text!r}")
    return bins


def _resolve_run_config(target: str, wav: str | None):
    path = Path(target)
    if path.exists():
        cfg = load_config(path)
    elif target in preset_names():
        raw = preset_config(target)
        if wav:
            raw.setdefault("scenario", {})["wav_path"] = wav
        scenario = raw.get("scenario", {})
        if scenario.get("source") == "wav" and not scenario.get("wav_path"):
            raise ConfigError(
                f"preset {target!r} needs a speech file: pass --wav <path>"
            )
        return parse_config(raw)
    else:
        raise ConfigError(
            f"{target!r} is neither a config file nor a preset "
            f"(presets: {', '.join(preset_names())})"
        )
    if wav:
        raise ConfigError("--wav only applies when running a preset; edit the config file")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flafkit",
        description="Functional-link adaptive filter benchmarks for nonlinear "
        "acoustic echo cancellation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config or preset")
    p_run.add_argument("config", help="path to a YAML config, or a preset name")
    p_run.add_argument("--output-dir", default=None, help="override the output directory")
    p_run.add_argument("--wav", default=None, help="WAV path for speech presets")
    p_run.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p_run.add_argument("--quiet", action="store_true", help="suppress progress lines")

    p_ac = sub.add_parser("analyze-corr", help="per-bin correlation and conditioning study")
    p_ac.add_argument("--m-len", type=int, default=64, help="partition history length M")
    p_ac.add_argument("--hop", type=int, default=64, help="block advance L (must divide M)")
    p_ac.add_argument("--parts", type=int, default=4, help="number of partitions")
    p_ac.add_argument(
        "--bins", default="0-8", help="comma list / ranges of bins, e.g. 0,1,4-8"
    )
    p_ac.add_argument("--blocks", type=int, default=5000, help="Monte-Carlo block count")
    p_ac.add_argument("--seed", type=int, default=0)
    p_ac.add_argument("--output-dir", default="out/analysis")
    p_ac.add_argument("--no-figures", action="store_true")

    p_presets = sub.add_parser("presets", help="list or show bundled presets")
    p_presets_sub = p_presets.add_subparsers(dest="presets_command", required=True)
    p_presets_sub.add_parser("list", help="list preset names")
    p_show = p_presets_sub.add_parser("show", help="dump one preset as YAML")
    p_show.add_argument("name")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = _resolve_run_config(args.config, args.wav)
            out = os.environ.get(ENV_OUTPUT_DIR) or args.output_dir
            if args.no_figures:
                from dataclasses import replace

                cfg = replace(cfg, figures=False)
            result = run_experiment(cfg, output_dir=out, verbose=not args.quiet)
            if not args.quiet:
                print(f"wrote {result.summary_path}")
            return 0
        if args.command == "analyze-corr":
            out = os.environ.get(ENV_OUTPUT_DIR) or args.output_dir
            path = analyze_corr(
                args.m_len,
                args.hop,
                args.parts,
                _parse_bins(args.bins),
                args.blocks,
                args.seed,
                output_dir=out,
                figures=not args.no_figures,
            )
            print(f"wrote {path}")
            return 0
        if args.command == "presets":
            if args.presets_command == "list":
                for name in preset_names():
                    print(f"{name}: {preset_description(name)}")
                return 0
            print(yaml.safe_dump(preset_config(args.name), sort_keys=False))
            return 0
        return 2
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: {exc} (reduce the step sizes or increase lambda)", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
