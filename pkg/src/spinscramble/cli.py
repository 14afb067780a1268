"""Command-line interface.

Subcommands select an observable family; the protocol comes from a named
preset or a JSON config file, with individual fields overridable by flags.

Exit codes: 0 success, 1 configuration error, 2 numeric-failure fraction
above the configured threshold.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .presets import PRESETS, preset_configs
from .sweep import (
    ConfigError,
    SweepConfig,
    config_from_dict,
    run_configs,
    write_meta,
    write_realizations,
    write_results,
)

log = logging.getLogger("spinscramble")

FAMILIES = {
    "spectrum": ("eigenstate-ee", "sg-correlator", "string-order", "gap-ratio"),
    "quench": ("quench-ee",),
    "tmi": ("tmi-series", "tmi-saturation"),
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _add_common_arguments(sub: argparse.ArgumentParser) -> None:
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS, help="named figure protocol")
    src.add_argument("--config", metavar="FILE",
                     help="JSON sweep config (object or list of objects)")
    sub.add_argument("--output", help="results file (default <preset>.csv)")
    sub.add_argument("--format", choices=("csv", "json-lines"))
    sub.add_argument("--model")
    sub.add_argument("--sizes", help="comma-separated L values")
    sub.add_argument("--deltas", help="comma-separated delta values")
    sub.add_argument("--realizations",
                     help="per-L counts (single value broadcasts)")
    sub.add_argument("--g", type=float)
    sub.add_argument("--seed", type=int, help="master disorder seed")
    sub.add_argument("--observables", help="comma-separated observable names")
    sub.add_argument("--partitions", help="comma-separated partition tags")
    sub.add_argument("--init", dest="initial_states",
                     help="comma-separated initial-state tags (BASIS:PATTERN)")
    sub.add_argument("--time-grid", dest="time_grid",
                     help="'default', 'extended', or comma-separated times")
    sub.add_argument("--raw-time", dest="raw_time", action="store_true",
                     default=None, help="treat times as raw (skip 1/W scaling)")
    sub.add_argument("--haar-samples", dest="haar_samples", type=int)
    sub.add_argument("--haar-seed", dest="haar_seed", type=int)
    sub.add_argument("--haar-cache", dest="haar_cache",
                     help="JSON cache file for Haar reference values")
    sub.add_argument("--workers", type=int)
    sub.add_argument("--failure-threshold", dest="failure_threshold", type=float)
    sub.add_argument("--store-realizations", dest="store_realizations",
                     action="store_true", default=None,
                     help="write sampled disorder to <output>.realizations.jsonl")
    sub.add_argument("--realizations-from", dest="realizations_from",
                     metavar="FILE", help="reuse disorder from a stored file")
    sub.add_argument("-v", "--verbose", action="store_true")
    sub.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinscramble",
                     description="disordered spin-chain sweeps")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("spectrum", "eigenstate entanglement, order parameters, gap ratio"),
        ("quench", "entanglement growth after a product-state quench"),
        ("tmi", "operator-entanglement tripartite mutual information"),
        ("haar", "Haar-scrambled reference values"),
        ("algebra", "operator-algebra identity checks"),
        ("sweep", "run a config or preset with its full observable set"),
    ):
        sub = subs.add_parser(name, help=text)
        _add_common_arguments(sub)
    return parser


def _split(text: str, cast) -> list:
    return [cast(part) for part in text.split(",") if part != ""]


def _collect_overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    for key in ("model", "g", "seed", "haar_samples", "haar_seed", "haar_cache",
                "workers", "failure_threshold", "raw_time",
                "store_realizations", "realizations_from", "format"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.sizes is not None:
        overrides["sizes"] = _split(args.sizes, int)
    if args.deltas is not None:
        overrides["deltas"] = sorted(_split(args.deltas, float))
    if args.realizations is not None:
        counts = _split(args.realizations, int)
        overrides["realizations"] = counts[0] if len(counts) == 1 else counts
    if args.observables is not None:
        overrides["observables"] = _split(args.observables, str)
    if args.partitions is not None:
        overrides["partitions"] = _split(args.partitions, str)
    if args.initial_states is not None:
        overrides["initial_states"] = _split(args.initial_states, str)
    if args.time_grid is not None:
        grid = args.time_grid
        overrides["time_grid"] = (
            grid if grid in ("default", "extended") else _split(grid, float)
        )
    return overrides


def _configs_from_file(path: str, overrides: dict) -> list[SweepConfig]:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    panels = raw if isinstance(raw, list) else [raw]
    configs = []
    for panel in panels:
        if not isinstance(panel, dict):
            raise ConfigError("config JSON must be an object or list of objects")
        data = dict(panel)
        data.update(overrides)
        configs.append(config_from_dict(data))
    return configs


def _apply_family(command: str, configs: list[SweepConfig]) -> list[SweepConfig]:
    """Narrow each panel to the subcommand's observable family."""
    if command == "sweep":
        return configs
    if command in ("haar", "algebra"):
        observable = "haar-ref" if command == "haar" else "algebra-check"
        narrowed = []
        seen = set()
        for config in configs:
            canonical = replace(
                config, observables=(observable,), deltas=(0.0,),
                realizations=(1,) * len(config.sizes),
                store_realizations=False, realizations_from=None,
            )
            key = (canonical.model, canonical.sizes, canonical.partitions,
                   canonical.haar_samples, canonical.haar_seed)
            if command == "algebra":
                key = (canonical.sizes, canonical.seed)
            if key in seen:
                continue
            seen.add(key)
            narrowed.append(canonical)
        return narrowed
    family = FAMILIES[command]
    narrowed = []
    for config in configs:
        kept = tuple(
            obs for obs in config.observables
            if obs.split(":", 1)[0] in family
        )
        if kept:
            narrowed.append(replace(config, observables=kept))
    if not narrowed:
        log.warning("no %s observables in the selected config; "
                    "writing an empty record set", command)
    return narrowed


def _resolve_output(args: argparse.Namespace,
                    configs: list[SweepConfig]) -> tuple[str, str]:
    output = args.output
    if output is None:
        for config in configs:
            if config.output:
                output = config.output
                break
    if output is None:
        stem = args.preset if args.preset else Path(args.config).stem
        output = f"{stem}.csv"
    fmt = args.format
    if fmt is None:
        for config in configs:
            if config.format != "csv":
                fmt = config.format
                break
    if fmt is None:
        fmt = "json-lines" if output.endswith((".jsonl", ".ndjson")) else "csv"
    return output, fmt


def _setup_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    if args.quiet:
        level = logging.ERROR
    logging.basicConfig(
        level=level, stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(message)s", datefmt="%H:%M:%S",
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help exits 0; usage errors already remapped
        return 0 if exc.code in (0, None) else 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _setup_logging(args)
    try:
        overrides = _collect_overrides(args)
        if args.preset:
            configs = preset_configs(args.preset, overrides)
        else:
            configs = _configs_from_file(args.config, overrides)
        configs = _apply_family(args.command, configs)
        output, fmt = _resolve_output(args, configs)
        outcome = run_configs(configs)
        write_results(outcome.records, output, fmt)
        write_meta(f"{output}.meta.json", configs, outcome)
        storing = [c for c in configs if c.store_realizations]
        if storing:
            write_realizations(storing, f"{output}.realizations.jsonl")
        log.info("wrote %d records to %s (%d tasks, %d failures)",
                 len(outcome.records), output, outcome.n_tasks,
                 outcome.n_failures)
        threshold = min(c.failure_threshold for c in configs) if configs else 0.0
        if outcome.failure_fraction > threshold:
            log.error("numeric failure fraction %.3f exceeds threshold %.3f",
                      outcome.failure_fraction, threshold)
            return 2
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
