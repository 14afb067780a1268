"""Seeded disorder sweeps, result records, persistence, and replay.

A sweep expands into independent (L, delta, realization) tasks.  Each task
samples its disorder from the master seed, diagonalizes once, and evaluates
every requested observable on that spectrum.  Records are gathered, sorted
canonically, and disorder-averaged, so serial and parallel runs of the same
config produce byte-identical output files.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .models import (
    MODELS,
    ModelParams,
    build_hamiltonian,
    realization_from_dict,
    realization_to_dict,
    sample_realization,
)
from .pauli import verify_cluster_algebra, cluster_k
from .quench import (
    default_time_grid,
    extended_time_grid,
    initial_state,
    quench_ee_series,
)
from .scrambling import (
    DEFAULT_HAAR_SAMPLES,
    DEFAULT_HAAR_SEED,
    channel_state,
    haar_reference,
    partition_from_tag,
    saturation_tmi,
    tmi,
)
from .spectral import (
    diagonalize,
    eigenstate_half_chain_ee,
    gap_ratio,
    spin_glass_correlator,
    string_order,
    string_operator,
)

DEFAULT_MASTER_SEED = 12345
WORKERS_ENV = "SPINSCRAMBLE_WORKERS"

log = logging.getLogger(__name__)

SCALAR_OBSERVABLES = (
    "eigenstate-ee",
    "sg-correlator",
    "string-order",
    "gap-ratio",
)
OBSERVABLES = SCALAR_OBSERVABLES + (
    "quench-ee",
    "tmi-series",
    "tmi-saturation",
    "haar-ref",
    "algebra-check",
)

CSV_COLUMNS = (
    "observable",
    "model",
    "L",
    "g",
    "delta",
    "seed",
    "realization",
    "partition",
    "time",
    "value",
    "stderr",
)


class ConfigError(ValueError):
    """Invalid sweep configuration (CLI exit code 1)."""


@dataclass(frozen=True)
class SweepConfig:
    """One sweep protocol: a model, a grid, observables, and bookkeeping."""

    model: str
    sizes: tuple[int, ...]
    deltas: tuple[float, ...]
    observables: tuple[str, ...]
    realizations: tuple[int, ...]
    g: float = 0.0
    seed: int = DEFAULT_MASTER_SEED
    output: str | None = None
    format: str = "csv"
    partitions: tuple[str, ...] = ("equal-half",)
    initial_states: tuple[str, ...] = ("Z:all-up",)
    time_grid: str | tuple[float, ...] = "default"
    raw_time: bool = False
    haar_samples: int = DEFAULT_HAAR_SAMPLES
    haar_seed: int = DEFAULT_HAAR_SEED
    haar_cache: str | None = None
    workers: int | None = None
    failure_threshold: float = 0.01
    store_realizations: bool = False
    realizations_from: str | None = None


def config_from_dict(raw: dict) -> SweepConfig:
    """Build a SweepConfig from plain JSON-style data, normalizing lists."""
    data = dict(raw)
    unknown = set(data) - set(SweepConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("sizes", "deltas", "observables", "partitions", "initial_states"):
        if key in data and not isinstance(data[key], (list, tuple)):
            data[key] = [data[key]]
    if "sizes" in data:
        data["sizes"] = tuple(int(x) for x in data["sizes"])
    if "deltas" in data:
        data["deltas"] = tuple(float(x) for x in data["deltas"])
    for key in ("observables", "partitions", "initial_states"):
        if key in data:
            data[key] = tuple(str(x) for x in data[key])
    if "realizations" in data:
        reals = data["realizations"]
        if isinstance(reals, (int, float)):
            reals = [reals] * len(data.get("sizes", ()))
        data["realizations"] = tuple(int(x) for x in reals)
    if "time_grid" in data and isinstance(data["time_grid"], (list, tuple)):
        data["time_grid"] = tuple(float(x) for x in data["time_grid"])
    try:
        return SweepConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def expanded_observables(config: SweepConfig) -> tuple[str, ...]:
    """Normalize observables; bare quench-ee fans out over initial states."""
    names: list[str] = []
    for obs in config.observables:
        if obs == "quench-ee":
            names.extend(f"quench-ee:{tag}" for tag in config.initial_states)
        else:
            names.append(obs)
    return tuple(dict.fromkeys(names))


def validate_config(config: SweepConfig) -> None:
    if config.model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {config.model!r}")
    if not config.sizes or any(L < 2 for L in config.sizes):
        raise ConfigError("sizes must be a nonempty list of L >= 2")
    if not config.deltas:
        raise ConfigError("delta grid must be nonempty")
    if any(not math.isfinite(d) for d in config.deltas):
        raise ConfigError("delta grid must be finite")
    if list(config.deltas) != sorted(config.deltas):
        raise ConfigError("delta grid must be sorted ascending")
    if len(config.realizations) != len(config.sizes):
        raise ConfigError("realizations must give one count per L")
    if any(n < 1 for n in config.realizations):
        raise ConfigError("realizations must be >= 1")
    if not 0.0 <= config.failure_threshold <= 1.0:
        raise ConfigError("failure threshold must lie in [0, 1]")
    if config.format not in ("csv", "json-lines"):
        raise ConfigError("format must be 'csv' or 'json-lines'")
    if config.haar_samples < 2:
        raise ConfigError("haar_samples must be >= 2")
    names = expanded_observables(config)
    if not names:
        raise ConfigError("observable set must be nonempty")
    for name in names:
        base = name.split(":", 1)[0]
        if base not in OBSERVABLES:
            raise ConfigError(f"unknown observable {name!r}")
        if base == "quench-ee":
            tag = name.split(":", 1)[1] if ":" in name else ""
            try:
                initial_state(tag, max(config.sizes))
            except ValueError as exc:
                raise ConfigError(f"bad initial-state tag in {name!r}: {exc}")
        if base == "string-order" and min(config.sizes) < 6:
            raise ConfigError("string-order endpoints (1, L-2) need L >= 6")
    if _needs_partitions(names):
        if not config.partitions:
            raise ConfigError("tmi observables need at least one partition")
        for tag in config.partitions:
            for L in config.sizes:
                try:
                    partition_from_tag(tag, L)
                except ValueError as exc:
                    raise ConfigError(f"partition {tag!r} invalid at L={L}: {exc}")
    resolve_time_grid(config)
    if config.store_realizations and config.realizations_from:
        pass  # storing a loaded set is allowed; it re-exports the same data


def _needs_partitions(names: tuple[str, ...]) -> bool:
    return any(n in ("tmi-series", "tmi-saturation", "haar-ref") for n in names)


def resolve_time_grid(config: SweepConfig) -> np.ndarray:
    grid = config.time_grid
    if isinstance(grid, str):
        if grid == "default":
            return default_time_grid()
        if grid == "extended":
            return extended_time_grid()
        raise ConfigError("time_grid must be 'default', 'extended', or a list")
    times = np.asarray(grid, dtype=float)
    if times.size == 0 or np.any(np.diff(times) <= 0) or not np.all(
        np.isfinite(times)
    ):
        raise ConfigError("explicit time grid must be finite, strictly increasing")
    return times


@dataclass(frozen=True)
class ResultRecord:
    """One observation (or disorder-averaged summary when realization=None)."""

    observable: str
    model: str
    L: int
    g: float
    delta: float
    seed: int
    realization: int | None
    partition: str | None
    time: float | None
    value: float | None
    stderr: float | None
    extra: dict = field(default_factory=dict, compare=False)


def _record(**kwargs) -> ResultRecord:
    # cast numpy scalars so repr() based serialization stays canonical
    for key in ("g", "delta", "time", "value", "stderr"):
        if kwargs.get(key) is not None:
            kwargs[key] = float(kwargs[key])
    for key in ("L", "seed", "realization"):
        if kwargs.get(key) is not None:
            kwargs[key] = int(kwargs[key])
    return ResultRecord(**kwargs)


def _sort_key(rec: ResultRecord):
    return (
        rec.observable,
        rec.model,
        rec.L,
        rec.g,
        rec.delta,
        rec.partition or "",
        -math.inf if rec.time is None else rec.time,
        1 if rec.realization is None else 0,
        -1 if rec.realization is None else rec.realization,
    )


def _realization_key(model: str, L: int, delta: float, seed: int, index: int):
    return (model, L, float(delta), int(seed), int(index))


def load_realizations(path: str) -> dict:
    """Read a stored realization file into a lookup table."""
    table = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            params, real = realization_from_dict(rec)
            key = _realization_key(
                params.model, params.L, real.delta, real.seed, real.index
            )
            table[key] = real
    return table


def _task_realization(config: SweepConfig, table: dict | None, params: ModelParams,
                      delta: float, index: int):
    if table is not None:
        key = _realization_key(config.model, params.L, delta, config.seed, index)
        found = table.get(key)
        if found is not None:
            return found
    return sample_realization(params, seed=config.seed, index=index)


def _run_task(config: SweepConfig, L: int, delta: float, index: int,
              haar_refs: dict, table: dict | None) -> list[ResultRecord]:
    """All per-realization records for one (L, delta, realization)."""
    names = expanded_observables(config)
    params = ModelParams(model=config.model, L=L, g=config.g, delta=delta)
    real = _task_realization(config, table, params, delta, index)
    base = dict(model=config.model, L=L, g=config.g, delta=delta,
                seed=config.seed, realization=index)
    provenance = (
        f"{config.model} L={L} g={config.g} delta={delta} "
        f"seed={config.seed} index={index}"
    )
    try:
        spectrum = diagonalize(build_hamiltonian(params, real), provenance)
    except RuntimeError as exc:
        return [
            _record(observable=name, partition=None, time=None, value=None,
                    stderr=None, extra={"error": str(exc)}, **base)
            for name in names
            if name not in ("haar-ref", "algebra-check")
        ]
    time_scale = 1.0 if config.raw_time else 1.0 / params.W
    records: list[ResultRecord] = []
    for name in names:
        if name == "eigenstate-ee":
            obs = eigenstate_half_chain_ee(spectrum)
            records.append(_record(observable=name, partition=None, time=None,
                                   value=obs.average, stderr=None, **base))
        elif name == "sg-correlator":
            obs = spin_glass_correlator(spectrum)
            records.append(_record(observable=name, partition=None, time=None,
                                   value=obs.average, stderr=None, **base))
        elif name == "string-order":
            _, phi = string_order(spectrum)
            records.append(_record(observable=name, partition=None, time=None,
                                   value=phi, stderr=None, **base))
        elif name == "gap-ratio":
            records.append(_record(observable=name, partition=None, time=None,
                                   value=gap_ratio(spectrum.eigenvalues),
                                   stderr=None, **base))
        elif name.startswith("quench-ee:"):
            tag = name.split(":", 1)[1]
            times = resolve_time_grid(config)
            series = quench_ee_series(
                spectrum, initial_state(tag, L), times,
                time_scale=time_scale, initial_state_tag=tag,
                provenance=provenance,
            )
            records.extend(
                _record(observable=name, partition=None, time=t, value=v,
                        stderr=None, **base)
                for t, v in zip(series.times, series.values)
            )
        elif name == "tmi-series":
            times = resolve_time_grid(config)
            for tag in config.partitions:
                part = partition_from_tag(tag, L)
                mean, _ = haar_refs[(L, tag)]
                for t in times:
                    res = tmi(channel_state(spectrum, t * time_scale), part)
                    records.append(
                        _record(observable=name, partition=tag, time=float(t),
                                value=res.i3 / mean, stderr=None,
                                extra={"i3": res.i3, "i_ac": res.i_ac,
                                       "i_ad": res.i_ad},
                                **base)
                    )
        elif name == "tmi-saturation":
            for tag in config.partitions:
                part = partition_from_tag(tag, L)
                mean, _ = haar_refs[(L, tag)]
                raw, normalized = saturation_tmi(
                    spectrum, part, time_scale=time_scale, haar_mean=mean
                )
                records.append(
                    _record(observable=name, partition=tag, time=None,
                            value=normalized, stderr=None, extra={"i3": raw},
                            **base)
                )
    return records


def _algebra_records(config: SweepConfig) -> list[ResultRecord]:
    records = []
    for L in config.sizes:
        residuals: dict[str, float] = {}
        for site in range(1, L - 1):
            for name, value in verify_cluster_algebra(L, site).items():
                key = f"{name}@site{site}"
                residuals[key] = value
        worst = max(residuals.values()) if residuals else 0.0
        extra: dict = {"residuals": residuals}
        if L >= 6:
            i, j = 1, L - 2
            prod = cluster_k(i + 1, L)
            for k in range(i + 2, j):
                prod = prod * cluster_k(k, L)
            exact = string_operator(i, j, L) == prod
            extra["string_product_exact"] = exact
            if not exact:
                worst = math.inf
        records.append(
            _record(observable="algebra-check", model=config.model, L=L,
                    g=0.0, delta=0.0, seed=config.seed, realization=None,
                    partition=None, time=None, value=worst, stderr=None,
                    extra=extra)
        )
    return records


def _haar_records(config: SweepConfig, haar_refs: dict) -> list[ResultRecord]:
    records = []
    for L in config.sizes:
        for tag in config.partitions:
            mean, stderr = haar_refs[(L, tag)]
            records.append(
                _record(observable="haar-ref", model="haar", L=L, g=0.0,
                        delta=0.0, seed=config.haar_seed, realization=None,
                        partition=tag, time=None, value=mean, stderr=stderr,
                        extra={"n_samples": config.haar_samples})
            )
    return records


def _compute_haar_refs(config: SweepConfig, names: tuple[str, ...]) -> dict:
    if not _needs_partitions(names):
        return {}
    refs = {}
    for L in config.sizes:
        for tag in config.partitions:
            part = partition_from_tag(tag, L)
            log.info("haar reference L=%d partition=%s (%d samples)",
                     L, tag, config.haar_samples)
            refs[(L, tag)] = haar_reference(
                L, part, n_samples=config.haar_samples,
                seed=config.haar_seed, cache_path=config.haar_cache,
            )
    return refs


def _aggregate(records: list[ResultRecord], config: SweepConfig,
               haar_refs: dict) -> list[ResultRecord]:
    """Disorder-averaged summary records (realization=None, stderr=SEM)."""
    groups: dict[tuple, list[ResultRecord]] = {}
    for rec in records:
        if rec.realization is None or rec.value is None:
            continue
        if rec.observable in ("haar-ref", "algebra-check"):
            continue
        key = (rec.observable, rec.model, rec.L, rec.g, rec.delta,
               rec.partition, rec.time)
        groups.setdefault(key, []).append(rec)
    summaries = []
    for key, members in groups.items():
        observable, model, L, g, delta, partition, time = key
        values = np.array([m.value for m in members])
        mean = float(np.mean(values))
        sem = (
            float(values.std(ddof=1) / np.sqrt(len(values)))
            if len(values) > 1 else None
        )
        if observable == "tmi-saturation" and sem is not None:
            haar_mean, haar_err = haar_refs[(L, partition)]
            sem = float(np.sqrt(sem**2 + (mean * haar_err / abs(haar_mean)) ** 2))
        summaries.append(
            _record(observable=observable, model=model, L=L, g=g, delta=delta,
                    seed=config.seed, realization=None, partition=partition,
                    time=time, value=mean, stderr=sem,
                    extra={"n": len(values)})
        )
    return summaries


@dataclass(frozen=True)
class SweepOutcome:
    records: list[ResultRecord]
    n_tasks: int
    n_failures: int

    @property
    def failure_fraction(self) -> float:
        return self.n_failures / self.n_tasks if self.n_tasks else 0.0


def _resolve_workers(config: SweepConfig) -> int:
    if config.workers is not None:
        return max(1, config.workers)
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


_WORKER_LIMITER = None


def _worker_init() -> None:
    # keep BLAS single-threaded inside workers so processes do not oversubscribe
    global _WORKER_LIMITER
    try:
        from threadpoolctl import threadpool_limits

        _WORKER_LIMITER = threadpool_limits(limits=1)
    except ImportError:
        pass


def _run_task_args(args) -> list[ResultRecord]:
    return _run_task(*args)


def run_sweep(config: SweepConfig) -> SweepOutcome:
    """Execute one sweep: per-realization records plus summary aggregates."""
    validate_config(config)
    names = expanded_observables(config)
    haar_refs = _compute_haar_refs(config, names)
    table = (
        load_realizations(config.realizations_from)
        if config.realizations_from else None
    )
    per_l = dict(zip(config.sizes, config.realizations))
    tasks = [
        (config, L, delta, index, haar_refs, table)
        for L in config.sizes
        for delta in config.deltas
        for index in range(per_l[L])
    ]
    spectral_names = [n for n in names if n not in ("haar-ref", "algebra-check")]
    records: list[ResultRecord] = []
    if spectral_names and tasks:
        workers = _resolve_workers(config)
        log.info(
            "sweep %s g=%s: %d tasks (sizes=%s, %d deltas), %d worker(s)",
            config.model, config.g, len(tasks), list(config.sizes),
            len(config.deltas), workers,
        )
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(
                max_workers=workers, initializer=_worker_init
            ) as pool:
                for done, batch in enumerate(pool.map(_run_task_args, tasks), 1):
                    records.extend(batch)
                    if done % 50 == 0:
                        log.info("  %d/%d tasks done", done, len(tasks))
        else:
            for done, task in enumerate(tasks, 1):
                records.extend(_run_task(*task))
                if done % 50 == 0:
                    log.info("  %d/%d tasks done", done, len(tasks))
    n_failures = len(
        {
            (r.L, r.delta, r.realization)
            for r in records
            if r.value is None and r.realization is not None
        }
    )
    records.extend(_aggregate(records, config, haar_refs))
    if "haar-ref" in names:
        records.extend(_haar_records(config, haar_refs))
    if "algebra-check" in names:
        records.extend(_algebra_records(config))
    records.sort(key=_sort_key)
    n_tasks = len(tasks) if spectral_names else 0
    return SweepOutcome(records=records, n_tasks=n_tasks, n_failures=n_failures)


def run_configs(configs: list[SweepConfig]) -> SweepOutcome:
    """Run several configs (a multi-panel preset) into one sorted record set."""
    all_records: list[ResultRecord] = []
    tasks = failures = 0
    for config in configs:
        outcome = run_sweep(config)
        all_records.extend(outcome.records)
        tasks += outcome.n_tasks
        failures += outcome.n_failures
    all_records.sort(key=_sort_key)
    return SweepOutcome(records=all_records, n_tasks=tasks, n_failures=failures)


def collect_realizations(config: SweepConfig) -> list[dict]:
    """The disorder realizations a sweep uses, as serializable records."""
    table = (
        load_realizations(config.realizations_from)
        if config.realizations_from else None
    )
    per_l = dict(zip(config.sizes, config.realizations))
    out = []
    for L in config.sizes:
        for delta in config.deltas:
            params = ModelParams(model=config.model, L=L, g=config.g, delta=delta)
            for index in range(per_l[L]):
                real = _task_realization(config, table, params, delta, index)
                out.append(realization_to_dict(params, real))
    return out


def write_realizations(configs: list[SweepConfig], path: str) -> None:
    seen = set()
    lines = []
    for config in configs:
        for rec in collect_realizations(config):
            key = (rec["model"], rec["L"], rec["delta"], rec["seed"], rec["index"])
            if key in seen:
                continue
            seen.add(key)
            lines.append(json.dumps(rec, sort_keys=True))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results(records: list[ResultRecord], path: str,
                  format: str = "csv") -> None:
    """Write records to CSV or JSON-lines (plus use write_meta for the sidecar)."""
    if format == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for rec in records:
            lines.append(",".join(
                _format_cell(getattr(rec, col)) for col in CSV_COLUMNS
            ))
        payload = "\n".join(lines) + "\n"
    elif format == "json-lines":
        lines = []
        for rec in records:
            data = {col: getattr(rec, col) for col in CSV_COLUMNS}
            if rec.extra:
                data["extra"] = rec.extra
            lines.append(json.dumps(data, sort_keys=False))
        payload = "\n".join(lines) + ("\n" if lines else "")
    else:
        raise ConfigError(f"format must be csv or json-lines, got {format!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(payload)


def config_hash(configs: list[SweepConfig]) -> str:
    canonical = json.dumps([asdict(c) for c in configs], sort_keys=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_meta(path: str, configs: list[SweepConfig],
               outcome: SweepOutcome) -> None:
    meta = {
        "config_hash": config_hash(configs),
        "tool_version": __version__,
        "records": len(outcome.records),
        "tasks": outcome.n_tasks,
        "failures": outcome.n_failures,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _parse_cell(text: str, kind: str):
    if text == "":
        return None
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    return text


def read_records(path: str, format: str | None = None) -> list[ResultRecord]:
    """Read records back from a results file (format inferred from suffix)."""
    if format is None:
        format = "json-lines" if path.endswith((".jsonl", ".json")) else "csv"
    records = []
    with open(path, encoding="utf-8") as fh:
        if format == "csv":
            header = fh.readline().strip()
            if header and header.split(",") != list(CSV_COLUMNS):
                raise ValueError(f"unexpected CSV header in {path}")
            kinds = {"L": "int", "seed": "int", "realization": "int",
                     "g": "float", "delta": "float", "time": "float",
                     "value": "float", "stderr": "float"}
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                cells = line.split(",")
                data = {
                    col: _parse_cell(cell, kinds.get(col, "str"))
                    for col, cell in zip(CSV_COLUMNS, cells)
                }
                records.append(ResultRecord(**data))
        else:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                data = json.loads(line)
                extra = data.pop("extra", {})
                records.append(ResultRecord(extra=extra, **data))
    return records


def replay_record(
    rec: ResultRecord,
    raw_time: bool = False,
    haar_samples: int = DEFAULT_HAAR_SAMPLES,
    haar_seed: int = DEFAULT_HAAR_SEED,
    haar_cache: str | None = None,
) -> float:
    """Recompute a per-realization record's value from its fields alone.

    Protocol parameters that are not stored in the record (cut position,
    string endpoints, correlation distance, saturation window) take their
    canonical defaults, which every sweep uses.
    """
    if rec.observable == "haar-ref":
        mean, _ = haar_reference(
            rec.L, partition_from_tag(rec.partition, rec.L),
            n_samples=rec.extra.get("n_samples", haar_samples),
            seed=rec.seed, cache_path=haar_cache,
        )
        return mean
    if rec.realization is None:
        raise ValueError("summary records are aggregates; replay their members")
    params = ModelParams(model=rec.model, L=rec.L, g=rec.g, delta=rec.delta)
    real = sample_realization(params, seed=rec.seed, index=rec.realization)
    spectrum = diagonalize(build_hamiltonian(params, real))
    time_scale = 1.0 if raw_time else 1.0 / params.W
    obs = rec.observable
    if obs == "eigenstate-ee":
        return eigenstate_half_chain_ee(spectrum).average
    if obs == "sg-correlator":
        return spin_glass_correlator(spectrum).average
    if obs == "string-order":
        return string_order(spectrum)[1]
    if obs == "gap-ratio":
        return gap_ratio(spectrum.eigenvalues)
    if obs.startswith("quench-ee:"):
        tag = obs.split(":", 1)[1]
        series = quench_ee_series(
            spectrum, initial_state(tag, rec.L), np.array([rec.time]),
            time_scale=time_scale,
        )
        return float(series.values[0])
    if obs in ("tmi-series", "tmi-saturation"):
        part = partition_from_tag(rec.partition, rec.L)
        mean, _ = haar_reference(rec.L, part, n_samples=haar_samples,
                                 seed=haar_seed, cache_path=haar_cache)
        if obs == "tmi-series":
            res = tmi(channel_state(spectrum, rec.time * time_scale), part)
            return res.i3 / mean
        _, normalized = saturation_tmi(spectrum, part, time_scale=time_scale,
                                       haar_mean=mean)
        return normalized
    raise ValueError(f"cannot replay observable {rec.observable!r}")
