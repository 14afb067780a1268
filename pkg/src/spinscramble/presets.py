"""Named sweep presets reproducing the figure protocols.

A preset resolves to a list of SweepConfig panels sharing one output file;
multi-panel names (fig1, fig6, ...) bundle their single-panel variants.
Every preset uses the same master seed, so reruns are byte-identical and
presets that share (model, L, delta, seed) draw identical disorder.
"""

from __future__ import annotations

from .models import EXTENDED_CLUSTER, RANDOM_ISING
from .sweep import ConfigError, DEFAULT_MASTER_SEED, SweepConfig, config_from_dict

INTEGER_DELTAS = (-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0)
# finer grid near the transitions so equal-size curves resolve their crossings
TMI_DELTAS = (-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 2.5, 3.0, 4.0)

_EIGENSTATE_SIZES = (8, 9, 10, 11, 12)
_EIGENSTATE_COUNTS = (1000, 750, 500, 300, 150)
_ORDER_SIZES = (8, 10, 12)
_ORDER_COUNTS = (1250, 1250, 1250)
_SATURATION_SIZES = (8, 10, 12)
_SATURATION_COUNTS = (1000, 500, 100)

_RAW_PRESETS: dict[str, list[dict]] = {
    "fig1a": [dict(model=RANDOM_ISING, g=0.2, sizes=_EIGENSTATE_SIZES,
                   realizations=_EIGENSTATE_COUNTS, deltas=INTEGER_DELTAS,
                   observables=("eigenstate-ee",))],
    "fig1b": [dict(model=RANDOM_ISING, g=0.2, sizes=_ORDER_SIZES,
                   realizations=_ORDER_COUNTS, deltas=INTEGER_DELTAS,
                   observables=("sg-correlator",))],
    "fig2a": [dict(model=EXTENDED_CLUSTER, g=0.2, sizes=_EIGENSTATE_SIZES,
                   realizations=_EIGENSTATE_COUNTS, deltas=INTEGER_DELTAS,
                   observables=("eigenstate-ee",))],
    "fig2b": [dict(model=EXTENDED_CLUSTER, g=0.2, sizes=_ORDER_SIZES,
                   realizations=_ORDER_COUNTS, deltas=INTEGER_DELTAS,
                   observables=("string-order",))],
    "fig4": [dict(model=RANDOM_ISING, g=0.0, sizes=(12,), realizations=(50,),
                  deltas=INTEGER_DELTAS, observables=("quench-ee",),
                  initial_states=("Z:all-up",))],
    "fig5a": [dict(model=RANDOM_ISING, g=0.2, sizes=(12,), realizations=(50,),
                   deltas=INTEGER_DELTAS, observables=("quench-ee",),
                   initial_states=("Z:all-up",))],
    "fig5b": [dict(model=RANDOM_ISING, g=0.2, sizes=(12,), realizations=(50,),
                   deltas=INTEGER_DELTAS, observables=("quench-ee",),
                   initial_states=("X:all-up",))],
    "fig6a": [dict(model=RANDOM_ISING, g=0.0, sizes=(12,), realizations=(10,),
                   deltas=TMI_DELTAS, observables=("tmi-series",),
                   partitions=("equal-half",), store_realizations=True)],
    "fig6b": [dict(model=RANDOM_ISING, g=0.2, sizes=(12,), realizations=(10,),
                   deltas=TMI_DELTAS, observables=("tmi-series",),
                   partitions=("equal-half",), store_realizations=True)],
    "fig7a": [dict(model=RANDOM_ISING, g=0.0, sizes=_SATURATION_SIZES,
                   realizations=_SATURATION_COUNTS, deltas=INTEGER_DELTAS,
                   observables=("tmi-saturation",), partitions=("equal-half",))],
    "fig7b": [dict(model=RANDOM_ISING, g=0.2, sizes=_SATURATION_SIZES,
                   realizations=_SATURATION_COUNTS, deltas=INTEGER_DELTAS,
                   observables=("tmi-saturation",), partitions=("equal-half",))],
    "fig8": [dict(model=EXTENDED_CLUSTER, g=0.2, sizes=(12,), realizations=(50,),
                  deltas=INTEGER_DELTAS, observables=("quench-ee",),
                  initial_states=("X:all-up",))],
    "fig9a": [dict(model=EXTENDED_CLUSTER, g=0.0, sizes=_SATURATION_SIZES,
                   realizations=_SATURATION_COUNTS, deltas=INTEGER_DELTAS,
                   observables=("tmi-saturation",), partitions=("equal-half",))],
    "fig9b": [dict(model=EXTENDED_CLUSTER, g=0.2, sizes=_SATURATION_SIZES,
                   realizations=_SATURATION_COUNTS, deltas=INTEGER_DELTAS,
                   observables=("tmi-saturation",), partitions=("equal-half",))],
    "fig10a": [dict(model=RANDOM_ISING, g=0.2, sizes=_SATURATION_SIZES,
                    realizations=_SATURATION_COUNTS, deltas=INTEGER_DELTAS,
                    observables=("tmi-saturation",), partitions=("two-site",))],
    "fig10b": [dict(model=EXTENDED_CLUSTER, g=0.2, sizes=_SATURATION_SIZES,
                    realizations=_SATURATION_COUNTS, deltas=INTEGER_DELTAS,
                    observables=("tmi-saturation",), partitions=("two-site",))],
    "fig11": [dict(model=RANDOM_ISING, g=0.2, sizes=(12,), realizations=(100,),
                   deltas=(-4.0, 4.0), observables=("tmi-saturation",),
                   partitions=("r=2", "r=3", "r=4", "r=5", "r=6")),
              dict(model=EXTENDED_CLUSTER, g=0.2, sizes=(12,),
                   realizations=(100,), deltas=(-4.0,),
                   observables=("tmi-saturation",),
                   partitions=("r=2", "r=3", "r=4", "r=5", "r=6"))],
    "fig12": [dict(model=RANDOM_ISING, g=0.0, sizes=(8, 10, 12),
                   realizations=(10, 10, 10), deltas=(2.0, 2.5),
                   observables=("tmi-series",), partitions=("equal-half",),
                   time_grid="extended")],
}
_RAW_PRESETS["fig1"] = _RAW_PRESETS["fig1a"] + _RAW_PRESETS["fig1b"]
_RAW_PRESETS["fig2"] = _RAW_PRESETS["fig2a"] + _RAW_PRESETS["fig2b"]
_RAW_PRESETS["fig5"] = _RAW_PRESETS["fig5a"] + _RAW_PRESETS["fig5b"]
_RAW_PRESETS["fig6"] = _RAW_PRESETS["fig6a"] + _RAW_PRESETS["fig6b"]
_RAW_PRESETS["fig7"] = _RAW_PRESETS["fig7a"] + _RAW_PRESETS["fig7b"]
_RAW_PRESETS["fig9"] = _RAW_PRESETS["fig9a"] + _RAW_PRESETS["fig9b"]
_RAW_PRESETS["fig10"] = _RAW_PRESETS["fig10a"] + _RAW_PRESETS["fig10b"]

PRESETS = tuple(sorted(_RAW_PRESETS))

_OVERRIDE_KEYS = set(SweepConfig.__dataclass_fields__)


def preset_configs(name: str, overrides: dict | None = None) -> list[SweepConfig]:
    """Resolve a preset name (plus CLI overrides) into its config panels."""
    if name not in _RAW_PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    overrides = dict(overrides or {})
    unknown = set(overrides) - _OVERRIDE_KEYS
    if unknown:
        raise ConfigError(f"unknown override keys: {sorted(unknown)}")
    configs = []
    for panel in _RAW_PRESETS[name]:
        data = dict(panel)
        data.setdefault("seed", DEFAULT_MASTER_SEED)
        data.update(overrides)
        if "sizes" in overrides and "realizations" not in overrides:
            # shrinking the size list needs a matching count list
            per_l = dict(zip(panel["sizes"], _as_tuple(panel["realizations"])))
            try:
                data["realizations"] = tuple(
                    per_l[int(L)] for L in _as_tuple(overrides["sizes"])
                )
            except KeyError as exc:
                raise ConfigError(
                    f"size {exc} not in preset {name!r}; pass realizations too"
                )
        configs.append(config_from_dict(data))
    return configs


def _as_tuple(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)
