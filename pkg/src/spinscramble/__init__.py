"""Exact-diagonalization toolkit for disordered spin chains.

Computes eigenstate entanglement, spin-glass and string order, quench
dynamics, and operator-entanglement diagnostics (tripartite mutual
information with Haar normalization) for two disordered chains, plus a
seeded sweep harness with CSV/JSON-lines output.
"""

__version__ = "0.1.0"

from .models import (
    EXTENDED_CLUSTER,
    MODELS,
    RANDOM_ISING,
    DisorderRealization,
    ModelParams,
    build_hamiltonian,
    dual_realization,
    hamiltonian_terms,
    sample_realization,
)
from .pauli import (
    PauliString,
    build_operator,
    entanglement_entropy,
    identity,
    partial_trace,
    pauli_apply,
    sigma_x,
    sigma_y,
    sigma_z,
    von_neumann_entropy,
)
from .quench import (
    default_time_grid,
    evolve,
    extended_time_grid,
    initial_state,
    product_state,
    quench_ee_series,
    QuenchSeries,
)
from .scrambling import (
    ChannelState,
    Partition,
    channel_state,
    haar_reference,
    partition_from_tag,
    saturation_tmi,
    subsystem_oee,
    tmi,
    tmi_series,
    TmiResult,
)
from .spectral import (
    diagonalize,
    eigenstate_half_chain_ee,
    gap_ratio,
    spin_glass_correlator,
    Spectrum,
    string_order,
)
from .sweep import (
    ConfigError,
    ResultRecord,
    SweepConfig,
    SweepOutcome,
    config_from_dict,
    read_records,
    replay_record,
    run_configs,
    run_sweep,
    write_meta,
    write_results,
)

__all__ = [
    "__version__",
    "EXTENDED_CLUSTER",
    "MODELS",
    "RANDOM_ISING",
    "DisorderRealization",
    "ModelParams",
    "build_hamiltonian",
    "dual_realization",
    "hamiltonian_terms",
    "sample_realization",
    "PauliString",
    "build_operator",
    "entanglement_entropy",
    "identity",
    "partial_trace",
    "pauli_apply",
    "sigma_x",
    "sigma_y",
    "sigma_z",
    "von_neumann_entropy",
    "default_time_grid",
    "evolve",
    "extended_time_grid",
    "initial_state",
    "product_state",
    "quench_ee_series",
    "QuenchSeries",
    "ChannelState",
    "Partition",
    "channel_state",
    "haar_reference",
    "partition_from_tag",
    "saturation_tmi",
    "subsystem_oee",
    "tmi",
    "tmi_series",
    "TmiResult",
    "diagonalize",
    "eigenstate_half_chain_ee",
    "gap_ratio",
    "spin_glass_correlator",
    "Spectrum",
    "string_order",
    "ConfigError",
    "ResultRecord",
    "SweepConfig",
    "SweepOutcome",
    "config_from_dict",
    "read_records",
    "replay_record",
    "run_configs",
    "run_sweep",
    "write_meta",
    "write_results",
]
