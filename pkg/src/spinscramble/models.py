"""Disorder ensembles, Hamiltonian builders, parity, and the duality map.

Two open-boundary chains are supported.

RandomIsing
    H = sum_i J_i sx_i sx_{i+1} + sum_i h_i sz_i + H_g,
    with J_i uniform on [0, W] and h_i uniform on [0, 1/W].

ExtendedCluster
    H = sum_i J_i sx_i sx_{i+1} + sum_{i=1}^{L-2} lambda_i sx_{i-1} sz_i sx_{i+1}
        + sum_i ht_i sz_i + H_g,
    with J_i uniform on [0, W], lambda_i uniform on [0, 1/W], and ht_i uniform
    on [0, 1] (fixed range, independent of W).

Both share the interaction H_g = g sum_i (sx_i sx_{i+2} + sz_i sz_{i+1}).
The single disorder knob is delta = 2 ln W; positive delta favors the bond
terms, negative delta the field/cluster terms.  Every sum is truncated so all
sites lie in 0..L-1.

Randomness comes from counter-based Philox streams keyed by
(master_seed, realization_index, array_tag), so regeneration is bit-for-bit
reproducible and independent of sampling order across realizations, arrays,
and worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliString, build_operator, sigma_x, sigma_z

RANDOM_ISING = "RandomIsing"
EXTENDED_CLUSTER = "ExtendedCluster"
MODELS = (RANDOM_ISING, EXTENDED_CLUSTER)

_STREAM_TAGS = {"J": 0, "h": 1, "lambda": 2, "h_tilde": 3, "dual_boundary": 4}


@dataclass(frozen=True)
class ModelParams:
    """Static parameters of one model point on the phase diagram."""

    model: str
    L: int
    g: float = 0.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        min_l = 3 if self.model == EXTENDED_CLUSTER else 2
        if self.L < min_l:
            raise ValueError(f"{self.model} needs L >= {min_l}, got {self.L}")
        if self.g < 0:
            raise ValueError("g must be non-negative")
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")

    @property
    def W(self) -> float:
        """Disorder-strength ratio W = exp(delta / 2)."""
        return math.exp(self.delta / 2.0)


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    """One sampled coupling set, with enough lineage to regenerate it.

    ``delta`` records the ensemble the arrays were drawn from; ``dual_depth``
    counts how many times the duality map has been applied (it keys the
    boundary resample stream), and ``derived_from`` is a human-readable
    provenance marker for derived realizations.
    """

    model: str
    L: int
    delta: float
    seed: int
    index: int
    J: np.ndarray
    h: np.ndarray | None = None
    lam: np.ndarray | None = None
    h_tilde: np.ndarray | None = None
    dual_depth: int = 0
    derived_from: str | None = None

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if len(self.J) != self.L - 1:
            raise ValueError("J must hold L-1 bond couplings")
        if self.model == RANDOM_ISING:
            if self.h is None or len(self.h) != self.L:
                raise ValueError("RandomIsing needs L field couplings h")
        else:
            if self.lam is None or len(self.lam) != self.L - 2:
                raise ValueError("ExtendedCluster needs L-2 cluster couplings")
            if self.h_tilde is None or len(self.h_tilde) != self.L:
                raise ValueError("ExtendedCluster needs L field couplings h_tilde")


def _stream(seed: int, index: int, tag: str, extra: int | None = None) -> np.random.Generator:
    key = (index, _STREAM_TAGS[tag]) if extra is None else (index, _STREAM_TAGS[tag], extra)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def sample_realization(params: ModelParams, seed: int, index: int) -> DisorderRealization:
    """Draw one disorder realization from deterministic counter-based streams.

    The same (seed, index) always reproduces identical arrays bit-for-bit,
    regardless of how many other realizations were drawn before or on which
    worker the call runs.
    """
    w = params.W
    L = params.L
    J = _stream(seed, index, "J").uniform(0.0, w, L - 1)
    if params.model == RANDOM_ISING:
        h = _stream(seed, index, "h").uniform(0.0, 1.0 / w, L)
        return DisorderRealization(params.model, L, params.delta, seed, index, J, h=h)
    lam = _stream(seed, index, "lambda").uniform(0.0, 1.0 / w, L - 2)
    h_tilde = _stream(seed, index, "h_tilde").uniform(0.0, 1.0, L)
    return DisorderRealization(
        params.model, L, params.delta, seed, index, J, lam=lam, h_tilde=h_tilde
    )


def hamiltonian_terms(
    params: ModelParams, r: DisorderRealization
) -> list[tuple[float, PauliString]]:
    """Pauli-string term list of the Hamiltonian for one realization."""
    if r.model != params.model or r.L != params.L:
        raise ValueError("realization does not match params (model or L)")
    L = params.L
    terms: list[tuple[float, PauliString]] = []
    for i in range(L - 1):
        terms.append((float(r.J[i]), sigma_x(i, L) * sigma_x(i + 1, L)))
    if params.model == RANDOM_ISING:
        for i in range(L):
            terms.append((float(r.h[i]), sigma_z(i, L)))
    else:
        for i in range(1, L - 1):
            cluster = sigma_x(i - 1, L) * sigma_z(i, L) * sigma_x(i + 1, L)
            terms.append((float(r.lam[i - 1]), cluster))
        for i in range(L):
            terms.append((float(r.h_tilde[i]), sigma_z(i, L)))
    if params.g != 0.0:
        for i in range(L - 2):
            terms.append((params.g, sigma_x(i, L) * sigma_x(i + 2, L)))
        for i in range(L - 1):
            terms.append((params.g, sigma_z(i, L) * sigma_z(i + 1, L)))
    return terms


def build_hamiltonian(params: ModelParams, r: DisorderRealization) -> np.ndarray:
    """Dense Hamiltonian matrix (float64; both models are real in this basis)."""
    return build_operator(hamiltonian_terms(params, r), params.L)


def parity_operator(L: int) -> np.ndarray:
    """Z2 parity P = prod_i sz_i, diagonal with entries (-1)^popcount(index)."""
    if L < 1:
        raise ValueError("L must be >= 1")
    idx = np.arange(1 << L)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx.astype(np.uint64)) & 1)
    return np.diag(signs)


def dual_realization(r: DisorderRealization) -> DisorderRealization:
    """Bond/field exchange mapping a RandomIsing realization to -delta.

    The index map is J'_i = h_{i+1} (i = 0..L-2) and h'_i = J_{i-1}
    (i = 1..L-1).  Open boundaries orphan one entry on each side of the map:
    h_0 is dropped and h'_0 is resampled from the dual field interval
    [0, exp(delta/2)] using a dedicated stream keyed additionally by the dual
    depth, so applying the map twice recovers every interior coupling exactly
    while the boundary entry stays independent.
    """
    if r.model != RANDOM_ISING:
        raise ValueError("duality map is defined for the RandomIsing chain only")
    depth = r.dual_depth + 1
    new_j = np.array(r.h[1:], dtype=float)
    new_h = np.empty(r.L, dtype=float)
    new_h[1:] = r.J
    # Dual ensemble has delta' = -delta, so its field interval is [0, W].
    w_orig = math.exp(r.delta / 2.0)
    new_h[0] = _stream(r.seed, r.index, "dual_boundary", extra=depth).uniform(0.0, w_orig)
    return DisorderRealization(
        RANDOM_ISING,
        r.L,
        -r.delta,
        r.seed,
        r.index,
        new_j,
        h=new_h,
        dual_depth=depth,
        derived_from=f"dual(seed={r.seed}, index={r.index}, depth={depth})",
    )


def tau_z(i: int, L: int) -> PauliString:
    """Dual-lattice operator tau^z_i = sx_i sx_{i+1} (bond variable)."""
    if not 0 <= i <= L - 2:
        raise ValueError("tau^z_i needs the bond (i, i+1) inside the chain")
    return PauliString(L, x_mask=(1 << i) | (1 << (i + 1)))


def tau_x(i: int, L: int) -> PauliString:
    """Dual-lattice operator tau^x_i = prod_{j<=i} sz_j (kink-flip string)."""
    if not 0 <= i <= L - 1:
        raise ValueError("site outside chain")
    return PauliString(L, z_mask=(1 << (i + 1)) - 1)


def realization_to_dict(params: ModelParams, r: DisorderRealization) -> dict:
    """JSON-serializable record for exact replication of a realization."""
    rec = {
        "model": r.model,
        "L": r.L,
        "g": params.g,
        "delta": r.delta,
        "seed": r.seed,
        "index": r.index,
        "J": [float(x) for x in r.J],
    }
    if r.model == RANDOM_ISING:
        rec["h"] = [float(x) for x in r.h]
    else:
        rec["lambda"] = [float(x) for x in r.lam]
        rec["h_tilde"] = [float(x) for x in r.h_tilde]
    if r.dual_depth:
        rec["dual_depth"] = r.dual_depth
    if r.derived_from:
        rec["derived_from"] = r.derived_from
    return rec


def realization_from_dict(rec: dict) -> tuple[ModelParams, DisorderRealization]:
    """Inverse of :func:`realization_to_dict`."""
    params = ModelParams(
        model=rec["model"], L=int(rec["L"]), g=float(rec.get("g", 0.0)),
        delta=float(rec["delta"]),
    )
    r = DisorderRealization(
        model=rec["model"],
        L=int(rec["L"]),
        delta=float(rec["delta"]),
        seed=int(rec["seed"]),
        index=int(rec["index"]),
        J=np.array(rec["J"], dtype=float),
        h=np.array(rec["h"], dtype=float) if "h" in rec else None,
        lam=np.array(rec["lambda"], dtype=float) if "lambda" in rec else None,
        h_tilde=np.array(rec["h_tilde"], dtype=float) if "h_tilde" in rec else None,
        dual_depth=int(rec.get("dual_depth", 0)),
        derived_from=rec.get("derived_from"),
    )
    return params, r


def realizations_equal(a: DisorderRealization, b: DisorderRealization) -> bool:
    """Bit-for-bit equality of the coupling arrays and identity fields."""
    if (a.model, a.L, a.delta, a.seed, a.index) != (b.model, b.L, b.delta, b.seed, b.index):
        return False
    pairs = ((a.J, b.J), (a.h, b.h), (a.lam, b.lam), (a.h_tilde, b.h_tilde))
    for x, y in pairs:
        if (x is None) != (y is None):
            return False
        if x is not None and not np.array_equal(x, y):
            return False
    return True
