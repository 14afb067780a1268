"""Channel-state construction, operator entanglement, TMI, and Haar baseline.

The unitary U(t) is mapped to a pure state on a doubled chain of 2L sites:
in-sites occupy bits 0..L-1 of the doubled index and out-sites bits L..2L-1,
so the coefficient matrix M = U(t)/sqrt(N), with rows indexing the out state
and columns the in state, flattens (C order) directly onto the doubled basis.
Input weights are infinite-temperature (p = 1/N).

Subsystems follow the site convention: A is the first L_A in-sites, B the
remaining in-sites, C the first L_C out-sites, D the remaining out-sites.
Reduced-state spectra come from a Gram matrix on the smaller side of the
kept/traced reshape, never from an explicit doubled-space density matrix.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace

import numpy as np

from .pauli import entropy_from_probabilities, partial_trace, von_neumann_entropy
from .spectral import Spectrum

EQUAL_HALF = "equal-half"
TWO_SITE = "two-site"
SATURATION_WINDOW = np.logspace(9.0, 10.0, 10)
DEFAULT_HAAR_SAMPLES = 20
DEFAULT_HAAR_SEED = 987654321

_SUBSYSTEM_AXES = {"A": 3, "B": 2, "C": 1, "D": 0}


@dataclass(frozen=True)
class Partition:
    """Four-subsystem split of the doubled chain.

    ``l_a`` in-sites form A (rest is B); ``l_c`` out-sites form C (rest is
    D).  The scheme tag names the construction for result records.
    """

    L: int
    l_a: int
    l_c: int
    scheme: str

    def __post_init__(self) -> None:
        if not (1 <= self.l_a <= self.L - 1 and 1 <= self.l_c <= self.L - 1):
            raise ValueError("subsystems A, B, C, D must all be nonempty")

    @property
    def l_b(self) -> int:
        return self.L - self.l_a

    @property
    def l_d(self) -> int:
        return self.L - self.l_c

    @classmethod
    def equal_half(cls, L: int) -> "Partition":
        if L % 2:
            raise ValueError("equal-half partition needs even L")
        return cls(L=L, l_a=L // 2, l_c=L // 2, scheme=EQUAL_HALF)

    @classmethod
    def two_site(cls, L: int) -> "Partition":
        """A = first two in-sites, D = last two out-sites."""
        return cls(L=L, l_a=2, l_c=L - 2, scheme=TWO_SITE)

    @classmethod
    def r_partition(cls, L: int, r: int) -> "Partition":
        if not 2 <= r <= L // 2:
            raise ValueError("r must satisfy 2 <= r <= L/2")
        return cls(L=L, l_a=r, l_c=L - r, scheme=f"r={r}")


def partition_from_tag(tag: str, L: int) -> Partition:
    """Build a partition from its scheme tag (``equal-half``, ``two-site``, ``r=3``)."""
    if tag == EQUAL_HALF:
        return Partition.equal_half(L)
    if tag == TWO_SITE:
        return Partition.two_site(L)
    if tag.startswith("r="):
        return Partition.r_partition(L, int(tag[2:]))
    raise ValueError(f"unknown partition tag {tag!r}")


@dataclass(frozen=True)
class ChannelState:
    """Doubled-space pure state of U(t) at infinite temperature."""

    matrix: np.ndarray
    L: int
    time: float

    def doubled_vector(self) -> np.ndarray:
        """The state as an explicit 4**L vector (debug/oracle use)."""
        return self.matrix.reshape(-1)


def channel_state(s: Spectrum, t: float) -> ChannelState:
    """U(t)/sqrt(N) with rows = out index, columns = in index.

    The two real matmuls (cosine and sine parts) beat one complex matmul on
    the real eigenvector matrices produced by these Hamiltonians.
    """
    L = s.n_sites
    v = s.eigenvectors
    angles = s.eigenvalues * t
    scale = 2.0 ** (-L / 2.0)
    if np.isrealobj(v):
        real = (v * (np.cos(angles) * scale)) @ v.T
        imag = (v * (np.sin(angles) * scale)) @ v.T
        matrix = real - 1j * imag
    else:
        phases = np.exp(-1j * angles) * scale
        matrix = (v * phases) @ v.conj().T
    norm = np.linalg.norm(matrix)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"channel state norm {norm!r} deviates from 1")
    return ChannelState(matrix=matrix, L=L, time=t)


def subsystem_oee(cs: ChannelState, part: Partition, which: str) -> float:
    """Operator entanglement entropy (bits) of a subsystem union.

    ``which`` is a string of distinct letters from ABCD, a nonempty proper
    subset.  The doubled-space tensor is permuted so the kept subsystems
    index rows; the entropy comes from the Gram matrix on the smaller side.
    """
    letters = sorted(set(which))
    if not letters or not set(letters) <= set("ABCD"):
        raise ValueError("which must be a nonempty subset of ABCD")
    if len(letters) == 4:
        raise ValueError("the full system is pure; keep a proper subset")
    if part.L != cs.L:
        raise ValueError("partition and channel state disagree on L")
    sizes = {"A": part.l_a, "B": part.l_b, "C": part.l_c, "D": part.l_d}
    tensor = cs.matrix.reshape(
        1 << part.l_d, 1 << part.l_c, 1 << part.l_b, 1 << part.l_a
    )
    kept_axes = [_SUBSYSTEM_AXES[x] for x in letters]
    traced_axes = [ax for ax in range(4) if ax not in kept_axes]
    kept_dim = 1 << sum(sizes[x] for x in letters)
    x = tensor.transpose(kept_axes + traced_axes).reshape(kept_dim, -1)
    if x.shape[0] <= x.shape[1]:
        gram = x @ x.conj().T
    else:
        gram = x.conj().T @ x
    probs = np.linalg.eigvalsh(gram)
    return entropy_from_probabilities(probs)


@dataclass(frozen=True)
class TmiResult:
    """BMIs and (normalized) TMI of one channel state and partition."""

    i_ac: float
    i_ad: float
    i_acd: float
    i3: float
    i3_normalized: float | None
    time: float
    partition: Partition
    provenance: str = ""

    def __post_init__(self) -> None:
        for name, value in (("I(A:C)", self.i_ac), ("I(A:D)", self.i_ad),
                            ("I(A:CD)", self.i_acd)):
            if value < -1e-9:
                raise ValueError(f"{name} = {value} violates BMI non-negativity")


def tmi(
    cs: ChannelState,
    part: Partition,
    haar_mean: float | None = None,
    provenance: str = "",
) -> TmiResult:
    """TMI from the purity shortcut I_3 = L - S_AC - S_AD (bits).

    I(A:CD) equals 2 L_A identically because the A marginal and the BCD
    complement are both maximally mixed.
    """
    s_ac = subsystem_oee(cs, part, "AC")
    s_ad = subsystem_oee(cs, part, "AD")
    i_ac = part.l_a + part.l_c - s_ac
    i_ad = part.l_a + part.l_d - s_ad
    i_acd = 2.0 * part.l_a
    i3 = i_ac + i_ad - i_acd
    return TmiResult(
        i_ac=i_ac,
        i_ad=i_ad,
        i_acd=i_acd,
        i3=i3,
        i3_normalized=None if haar_mean is None else i3 / haar_mean,
        time=cs.time,
        partition=part,
        provenance=provenance,
    )


def tmi_doubled_space(cs: ChannelState, part: Partition) -> TmiResult:
    """Definition-mode TMI from explicit reduced density matrices.

    Builds the 4**L doubled vector and evaluates every entropy in
    I_3 = I(A:C) + I(A:D) - I(A:CD) by partial trace.  Exponentially more
    expensive than :func:`tmi`; restricted to L <= 6 and used to cross-check
    the fast path.
    """
    if cs.L > 6:
        raise ValueError("definition-mode TMI is limited to L <= 6")
    L = cs.L
    vec = cs.doubled_vector()
    sites = {
        "A": list(range(0, part.l_a)),
        "B": list(range(part.l_a, L)),
        "C": list(range(L, L + part.l_c)),
        "D": list(range(L + part.l_c, 2 * L)),
    }

    def entropy(names: str) -> float:
        keep = sorted(sum((sites[x] for x in names), []))
        return von_neumann_entropy(partial_trace(vec, keep, 2 * L))

    s_a, s_c, s_d = entropy("A"), entropy("C"), entropy("D")
    i_ac = s_a + s_c - entropy("AC")
    i_ad = s_a + s_d - entropy("AD")
    i_acd = s_a + entropy("CD") - entropy("ACD")
    return TmiResult(
        i_ac=i_ac,
        i_ad=i_ad,
        i_acd=i_acd,
        i3=i_ac + i_ad - i_acd,
        i3_normalized=None,
        time=cs.time,
        partition=part,
        provenance="definition-mode",
    )


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the
    column phases fixed by the sign of the triangular diagonal."""
    ginibre = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    ginibre /= np.sqrt(2.0)
    q, r = np.linalg.qr(ginibre)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def _haar_rng(L: int, part: Partition, seed: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(L, part.l_a, part.l_c))
    return np.random.Generator(np.random.Philox(ss))


def haar_reference(
    L: int,
    part: Partition,
    n_samples: int = DEFAULT_HAAR_SAMPLES,
    seed: int = DEFAULT_HAAR_SEED,
    cache_path: str | None = None,
) -> tuple[float, float]:
    """Mean and standard error of I_3 over Haar-random unitaries.

    The cache (JSON map ``"L:LA:LC" -> {mean, stderr, n_samples, seed}``) is
    consulted first and only trusted when sample count and seed match.
    """
    if n_samples < 2:
        raise ValueError("need at least 2 samples for a standard error")
    key = f"{L}:{part.l_a}:{part.l_c}"
    cache: dict = {}
    if cache_path and os.path.exists(cache_path):
        with open(cache_path, encoding="utf-8") as fh:
            cache = json.load(fh)
        entry = cache.get(key)
        if entry and entry["n_samples"] == n_samples and entry["seed"] == seed:
            return entry["mean"], entry["stderr"]
    rng = _haar_rng(L, part, seed)
    dim = 1 << L
    values = np.empty(n_samples)
    for k in range(n_samples):
        unitary = haar_random_unitary(dim, rng)
        cs = ChannelState(matrix=unitary / np.sqrt(dim), L=L, time=0.0)
        values[k] = tmi(cs, part).i3
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(n_samples))
    if cache_path:
        cache[key] = {
            "mean": mean,
            "stderr": stderr,
            "n_samples": n_samples,
            "seed": seed,
        }
        with open(cache_path, "w", encoding="utf-8") as fh:
            json.dump(cache, fh, indent=1, sort_keys=True)
    return mean, stderr


def tmi_series(
    s: Spectrum,
    part: Partition,
    times: np.ndarray,
    time_scale: float = 1.0,
    haar_mean: float | None = None,
    provenance: str = "",
) -> list[TmiResult]:
    """TMI at each requested time (stored in input units)."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    results = []
    for t in times:
        cs = channel_state(s, t * time_scale)
        res = tmi(cs, part, haar_mean=haar_mean, provenance=provenance)
        results.append(replace(res, time=float(t)))
    return results


def saturation_tmi(
    s: Spectrum,
    part: Partition,
    time_scale: float = 1.0,
    haar_mean: float | None = None,
) -> tuple[float, float | None]:
    """Late-time saturation TMI: mean I_3 over the fixed window, normalized.

    Returns ``(raw mean, normalized mean)``; the second entry is None when
    no Haar mean is supplied.
    """
    values = [
        tmi(channel_state(s, t * time_scale), part).i3 for t in SATURATION_WINDOW
    ]
    raw = float(np.mean(values))
    return raw, (None if haar_mean is None else raw / haar_mean)
