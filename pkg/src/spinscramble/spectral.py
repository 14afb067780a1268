"""Full diagonalization and eigenstate-resolved static observables.

All observables work on a :class:`Spectrum` (full eigendecomposition of one
disorder realization).  Entanglement entropies are in bits.  Mid-spectrum
quantities use a fixed window of 16 eigenstates centered on index N/2, which
keeps window averages reproducible across runs and realizations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import (
    PauliString,
    entropy_from_probabilities,
    pauli_expectations,
    sigma_x,
    sigma_y,
    sigma_z,
)

MID_WINDOW_SIZE = 16
DEGENERATE_GAP = 1e-12

# Mean gap ratio of an uncorrelated (Poisson) spectrum, 2 ln 2 - 1.
POISSON_GAP_RATIO = 2.0 * np.log(2.0) - 1.0


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and eigenvectors (columns) of one realization."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def n_sites(self) -> int:
        return int(round(np.log2(self.dimension)))


@dataclass(frozen=True)
class EigenstateObservable:
    """Per-eigenstate values plus their arithmetic mean over a window."""

    values: np.ndarray
    average: float
    window: str

    def __post_init__(self) -> None:
        if abs(self.average - float(np.mean(self.values))) > 1e-12:
            raise ValueError("average must equal the mean of the included values")


def diagonalize(hamiltonian: np.ndarray, provenance: str | None = None) -> Spectrum:
    """Full eigendecomposition of a dense Hermitian matrix.

    Eigensolver failures are rare but fatal for a sweep; they surface as a
    RuntimeError carrying the caller's provenance string so the offending
    realization can be identified and replayed.
    """
    try:
        evals, evecs = np.linalg.eigh(hamiltonian)
    except np.linalg.LinAlgError as exc:
        where = f" ({provenance})" if provenance else ""
        raise RuntimeError(f"eigensolver failed{where}: {exc}") from exc
    return Spectrum(eigenvalues=evals, eigenvectors=evecs)


def validate_spectrum(s: Spectrum, hamiltonian: np.ndarray) -> float:
    """Max-norm residual of H V - V Lambda (used by tests)."""
    resid = hamiltonian @ s.eigenvectors - s.eigenvectors * s.eigenvalues
    return float(np.abs(resid).max())


def mid_spectrum_indices(dimension: int, size: int = MID_WINDOW_SIZE) -> np.ndarray:
    """Indices of the ``size`` eigenstates centered on index N/2."""
    lo = max(0, dimension // 2 - size // 2)
    hi = min(dimension, lo + size)
    return np.arange(lo, hi)


def state_entanglement_entropies(states: np.ndarray, n_sites: int, cut: int) -> np.ndarray:
    """EE (bits) of each column state across the cut after site ``cut``-1.

    The kept block is the first ``cut`` sites (low bits); by pure-state
    complement symmetry the choice of side is immaterial.
    """
    if not 1 <= cut <= n_sites - 1:
        raise ValueError("cut must satisfy 1 <= cut <= L-1")
    dim = 1 << n_sites
    n_states = states.shape[1]
    tensors = np.ascontiguousarray(states.T).reshape(
        n_states, 1 << (n_sites - cut), 1 << cut
    )
    svals = np.linalg.svd(tensors, compute_uv=False)
    probs = svals**2
    return np.array([entropy_from_probabilities(row) for row in probs])


def eigenstate_half_chain_ee(
    s: Spectrum, cut: int | None = None
) -> EigenstateObservable:
    """Half-chain entanglement entropy of every eigenstate, in bits."""
    L = s.n_sites
    if cut is None:
        cut = L // 2
    values = state_entanglement_entropies(s.eigenvectors, L, cut)
    return EigenstateObservable(values, float(np.mean(values)), "all")


def spin_glass_correlator(
    s: Spectrum, states: np.ndarray | None = None, r: int | None = None
) -> EigenstateObservable:
    """Distance-r spin-glass correlator G_r over the selected eigenstates.

    G_r = (1/(L-r)) sum_i |<psi| sx_i sx_{i+r} |psi>|, one value per state.

    Parameters
    ----------
    states : ndarray of state indices, optional
        Defaults to the mid-spectrum window.
    r : int, optional
        Correlation distance, default L/2.
    """
    L = s.n_sites
    if r is None:
        r = L // 2
    if not 1 <= r <= L - 1:
        raise ValueError("distance must satisfy 1 <= r <= L-1")
    if states is None:
        states = mid_spectrum_indices(s.dimension)
    window = s.eigenvectors[:, states]
    total = np.zeros(len(states))
    for i in range(L - r):
        pair = sigma_x(i, L) * sigma_x(i + r, L)
        total += np.abs(pauli_expectations(pair, window))
    values = total / (L - r)
    return EigenstateObservable(values, float(np.mean(values)), f"mid{len(states)}")


def string_operator(i: int, j: int, n_sites: int) -> PauliString:
    """String operator sx_i sy_{i+1} (prod_{k=i+2}^{j-2} sz_k) sy_{j-1} sx_j."""
    if not (0 <= i and j <= n_sites - 1 and j >= i + 3):
        raise ValueError("endpoints must satisfy 0 <= i, j <= L-1, j >= i+3")
    op = sigma_x(i, n_sites) * sigma_y(i + 1, n_sites)
    for k in range(i + 2, j - 1):
        op = op * sigma_z(k, n_sites)
    return op * sigma_y(j - 1, n_sites) * sigma_x(j, n_sites)


def string_order(
    s: Spectrum,
    states: np.ndarray | None = None,
    i: int | None = None,
    j: int | None = None,
) -> tuple[np.ndarray, float]:
    """String-order expectation per selected eigenstate and its squared mean.

    Returns ``(o_st, phi_st)`` where ``o_st[k] = <psi_k| O_st |psi_k>`` and
    ``phi_st = mean(o_st**2)`` over the selected states.  Endpoints default
    to the maximal interior string (i, j) = (1, L-2).
    """
    L = s.n_sites
    if i is None:
        i = 1
    if j is None:
        j = L - 2
    op = string_operator(i, j, L)
    if states is None:
        states = mid_spectrum_indices(s.dimension)
    window = s.eigenvectors[:, states]
    o_st = pauli_expectations(op, window).real
    return o_st, float(np.mean(o_st**2))


def gap_ratio(eigenvalues: np.ndarray) -> float:
    """Mean consecutive-gap ratio r_n = min(g_n, g_{n+1})/max(g_n, g_{n+1}).

    Degenerate gaps (below 1e-12) contribute r_n = 0, which keeps parity
    doublets from producing 0/0.
    """
    evals = np.asarray(eigenvalues, dtype=float)
    if evals.size < 3:
        raise ValueError("gap ratio needs at least 3 eigenvalues")
    gaps = np.diff(evals)
    lo = np.minimum(gaps[:-1], gaps[1:])
    hi = np.maximum(gaps[:-1], gaps[1:])
    ratios = np.zeros_like(lo)
    ok = lo >= DEGENERATE_GAP
    ratios[ok] = lo[ok] / hi[ok]
    return float(np.mean(ratios))
