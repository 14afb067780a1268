"""Pauli-string algebra, dense operators, partial traces, and entropies.

Basis convention (global, inherited by every other module): the computational
basis diagonalizes sigma^z on every site; bit i of a basis index is the
sigma^z quantum number of site i, with site 0 the least significant bit and
bit value 0 meaning spin up (sigma^z = +1).  The all-up product state is
therefore basis index 0.

A Pauli string is stored in symplectic form: an X bitmask (sites carrying
sigma^x or sigma^y), a Z bitmask (sites carrying sigma^z or sigma^y), and an
overall phase restricted to {+1, -1, +i, -i}.  sigma^y is represented as
i * (sigma^x sigma^z) on its site, so the set of strings is closed under
multiplication with exact phase tracking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_VALID_PHASES = (1 + 0j, -1 + 0j, 1j, -1j)

# Eigenvalue handling for entropies (double-precision eigensolver noise).
EIGENVALUE_FLOOR = 1e-14
NEGATIVITY_TOLERANCE = -1e-8


def _parity(values: np.ndarray | int) -> np.ndarray | int:
    """Popcount parity (0 or 1) of non-negative integers, vectorized."""
    counts = np.bitwise_count(np.asarray(values, dtype=np.uint64))
    return counts & 1


@dataclass(frozen=True)
class PauliString:
    """A signed multi-site Pauli operator on ``n_sites`` spins.

    Parameters
    ----------
    n_sites : int
        Chain length L; masks must fit in L bits.
    x_mask, z_mask : int
        Bitmasks of the sites carrying an X-type / Z-type factor.  A site
        set in both masks carries sigma^y (up to the tracked phase).
    phase : complex
        One of +1, -1, +i, -i.
    """

    n_sites: int
    x_mask: int = 0
    z_mask: int = 0
    phase: complex = 1 + 0j

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        limit = 1 << self.n_sites
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError("mask sets bits outside sites 0..L-1")
        if complex(self.phase) not in _VALID_PHASES:
            raise ValueError(f"phase must be one of {{+1,-1,+i,-i}}, got {self.phase}")
        object.__setattr__(self, "phase", complex(self.phase))

    def __mul__(self, other: "PauliString") -> "PauliString":
        """Operator product self * other (self applied after other)."""
        if not isinstance(other, PauliString):
            return NotImplemented
        if self.n_sites != other.n_sites:
            raise ValueError("cannot multiply PauliStrings of different lengths")
        # Reordering Z(z1) past X(x2) costs (-1)^{|z1 & x2|}.
        sign = -1.0 if _parity(self.z_mask & other.x_mask) else 1.0
        return PauliString(
            self.n_sites,
            self.x_mask ^ other.x_mask,
            self.z_mask ^ other.z_mask,
            self.phase * other.phase * sign,
        )

    def dagger(self) -> "PauliString":
        """Hermitian adjoint."""
        sign = -1.0 if _parity(self.x_mask & self.z_mask) else 1.0
        return PauliString(
            self.n_sites, self.x_mask, self.z_mask, np.conj(self.phase) * sign
        )

    @property
    def is_hermitian(self) -> bool:
        sign = -1.0 if _parity(self.x_mask & self.z_mask) else 1.0
        return np.conj(self.phase) * sign == self.phase

    @property
    def weight(self) -> int:
        """Number of sites acted on non-trivially."""
        return int(np.bitwise_count(np.uint64(self.x_mask | self.z_mask)))

    def commutes_with(self, other: "PauliString") -> bool:
        """True if the two strings commute (they otherwise anticommute)."""
        return bool(
            _parity(self.z_mask & other.x_mask) == _parity(self.x_mask & other.z_mask)
        )

    def apply(self, basis_index: int) -> tuple[int, complex]:
        """Apply to a basis state; see :func:`pauli_apply`."""
        return pauli_apply(self, basis_index)

    def to_matrix(self) -> np.ndarray:
        """Dense (2^L, 2^L) complex matrix of the operator."""
        dim = 1 << self.n_sites
        idx = np.arange(dim)
        signs = 1.0 - 2.0 * _parity(idx & self.z_mask)
        mat = np.zeros((dim, dim), dtype=complex)
        mat[idx ^ self.x_mask, idx] = self.phase * signs
        return mat

    def __str__(self) -> str:
        factors = []
        for site in range(self.n_sites):
            bit = 1 << site
            x, z = bool(self.x_mask & bit), bool(self.z_mask & bit)
            if x and z:
                factors.append(f"Y{site}")
            elif x:
                factors.append(f"X{site}")
            elif z:
                factors.append(f"Z{site}")
        body = " ".join(factors) if factors else "I"
        sign = {1 + 0j: "+1", -1 + 0j: "-1", 1j: "+i", -1j: "-i"}[self.phase]
        return f"({sign}) {body}"


def identity(n_sites: int) -> PauliString:
    return PauliString(n_sites)


def sigma_x(site: int, n_sites: int) -> PauliString:
    _check_site(site, n_sites)
    return PauliString(n_sites, x_mask=1 << site)


def sigma_y(site: int, n_sites: int) -> PauliString:
    # sigma^y = i * sigma^x sigma^z
    _check_site(site, n_sites)
    return PauliString(n_sites, x_mask=1 << site, z_mask=1 << site, phase=1j)


def sigma_z(site: int, n_sites: int) -> PauliString:
    _check_site(site, n_sites)
    return PauliString(n_sites, z_mask=1 << site)


def _check_site(site: int, n_sites: int) -> None:
    if not 0 <= site < n_sites:
        raise ValueError(f"site {site} outside chain of length {n_sites}")


def pauli_apply(p: PauliString, basis_index: int) -> tuple[int, complex]:
    """Apply a Pauli string to a computational basis state.

    Returns the unique pair ``(result_index, phase)`` with
    ``p |basis_index> = phase * |result_index>``.
    """
    if not 0 <= basis_index < (1 << p.n_sites):
        raise ValueError("basis index outside the Hilbert space")
    sign = -1.0 if _parity(p.z_mask & basis_index) else 1.0
    return basis_index ^ p.x_mask, p.phase * sign


def pauli_expectations(p: PauliString, states: np.ndarray) -> np.ndarray:
    """Expectation values <psi|p|psi> for a batch of state vectors.

    Parameters
    ----------
    p : PauliString
    states : ndarray, shape (2^L,) or (2^L, n_states)
        State vectors as columns.

    Returns
    -------
    ndarray of complex, shape () or (n_states,)
    """
    states = np.asarray(states)
    dim = 1 << p.n_sites
    if states.shape[0] != dim:
        raise ValueError("state dimension does not match the Pauli string")
    idx = np.arange(dim)
    signs = 1.0 - 2.0 * _parity(idx & p.z_mask)
    flipped = states[idx ^ p.x_mask]
    weights = (p.phase * signs) if p.phase != 1 else signs
    if states.ndim == 1:
        return np.sum(np.conj(flipped) * weights * states)
    return np.einsum("ik,i,ik->k", np.conj(flipped), weights, states)


def build_operator(
    terms: list[tuple[float, PauliString]], n_sites: int
) -> np.ndarray:
    """Dense Hermitian operator Sum_k c_k P_k in the fixed basis convention.

    Parameters
    ----------
    terms : list of (coefficient, PauliString)
        Coefficients must be real and finite; every string must be
        self-adjoint (an odd sigma^y count must pair with an imaginary
        phase), otherwise the term set is rejected.
    n_sites : int
        Chain length; all strings must match.

    Returns
    -------
    ndarray, shape (2^L, 2^L)
        float64 when every term phase is real, complex128 otherwise.
    """
    dim = 1 << n_sites
    any_imag = False
    for coeff, p in terms:
        if p.n_sites != n_sites:
            raise ValueError("term length does not match n_sites")
        if not np.isfinite(coeff) or np.iscomplexobj(coeff) and coeff.imag != 0:
            raise ValueError("coefficients must be real and finite")
        if not p.is_hermitian:
            raise ValueError(
                f"non-Hermitian term {p}: sigma^y count and phase disagree"
            )
        any_imag = any_imag or p.phase.imag != 0
    dtype = complex if any_imag else float
    ham = np.zeros((dim, dim), dtype=dtype)
    idx = np.arange(dim)
    for coeff, p in terms:
        signs = 1.0 - 2.0 * _parity(idx & p.z_mask)
        amp = coeff * (p.phase if any_imag else p.phase.real) * signs
        # b -> b ^ x_mask is a bijection, so the index pairs are unique.
        ham[idx ^ p.x_mask, idx] += amp
    return ham


def check_hermitian(mat: np.ndarray, rtol: float = 1e-12) -> None:
    """Raise unless ``mat`` is Hermitian to within ``rtol`` (relative max-norm)."""
    scale = max(np.abs(mat).max(), 1.0)
    dev = np.abs(mat - mat.conj().T).max()
    if dev > rtol * scale:
        raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e}")


def check_density_matrix(
    rho: np.ndarray, trace_tol: float = 1e-10, eig_tol: float = -1e-10
) -> None:
    """Validate the density-matrix contract: trace 1, eigenvalues >= eig_tol."""
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} not 1 within {trace_tol}")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < eig_tol:
        raise ValueError(f"density matrix has eigenvalue {evals.min():.3e}")


def partial_trace(state: np.ndarray, keep, n_sites: int | None = None) -> np.ndarray:
    """Reduced density matrix over the ``keep`` sites.

    Parameters
    ----------
    state : ndarray
        Unit vector of length 2^L, or a (2^L, 2^L) density matrix.
    keep : iterable of int
        Sites to keep.  Bit j of the reduced index is the j-th smallest
        kept site, consistent with the global convention.  An empty set
        yields the (1, 1) matrix [[trace]].
    n_sites : int, optional
        Chain length; inferred from the state dimension when omitted.

    Returns
    -------
    ndarray, shape (2^k, 2^k)
    """
    state = np.asarray(state)
    dim = state.shape[0]
    if n_sites is None:
        n_sites = int(round(np.log2(dim)))
    if dim != 1 << n_sites:
        raise ValueError("state dimension is not 2^L")
    keep = sorted(set(int(s) for s in keep))
    if keep and (keep[0] < 0 or keep[-1] >= n_sites):
        raise ValueError("keep-set outside sites 0..L-1")
    traced = [s for s in range(n_sites) if s not in keep]
    # In C order, axis k of a [2]*L reshape corresponds to site L-1-k.
    kept_axes = [n_sites - 1 - s for s in reversed(keep)]
    traced_axes = [n_sites - 1 - s for s in reversed(traced)]
    k_dim, t_dim = 1 << len(keep), 1 << len(traced)

    if state.ndim == 1:
        tensor = state.reshape([2] * n_sites).transpose(kept_axes + traced_axes)
        mat = tensor.reshape(k_dim, t_dim)
        return mat @ mat.conj().T
    if state.ndim == 2:
        if state.shape != (dim, dim):
            raise ValueError("density matrix must be square")
        row_axes = kept_axes + traced_axes
        col_axes = [a + n_sites for a in row_axes]
        tensor = state.reshape([2] * (2 * n_sites)).transpose(row_axes + col_axes)
        tensor = tensor.reshape(k_dim, t_dim, k_dim, t_dim)
        return np.einsum("itjt->ij", tensor)
    raise ValueError("state must be a vector or a square matrix")


def entropy_from_probabilities(
    weights: np.ndarray,
    floor: float = EIGENVALUE_FLOOR,
    negativity_tolerance: float = NEGATIVITY_TOLERANCE,
) -> float:
    """Shannon entropy in bits of a probability vector, with noise floors.

    Weights below ``floor`` are treated as exact zeros; a weight below
    ``negativity_tolerance`` signals an invalid spectrum and raises.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.size and weights.min() < negativity_tolerance:
        raise ValueError(
            f"probability {weights.min():.3e} below tolerance {negativity_tolerance:.0e}"
        )
    nz = weights[weights >= floor]
    if nz.size == 0:
        return 0.0
    return float(-np.sum(nz * np.log2(nz)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy of a density matrix, in bits (log base 2)."""
    evals = np.linalg.eigvalsh(rho)
    return entropy_from_probabilities(evals)


def entanglement_entropy(state: np.ndarray, keep, n_sites: int | None = None) -> float:
    """Entanglement entropy (bits) of a pure state across the given bipartition."""
    return von_neumann_entropy(partial_trace(state, keep, n_sites))


# ---------------------------------------------------------------------------
# Cluster-operator algebra self-checks
# ---------------------------------------------------------------------------

def cluster_k(i: int, n_sites: int) -> PauliString:
    """Three-site cluster operator K_i = sigma^x_{i-1} sigma^z_i sigma^x_{i+1}."""
    if not 1 <= i <= n_sites - 2:
        raise ValueError("K_i needs both neighbors: 1 <= i <= L-2")
    return sigma_x(i - 1, n_sites) * sigma_z(i, n_sites) * sigma_x(i + 1, n_sites)


def verify_cluster_algebra(n_sites: int, i: int) -> dict[str, float]:
    """Max-norm residuals of the hard-core-boson identities around site i.

    Builds K_i, the ladder pair K^+-_i = (sigma^x_i +- i sigma^x_{i-1}
    sigma^y_i sigma^x_{i+1}) / 2, and the Majorana pair chi^1_i = K^+ + K^-,
    chi^2_i = (K^+ - K^-)/i as dense matrices, and reports the residuals of
    the defining identities.  Residuals above 1e-12 indicate a bug in the
    phase bookkeeping.
    """
    if not 1 <= i <= n_sites - 2:
        raise ValueError("interior site required: 1 <= i <= L-2")
    dim = 1 << n_sites
    eye = np.eye(dim)
    k_mat = cluster_k(i, n_sites).to_matrix()
    x_i = sigma_x(i, n_sites).to_matrix()
    xyx = (
        sigma_x(i - 1, n_sites) * sigma_y(i, n_sites) * sigma_x(i + 1, n_sites)
    ).to_matrix()
    k_plus = 0.5 * (x_i + 1j * xyx)
    k_minus = 0.5 * (x_i - 1j * xyx)
    chi1 = k_plus + k_minus
    chi2 = (k_plus - k_minus) / 1j

    def mx(a: np.ndarray) -> float:
        return float(np.abs(a).max())

    return {
        "(K+)^2=0": mx(k_plus @ k_plus),
        "(K-)^2=0": mx(k_minus @ k_minus),
        "K+dag=K-": mx(k_plus.conj().T - k_minus),
        "K+K-+K-K+=1": mx(k_plus @ k_minus + k_minus @ k_plus - eye),
        "K+K-=(1+K)/2": mx(k_plus @ k_minus - 0.5 * (eye + k_mat)),
        "[K,K+]=2K+": mx(k_mat @ k_plus - k_plus @ k_mat - 2.0 * k_plus),
        "[K,K-]=-2K-": mx(k_mat @ k_minus - k_minus @ k_mat + 2.0 * k_minus),
        "{chi1,chi2}=0": mx(chi1 @ chi2 + chi2 @ chi1),
        "(chi1)^2=1": mx(chi1 @ chi1 - eye),
        "(chi2)^2=1": mx(chi2 @ chi2 - eye),
    }
