"""Dense exact diagonalization in the full 2^L spin space.

Reference implementation for small chains (L <= 12).  Site operators are
built as Kronecker products with site 1 as the leftmost factor; the computational
basis state with bit value 1 at a site is the ``Z = -1`` state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .fcs import Distribution
from .model import ChainParams

MAX_DIM = 4096
GROUP_TOL = 1e-8
INTEGER_TOL = 1e-6

_I2 = sp.identity(2, format="csr", dtype=complex)
_PAULI = {
    "x": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
    "y": sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex)),
    "z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
}


@dataclass(frozen=True)
class DenseOperator:
    """Hermitian matrix on the 2^L spin space."""

    matrix: np.ndarray
    L: int

    def __post_init__(self):
        m = np.asarray(self.matrix)
        dim = 2 ** self.L
        if dim > MAX_DIM:
            raise ValueError(f"dimension 2^{self.L} exceeds the oracle limit {MAX_DIM}")
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not match 2^{self.L}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12:
            raise ValueError("operator is not Hermitian")
        if np.iscomplexobj(m) and not np.any(m.imag):
            m = m.real
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return 2 ** self.L


def _check_size(L: int):
    if L < 1 or 2 ** L > MAX_DIM:
        raise ValueError(f"L={L} outside the oracle range (2^L <= {MAX_DIM})")


def site_operator(axis: str, n: int, L: int) -> sp.csr_matrix:
    """Pauli ``axis`` on site ``n`` (1-based), identity elsewhere."""
    factors = [_I2] * L
    factors[n - 1] = _PAULI[axis]
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), factors)


def _bond(axis: str, n: int, L: int) -> sp.csr_matrix:
    m = n % L + 1
    return site_operator(axis, n, L) @ site_operator(axis, m, L)


def build_hamiltonian(params: ChainParams) -> DenseOperator:
    L, g, gamma = params.L, params.g, params.gamma
    _check_size(L)
    H = sp.csr_matrix((2 ** L, 2 ** L), dtype=complex)
    for n in range(1, L + 1):
        H = H - 0.5 * (1 + gamma) * _bond("x", n, L)
        if gamma != 1.0:
            H = H - 0.5 * (1 - gamma) * _bond("y", n, L)
        H = H - g * site_operator("z", n, L)
    return DenseOperator(H.toarray(), L)


def build_kink_operator(L: int) -> DenseOperator:
    """``N = 1/2 sum_n (1 - X_n X_{n+1})`` with periodic closure."""
    _check_size(L)
    eye = sp.identity(2 ** L, format="csr", dtype=complex)
    N = sum((0.5 * (eye - _bond("x", n, L)) for n in range(1, L + 1)), sp.csr_matrix(eye.shape))
    return DenseOperator(N.toarray(), L)


def build_magnetization_operator(L: int) -> DenseOperator:
    _check_size(L)
    M = sum((site_operator("z", n, L) for n in range(1, L + 1)), sp.csr_matrix((2 ** L, 2 ** L)))
    return DenseOperator(M.toarray(), L)


def parity_diagonal(L: int) -> np.ndarray:
    """Diagonal of ``prod_n Z_n`` in the computational basis."""
    idx = np.arange(2 ** L)
    popcount = np.array([bin(i).count("1") for i in idx])
    return 1 - 2 * (popcount % 2)


def build_parity_operator(L: int) -> DenseOperator:
    _check_size(L)
    return DenseOperator(np.diag(parity_diagonal(L)).astype(float), L)


def sector_spectra(H: DenseOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of ``H`` restricted to the ``Pi = +1`` and ``Pi = -1`` sectors.

    The parity operator is diagonal in the computational basis, so the sectors
    are index subsets; ``H`` must commute with it.
    """
    par = parity_diagonal(H.L)
    m = H.matrix
    plus, minus = np.flatnonzero(par == 1), np.flatnonzero(par == -1)
    if np.max(np.abs(m[np.ix_(plus, minus)]), initial=0.0) > 1e-12:
        raise ValueError("operator mixes parity sectors")
    return (np.linalg.eigvalsh(m[np.ix_(plus, plus)]),
            np.linalg.eigvalsh(m[np.ix_(minus, minus)]))


def _log_trace_exp(energies: np.ndarray, beta) -> np.ndarray:
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    a = -np.outer(beta, energies)
    amax = a.max(axis=1, keepdims=True)
    return (amax + np.log(np.exp(a - amax).sum(axis=1, keepdims=True)))[:, 0]


def parity_resolved_z(H: DenseOperator, L: int, beta):
    """``(tr[Pi+ e^{-beta H}], tr[Pi- e^{-beta H}])``; ``beta`` may be an array."""
    if H.L != L:
        raise ValueError("L does not match the operator")
    e_plus, e_minus = sector_spectra(H)
    zp = np.exp(_log_trace_exp(e_plus, beta))
    zm = np.exp(_log_trace_exp(e_minus, beta))
    if np.ndim(beta) == 0:
        return float(zp[0]), float(zm[0])
    return zp, zm


def log_parity_resolved_z(spectra: tuple[np.ndarray, np.ndarray], beta):
    """Natural logs of the sector traces from precomputed :func:`sector_spectra`."""
    return _log_trace_exp(spectra[0], beta), _log_trace_exp(spectra[1], beta)


def thermal_density(H: DenseOperator, beta: float) -> np.ndarray:
    E, V = np.linalg.eigh(H.matrix)
    w = np.exp(-beta * (E - E[0]))
    w /= w.sum()
    return (V * w) @ V.conj().T


def _weights_in_basis(W: DenseOperator, rho: np.ndarray):
    lam, U = np.linalg.eigh(W.matrix)
    weights = np.real(np.einsum("ij,ik,kj->j", U.conj(), rho, U))
    return lam, weights


def _group(lam: np.ndarray, weights: np.ndarray) -> Distribution:
    order = np.argsort(lam)
    lam, weights = lam[order], weights[order]
    breaks = np.flatnonzero(np.diff(lam) > GROUP_TOL) + 1
    values = np.array([seg.mean() for seg in np.split(lam, breaks)])
    probs = np.array([seg.sum() for seg in np.split(weights, breaks)])
    support = np.rint(values).astype(int)
    if np.max(np.abs(values - support)) > INTEGER_TOL:
        raise ValueError("observable eigenvalues are not integers")
    return Distribution(support, probs)


def thermal_fcs(W: DenseOperator, H: DenseOperator, beta: float) -> Distribution:
    """Eigenvalue distribution of ``W`` in the Gibbs state of ``H``.

    ``P(w) = tr[rho Pi_w]`` with ``Pi_w`` the eigenprojector of ``W``; the
    support lists only the eigenvalues that occur.
    """
    if W.L != H.L:
        raise ValueError("operator dimensions differ")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return _group(*_weights_in_basis(W, thermal_density(H, beta)))


def ground_state_fcs(W: DenseOperator, H: DenseOperator, sector: int = 1) -> Distribution:
    """Distribution of ``W`` in the lowest eigenstate of the given parity sector."""
    par = parity_diagonal(H.L)
    idx = np.flatnonzero(par == sector)
    E, V = np.linalg.eigh(H.matrix[np.ix_(idx, idx)])
    psi = np.zeros(H.dim, dtype=complex)
    psi[idx] = V[:, 0]
    return _group(*_weights_in_basis(W, np.outer(psi, psi.conj())))


def characteristic_function(W: DenseOperator, H: DenseOperator, beta: float, thetas) -> np.ndarray:
    """``tr[rho exp(i theta W)]`` summed over individual eigenvectors of ``W``."""
    lam, weights = _weights_in_basis(W, thermal_density(H, beta))
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    return np.exp(1j * np.outer(thetas, lam)) @ weights
