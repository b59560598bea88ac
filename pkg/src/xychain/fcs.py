"""Full counting statistics of quadratic observables in the thermal state.

An observable ``W = offset + sum_k W_k`` is described per mode pair by a 2x2
block on the even slots (``block_w1``) and the two eigenvalues of its block
on the odd slots (``w2_eigs``), plus diagonals on the unpaired ``0`` and
``pi`` modes.  Its characteristic function ``tr[rho exp(i theta W)]`` is a
trigonometric polynomial; sampling it on an exact grid and applying an inverse
DFT gives the integer-supported eigenvalue distribution.

Per-mode factors are divided by their ``theta = 0`` values so that they stay
O(1); the dropped normalizers are exactly ``Z_F+`` and ``Z_F-`` and are put
back in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import comb, expit

from .model import ChainParams, Thermal, bogoliubov_angle, dispersion, momentum_grids
from .partition import PartitionBreakdown, parallel_map, z_exact

IMAG_TOL = 1e-10
NEG_TOL = 1e-12

LIMITS = ("ground_state", "infinite_temperature")
OBSERVABLES = ("kinks", "magnetization")


@dataclass(frozen=True)
class QuadraticObservable:
    name: str
    block_w1: Callable[[np.ndarray], np.ndarray]
    w2_eigs: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    zero_mode: tuple[float, float]
    pi_mode: tuple[float, float]
    offset: float
    support_step: int
    support_min: int
    support_max: int

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_max + 1, self.support_step)

    @property
    def n_support(self) -> int:
        return (self.support_max - self.support_min) // self.support_step + 1


@dataclass(frozen=True)
class CharacteristicSamples:
    thetas: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class Distribution:
    """Probabilities on an integer support."""

    support: np.ndarray
    probs: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        s = np.asarray(self.support)
        p = np.asarray(self.probs, dtype=float)
        if s.shape != p.shape or s.ndim != 1:
            raise ValueError("support and probs must be 1-d arrays of equal length")
        object.__setattr__(self, "support", s.astype(int))
        object.__setattr__(self, "probs", p)

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def on_support(self, support) -> np.ndarray:
        """Probabilities re-indexed onto ``support``; missing values are zero."""
        lookup = dict(zip(self.support.tolist(), self.probs.tolist()))
        extra = set(lookup) - set(np.asarray(support).tolist())
        if any(abs(lookup[v]) > 0 for v in extra):
            raise ValueError(f"distribution has weight outside the requested support: {sorted(extra)}")
        return np.array([lookup.get(v, 0.0) for v in np.asarray(support).tolist()])

    def probability(self, value: int) -> float:
        hit = np.flatnonzero(self.support == value)
        return float(self.probs[hit[0]]) if hit.size else 0.0


@dataclass(frozen=True)
class CumulantSet:
    kappa: tuple[float, ...]

    def __getitem__(self, order: int) -> float:
        """Cumulant of the given order (1-based)."""
        return self.kappa[order - 1]

    @property
    def m_max(self) -> int:
        return len(self.kappa)


# --- built-in observables -------------------------------------------------

def kink_observable(params: ChainParams) -> QuadraticObservable:
    """Kink number ``N = 1/2 sum_n (1 - X_n X_{n+1})``."""

    def block_w1(k):
        k = np.asarray(k, dtype=float)
        c, s = np.cos(k), np.sin(k)
        return np.stack([np.stack([c, s], -1), np.stack([s, -c], -1)], -2)

    def w2_eigs(k):
        z = np.zeros_like(np.asarray(k, dtype=float))
        return z, z

    L = params.L
    return QuadraticObservable("kinks", block_w1, w2_eigs, (0.5, -0.5), (-0.5, 0.5),
                               offset=L / 2, support_step=1, support_min=0, support_max=L)


def magnetization_observable(params: ChainParams) -> QuadraticObservable:
    """Transverse magnetization ``M = sum_n Z_n``."""

    def block_w1(k):
        k = np.asarray(k, dtype=float)
        out = np.zeros(k.shape + (2, 2))
        out[..., 0, 0], out[..., 1, 1] = 2.0, -2.0
        return out

    def w2_eigs(k):
        z = np.zeros_like(np.asarray(k, dtype=float))
        return z, z

    L = params.L
    return QuadraticObservable("magnetization", block_w1, w2_eigs, (1.0, -1.0), (1.0, -1.0),
                               offset=0.0, support_step=2, support_min=-L, support_max=L)


def observable_by_name(name: str, params: ChainParams) -> QuadraticObservable:
    try:
        return {"kinks": kink_observable, "magnetization": magnetization_observable}[name](params)
    except KeyError:
        raise ValueError(f"unknown observable {name!r}") from None


# --- characteristic functions ---------------------------------------------

def _bogoliubov_matrix(k, params):
    half = np.asarray(bogoliubov_angle(k, params)) / 2.0
    c, s = np.cos(half), np.sin(half)
    return np.stack([np.stack([c, s], -1), np.stack([s, -c], -1)], -2)


def _sigma(obs, k, params, thetas):
    """Diagonal of ``S exp(i theta w1) S^dag``; shape ``(n_theta, n_k)`` each."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    lam, U = np.linalg.eigh(obs.block_w1(k))
    SU = _bogoliubov_matrix(k, params) @ U
    w = np.abs(SU) ** 2                      # (nk, 2 rows, 2 eigen)
    phases = np.exp(1j * thetas[:, None, None] * lam[None, :, :])
    s11 = np.einsum("kj,tkj->tk", w[:, 0, :], phases)
    s22 = np.einsum("kj,tkj->tk", w[:, 1, :], phases)
    return s11, s22


def sigma_entries(obs: QuadraticObservable, k: float, params: ChainParams, theta: float):
    """Diagonal entries ``(s11, s22)`` of the rotated phase matrix of one mode."""
    s11, s22 = _sigma(obs, k, params, theta)
    return complex(s11[0, 0]), complex(s22[0, 0])


def _pair_factors(obs, ks, params, beta, thetas):
    """Normalized per-mode factors ``(a, b)`` for the ± products.

    ``a`` is the full trace of ``rho_k exp(i theta w_k)`` and ``b`` the
    even-minus-odd trace, both divided by ``4 cosh^2(beta eps / 2)``.
    """
    if len(ks) == 0:
        shape = (len(thetas), 0)
        return np.ones(shape, complex), np.ones(shape, complex)
    eps = dispersion(ks, params)
    s11, s22 = _sigma(obs, ks, params, thetas)
    p_low = expit(-beta * eps) ** 2          # e^{-beta eps} / (4 cosh^2)
    p_high = expit(beta * eps) ** 2          # e^{+beta eps} / (4 cosh^2)
    p_odd = expit(beta * eps) * expit(-beta * eps)
    mu, lam = obs.w2_eigs(ks)
    odd = np.exp(1j * thetas[:, None] * mu) + np.exp(1j * thetas[:, None] * lam)
    thermal = s11 * p_low + s22 * p_high
    return thermal + p_odd * odd, thermal - p_odd * odd


def _edge_factors(obs, params, beta, thetas):
    """Normalized ``0``/``pi`` factors ``(F, B)``; empty slot weighted ``e^{+beta(g∓1)}``."""
    out_f = np.ones(len(thetas), complex)
    out_b = np.ones(len(thetas), complex)
    for y, (w_even, w_odd) in ((beta * (params.g - 1.0), obs.zero_mode),
                               (beta * (params.g + 1.0), obs.pi_mode)):
        even = expit(2.0 * y) * np.exp(1j * thetas * w_even)
        odd = expit(-2.0 * y) * np.exp(1j * thetas * w_odd)
        out_f *= even + odd
        out_b *= even - odd
    return out_f, out_b


def _sector_parts(obs, params, th, thetas):
    grid = momentum_grids(params)
    a_p, b_p = _pair_factors(obs, grid.k_plus, params, th.beta, thetas)
    a_m, b_m = _pair_factors(obs, grid.k_minus, params, th.beta, thetas)
    f, b = _edge_factors(obs, params, th.beta, thetas)
    plus = (np.prod(a_p, axis=1), np.prod(b_p, axis=1))
    minus = (f * np.prod(a_m, axis=1), b * np.prod(b_m, axis=1))
    return plus, minus


def _as_thetas(theta):
    return np.atleast_1d(np.asarray(theta, dtype=float))


def _shape_like(theta, values):
    return complex(values[0]) if np.ndim(theta) == 0 else values


def char_fn_exact(obs: QuadraticObservable, params: ChainParams, th: Thermal, theta,
                  breakdown: PartitionBreakdown | None = None):
    """Exact ``tr[rho exp(i theta W)]`` over both parity sectors.

    ``theta`` may be a scalar or an array.
    """
    thetas = _as_thetas(theta)
    z = z_exact(params, th) if breakdown is None else breakdown
    (ap, bp), (am, bm) = _sector_parts(obs, params, th, thetas)
    log_2z = z.z_exact.log_magnitude + math.log(2.0)
    w_plus = math.exp(z.z_f_plus.log_magnitude - log_2z)
    w_minus = math.exp(z.z_f_minus.log_magnitude - log_2z)
    values = w_plus * (ap + bp) + w_minus * (am - bm)
    values = values * np.exp(1j * thetas * obs.offset)
    return _shape_like(theta, values)


def char_fn_ppa(obs: QuadraticObservable, params: ChainParams, th: Thermal, theta):
    """First positive-parity product alone, normalized to 1 at ``theta = 0``."""
    thetas = _as_thetas(theta)
    grid = momentum_grids(params)
    a_p, _ = _pair_factors(obs, grid.k_plus, params, th.beta, thetas)
    values = np.prod(a_p, axis=1) * np.exp(1j * thetas * obs.offset)
    return _shape_like(theta, values)


def char_fn_limit(obs: QuadraticObservable, params: ChainParams, limit: str, theta):
    """Closed forms at zero temperature (positive-parity ground state) and infinite temperature."""
    if limit not in LIMITS:
        raise ValueError(f"unknown limit {limit!r}")
    thetas = _as_thetas(theta)
    L = params.L
    k = momentum_grids(params).k_plus
    vartheta = np.asarray(bogoliubov_angle(k, params))
    if obs.name == "kinks":
        if limit == "ground_state":
            c = np.cos(k - vartheta)
            factors = np.cos(thetas)[:, None] - 1j * np.sin(thetas)[:, None] * c[None, :]
            values = np.exp(0.5j * L * thetas) * np.prod(factors, axis=1)
        else:
            values = np.exp(0.5j * L * thetas) * (np.cos(thetas / 2) ** L
                                                 + (-1) ** (L // 2) * np.sin(thetas / 2) ** L)
    elif obs.name == "magnetization":
        if limit == "ground_state":
            c = np.cos(vartheta)
            factors = np.cos(2 * thetas)[:, None] - 1j * np.sin(2 * thetas)[:, None] * c[None, :]
            values = np.prod(factors, axis=1)
        else:
            values = np.cos(thetas) ** L + 0j
    else:
        raise ValueError(f"no closed-form limits for observable {obs.name!r}")
    return _shape_like(theta, values)


# --- inversion and cumulants ----------------------------------------------

def theta_grid(obs: QuadraticObservable) -> np.ndarray:
    """Sampling points ``2 pi j / (N step)``, ``j = 0..N-1``; exact for the support lattice."""
    n = obs.n_support
    return 2.0 * np.pi * np.arange(n) / (n * obs.support_step)


def characteristic_samples(obs: QuadraticObservable, params: ChainParams, variant: str,
                           th: Thermal | None = None) -> CharacteristicSamples:
    """Sample one of ``exact``, ``ppa``, ``ground_state``, ``infinite_temperature`` on the grid."""
    thetas = theta_grid(obs)
    if variant in LIMITS:
        values = char_fn_limit(obs, params, variant, thetas)
    elif th is None:
        raise ValueError(f"variant {variant!r} needs a temperature")
    elif variant == "exact":
        values = char_fn_exact(obs, params, th, thetas)
    elif variant == "ppa":
        values = char_fn_ppa(obs, params, th, thetas)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return CharacteristicSamples(thetas, np.asarray(values))


def invert(obs: QuadraticObservable, samples: CharacteristicSamples) -> Distribution:
    """Inverse DFT of characteristic-function samples onto the support lattice."""
    expected = theta_grid(obs)
    thetas = np.asarray(samples.thetas, dtype=float)
    if thetas.shape != expected.shape or not np.allclose(thetas, expected, rtol=0, atol=1e-12):
        raise ValueError(f"samples must lie on the {obs.n_support}-point grid of theta_grid(obs)")
    shifted = np.asarray(samples.values) * np.exp(-1j * thetas * obs.support_min)
    raw = np.fft.fft(shifted) / obs.n_support
    residue = float(np.max(np.abs(raw.imag)))
    if residue > IMAG_TOL:
        raise ValueError(f"imaginary residue {residue:.3g} exceeds {IMAG_TOL}")
    probs = raw.real
    worst = float(probs.min())
    if worst < -NEG_TOL:
        raise ValueError(f"negative probability {worst:.3g}: characteristic function is inconsistent")
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    return Distribution(obs.support, probs / total,
                        meta={"normalization_residual": float(total - 1.0),
                              "imaginary_residue": residue})


def distribution(obs: QuadraticObservable, params: ChainParams, variant: str,
                 th: Thermal | None = None) -> Distribution:
    """Distribution for ``exact``, ``ppa``, ``coarse_grained_ppa`` or a limiting case."""
    if variant == "coarse_grained_ppa":
        return coarse_grained_ppa(distribution(obs, params, "ppa", th))
    return invert(obs, characteristic_samples(obs, params, variant, th))


def distributions(obs_name: str, params: ChainParams, variant: str, betas,
                  threads: int | None = None) -> list[Distribution]:
    """One distribution per inverse temperature, evaluated independently."""
    obs = observable_by_name(obs_name, params)
    return parallel_map(lambda b: distribution(obs, params, variant, Thermal(b)), betas, threads)


def _moment_cumulants(moments: list[float]) -> list[float]:
    # kappa_n = mu_n - sum_{m<n} C(n-1, m-1) kappa_m mu_{n-m}
    kappa: list[float] = []
    for n in range(1, len(moments) + 1):
        acc = moments[n - 1]
        for m in range(1, n):
            acc -= math.comb(n - 1, m - 1) * kappa[m - 1] * moments[n - m - 1]
        kappa.append(acc)
    return kappa


def cumulants(dist: Distribution, m_max: int = 4) -> CumulantSet:
    """Cumulants of orders ``1..m_max`` from moment sums of the distribution."""
    if not 1 <= m_max <= 6:
        raise ValueError("m_max must lie in 1..6")
    x = dist.support.astype(float)
    p = dist.probs / dist.probs.sum()
    mean = float(np.dot(x, p))
    centred = x - mean
    moments = [float(np.dot(centred ** n, p)) for n in range(1, m_max + 1)]
    kappa = _moment_cumulants(moments)
    kappa[0] = mean
    return CumulantSet(tuple(kappa))


def coarse_grained_ppa(ppa_dist: Distribution) -> Distribution:
    """Fold odd-valued PPA weight half onto each even neighbour."""
    s, p = ppa_dist.support, ppa_dist.probs
    if np.any(np.diff(s) != 1):
        raise ValueError("coarse graining needs a unit-step support")
    lo = np.concatenate([[0.0], p[:-1]])
    hi = np.concatenate([p[1:], [0.0]])
    out = np.where(s % 2 == 0, p + 0.5 * (lo + hi), 0.0)
    return Distribution(s, out / out.sum())


def binomial_kinks_infinite_temperature(L: int) -> Distribution:
    """``C(L, n) / 2^(L-1)`` on even ``n``; zero on odd ``n``."""
    n = np.arange(L + 1)
    probs = np.where(n % 2 == 0, comb(L, n, exact=False) / 2.0 ** (L - 1), 0.0)
    return Distribution(n, probs)


def binomial_magnetization_infinite_temperature(L: int) -> Distribution:
    """``C(L, (m+L)/2) / 2^L`` for ``m = -L, -L+2, ..., L``."""
    m = np.arange(-L, L + 1, 2)
    return Distribution(m, comb(L, (m + L) // 2, exact=False) / 2.0 ** L)
