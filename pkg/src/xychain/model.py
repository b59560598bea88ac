"""Chain parameters, momentum grids and single-mode quantities of the XY chain.

The periodic chain

    H = -sum_n [ (1+gamma)/2 X_n X_{n+1} + (1-gamma)/2 Y_n Y_{n+1} + g Z_n ]

maps to free fermions.  For even ``L`` the positive-parity sector uses the
half-integer momenta ``k_plus`` and the negative-parity sector uses the
integer momenta ``k_minus`` plus the two unpaired modes ``0`` and ``pi``.
Energies are in units of the exchange coupling ``J = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .logscale import LogScaledReal, log_2cosh, log_abs_2sinh

GAPLESS_EPS = 1e-14


@dataclass(frozen=True)
class ChainParams:
    """Physical knobs of the chain: even length, transverse field, anisotropy."""

    L: int
    g: float
    gamma: float = 1.0

    def __post_init__(self):
        if isinstance(self.L, bool) or int(self.L) != self.L:
            raise ValueError(f"L must be an integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        if self.L < 2 or self.L % 2:
            raise ValueError(f"L must be even and >= 2, got {self.L}")
        if not (math.isfinite(self.g) and self.g >= 0):
            raise ValueError(f"g must be finite and >= 0, got {self.g}")
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")

    def with_g(self, g: float) -> "ChainParams":
        return ChainParams(self.L, g, self.gamma)


@dataclass(frozen=True)
class Thermal:
    """Inverse temperature ``beta`` (finite, non-negative)."""

    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")


@dataclass(frozen=True)
class MomentumGrid:
    """Positive half-grids of both parity sectors.

    ``k_plus`` holds ``pi/L, 3pi/L, ..., (L-1)pi/L``; ``k_minus`` holds
    ``2pi/L, ..., (L-2)pi/L``.  The unpaired modes ``0`` and ``pi`` always
    belong to the negative-parity sector for even ``L``.
    """

    k_plus: np.ndarray
    k_minus: np.ndarray
    has_zero: bool = True
    has_pi: bool = True

    @property
    def K_plus(self) -> np.ndarray:
        return np.concatenate([-self.k_plus[::-1], self.k_plus])

    @property
    def K_minus(self) -> np.ndarray:
        extra = [0.0] * self.has_zero + [math.pi] * self.has_pi
        return np.sort(np.concatenate([-self.k_minus, self.k_minus, extra]))


@dataclass(frozen=True)
class ModeData:
    k: float
    epsilon: float
    theta: float

    @property
    def u(self) -> float:
        return math.cos(self.theta / 2)

    @property
    def v(self) -> float:
        return math.sin(self.theta / 2)


class ZeroPiWeights(NamedTuple):
    """Log Boltzmann weights of the unpaired modes, per basis slot.

    Slot order is ``(|0>, c^dag|0>)``; the empty slot is the even one.
    """

    zero_even: float
    zero_odd: float
    pi_even: float
    pi_odd: float


def momentum_grids(params: ChainParams) -> MomentumGrid:
    L = params.L
    k_plus = np.pi * np.arange(1, L, 2) / L
    k_minus = np.pi * np.arange(2, L - 1, 2) / L
    return MomentumGrid(k_plus=k_plus, k_minus=k_minus)


def dispersion(k, params: ChainParams):
    """Quasiparticle energy ``2 sqrt((g - cos k)^2 + gamma^2 sin^2 k)`` (>= 0)."""
    k = np.asarray(k, dtype=float)
    out = 2.0 * np.hypot(params.g - np.cos(k), params.gamma * np.sin(k))
    return float(out) if out.ndim == 0 else out


def edge_energies(params: ChainParams) -> tuple[float, float]:
    """Signed energies of the unpaired modes: ``(2(g-1), 2(g+1))``.

    ``cosh`` of these is blind to the sign; ``sinh`` of the zero-mode energy
    flips sign across ``g = 1``.
    """
    return 2.0 * (params.g - 1.0), 2.0 * (params.g + 1.0)


def bogoliubov_angle(k, params: ChainParams):
    """Angle with ``cos = 2(cos k - g)/eps`` and ``sin = 2 gamma sin k/eps``.

    Returns 0 where the mode is gapless (only possible for ``gamma = 0``).
    """
    k = np.asarray(k, dtype=float)
    y = 2.0 * params.gamma * np.sin(k)
    x = 2.0 * (np.cos(k) - params.g)
    out = np.where(np.hypot(x, y) < GAPLESS_EPS, 0.0, np.arctan2(y, x))
    return float(out) if out.ndim == 0 else out


def mode_data(k: float, params: ChainParams) -> ModeData:
    return ModeData(float(k), dispersion(k, params), bogoliubov_angle(k, params))


def mode_gibbs_traces(k: float, params: ChainParams, th: Thermal) -> tuple[LogScaledReal, LogScaledReal]:
    """Full trace and even-minus-odd trace of ``exp(-beta h_k)`` on one mode pair.

    These are ``4 cosh^2(beta eps/2)`` and ``4 sinh^2(beta eps/2)``.
    """
    x = th.beta * dispersion(k, params) / 2.0
    full = LogScaledReal.from_log(2.0 * float(log_2cosh(x)))
    if x == 0.0:
        return full, LogScaledReal.zero()
    return full, LogScaledReal.from_log(2.0 * float(log_abs_2sinh(x)))


def zero_pi_gibbs(params: ChainParams, th: Thermal) -> ZeroPiWeights:
    """Diagonal Gibbs weights of the ``0`` and ``pi`` modes, as logs.

    With ``H_0 = (g-1)(2n_0 - 1)`` and ``H_pi = (g+1)(2n_pi - 1)`` the empty
    (even) slot carries ``exp(+beta(g-1))`` and ``exp(+beta(g+1))``.
    """
    b, g = th.beta, params.g
    return ZeroPiWeights(b * (g - 1.0), -b * (g - 1.0), b * (g + 1.0), -b * (g + 1.0))


def ground_energies(params: ChainParams) -> tuple[float, float]:
    """Lowest energies ``(E_plus, E_minus)`` of the two parity sectors."""
    grid = momentum_grids(params)
    e_plus = -float(np.sum(dispersion(grid.k_plus, params)))
    e_minus = -float(np.sum(dispersion(grid.k_minus, params))) - 2.0
    return e_plus, e_minus


def gaps(params: ChainParams) -> tuple[float, float]:
    """Parity gap ``E_minus - E_plus`` and single-particle gap of the Ising chain."""
    if params.gamma != 1.0:
        raise ValueError("gaps are defined for the transverse-field Ising chain (gamma = 1) only")
    e_plus, e_minus = ground_energies(params)
    g = params.g
    Delta = 4.0 * math.sqrt(g * g - 2.0 * g * math.cos(math.pi / params.L) + 1.0)
    return e_minus - e_plus, Delta
