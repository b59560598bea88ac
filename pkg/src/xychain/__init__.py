"""Exact thermal statistics of free-fermion spin chains (XY / transverse-field Ising)."""

from .fcs import (CharacteristicSamples, CumulantSet, Distribution, QuadraticObservable,
                  char_fn_exact, char_fn_limit, char_fn_ppa, coarse_grained_ppa, cumulants,
                  distribution, invert, kink_observable, magnetization_observable, sigma_entries)
from .logscale import LogScaledReal
from .model import (ChainParams, ModeData, MomentumGrid, Thermal, bogoliubov_angle, dispersion,
                    gaps, ground_energies, mode_gibbs_traces, momentum_grids, zero_pi_gibbs)
from .partition import PartitionBreakdown, ratio_map, z_exact, z_ppa, z_two_level

__all__ = [
    "CharacteristicSamples", "ChainParams", "CumulantSet", "Distribution", "LogScaledReal",
    "ModeData", "MomentumGrid", "PartitionBreakdown", "QuadraticObservable", "Thermal",
    "bogoliubov_angle", "char_fn_exact", "char_fn_limit", "char_fn_ppa", "coarse_grained_ppa",
    "cumulants", "dispersion", "distribution", "gaps", "ground_energies", "invert",
    "kink_observable", "magnetization_observable", "mode_gibbs_traces", "momentum_grids",
    "ratio_map", "sigma_entries", "z_exact", "z_ppa", "z_two_level", "zero_pi_gibbs",
]
