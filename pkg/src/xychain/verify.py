"""Oracle-versus-analytic comparison grid behind ``xychain oracle-check``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fcs, oracle, parity_algebra, partition
from .model import ChainParams, Thermal, ground_energies

GAMMAS = (0.0, 0.5, 1.0)
FIELDS = (0.0, 0.5, 1.0, 1.5, 2.0)
BETAS = (0.0, 0.1, 1.0, 5.0)
FCS_FIELDS = (0.5, 1.0, 2.0)
FCS_BETAS = (0.1, 1.0, 5.0)

TOL_PARTITION = 1e-9
TOL_ENERGY = 1e-10
TOL_FCS = 1e-8
TOL_TRACE = 1e-10


@dataclass
class Check:
    name: str
    tol: float
    max_dev: float = 0.0
    worst_at: dict | None = None
    count: int = 0

    def record(self, dev: float, **where):
        self.count += 1
        if not math.isfinite(dev) or dev > self.max_dev:
            self.max_dev = dev if math.isfinite(dev) else math.inf
            self.worst_at = where

    @property
    def ok(self) -> bool:
        return self.max_dev <= self.tol

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        text = f"{status}  {self.name:<24s} max_dev={self.max_dev:.3e}  tol={self.tol:.0e}  n={self.count}"
        if not self.ok:
            where = ", ".join(f"{k}={v}" for k, v in self.worst_at.items())
            text += f"  at ({where})"
        return text


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def render(self) -> str:
        return "\n".join(c.line() for c in self.checks)


def _rel(log_a: float, log_b: float) -> float:
    return abs(math.expm1(log_a - log_b))


def _check_partition(L_max, report):
    part = Check("partition", TOL_PARTITION)
    combo = Check("partition-combination", TOL_PARTITION)
    energy = Check("ground-energies", TOL_ENERGY)
    for L in range(2, L_max + 1, 2):
        for gamma in GAMMAS:
            for g in FIELDS:
                params = ChainParams(L, g, gamma)
                spectra = oracle.sector_spectra(oracle.build_hamiltonian(params))
                e_plus, e_minus = ground_energies(params)
                for e, ref in ((e_plus, spectra[0][0]), (e_minus, spectra[1][0])):
                    energy.record(abs(e - ref) / max(1.0, abs(ref)), L=L, gamma=gamma, g=g)
                log_zp, log_zm = oracle.log_parity_resolved_z(spectra, np.array(BETAS))
                for beta, lp, lm in zip(BETAS, log_zp, log_zm):
                    where = dict(L=L, g=g, gamma=gamma, beta=beta)
                    z = partition.z_exact(params, Thermal(beta))
                    log_z = float(np.logaddexp(lp, lm))
                    part.record(max(_rel(z.z_plus.log_magnitude, lp), _rel(z.z_minus.log_magnitude, lm),
                                    _rel(z.z_exact.log_magnitude, log_z)), **where)
                    if not z.cancellation:
                        c = z.combined()
                        dev = _rel(c.log_magnitude, log_z) if c.sign > 0 else math.inf
                        combo.record(dev, **where)
    report.checks += [part, combo, energy]


def _check_fcs(L_max, rng, report):
    dist_checks = {name: Check(f"fcs-{name}", TOL_FCS) for name in fcs.OBSERVABLES}
    char = Check("characteristic-function", TOL_FCS)
    for L in range(2, min(L_max, 10) + 1, 2):
        ops = {"kinks": oracle.build_kink_operator(L),
               "magnetization": oracle.build_magnetization_operator(L)}
        for g in FCS_FIELDS:
            params = ChainParams(L, g, 1.0)
            H = oracle.build_hamiltonian(params)
            for beta in FCS_BETAS:
                th = Thermal(beta)
                for name, W in ops.items():
                    obs = fcs.observable_by_name(name, params)
                    where = dict(L=L, g=g, gamma=1.0, beta=beta, observable=name)
                    d = fcs.distribution(obs, params, "exact", th)
                    ref = oracle.thermal_fcs(W, H, beta).on_support(obs.support)
                    dist_checks[name].record(float(np.max(np.abs(d.probs - ref))), **where)
                    if L <= 8:
                        thetas = rng.uniform(-math.pi, math.pi, 8)
                        ana = fcs.char_fn_exact(obs, params, th, thetas)
                        ora = oracle.characteristic_function(W, H, beta, thetas)
                        char.record(float(np.max(np.abs(ana - ora))), **where)
    report.checks += [*dist_checks.values(), char]


def random_graded_block(rng, dim: int, hermitian: bool = False) -> parity_algebra.GradedBlock:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    if hermitian:
        m = (m + m.conj().T) / 2
    mask = parity_algebra._even_slots(dim)
    m[np.ix_(mask, ~mask)] = 0
    m[np.ix_(~mask, mask)] = 0
    return parity_algebra.GradedBlock.from_matrix(m)


def _check_parity_algebra(rng, report, instances=50):
    check = Check("parity-algebra-traces", TOL_TRACE)
    for i in range(instances):
        n = int(rng.integers(1, 5))
        blocks = [random_graded_block(rng, int(rng.choice([2, 4]))) for _ in range(n)]
        for sector, fn in (("P", parity_algebra.restricted_trace_P), ("N", parity_algebra.restricted_trace_N)):
            dense = np.trace(parity_algebra.dense_restricted(blocks, sector))
            dev = abs(fn(blocks) - dense) / max(1.0, abs(dense))
            check.record(dev, instance=i, modes=n, sector=sector)
    report.checks.append(check)


def run_oracle_check(L_max: int = 10, seed: int = 0) -> Report:
    if L_max < 2 or L_max > 12:
        raise ValueError("L_max must lie in 2..12")
    rng = np.random.default_rng(seed)
    report = Report()
    _check_partition(L_max, report)
    _check_fcs(L_max, rng, report)
    _check_parity_algebra(rng, report)
    return report
