"""Parity-restricted tensor products of block-graded single-mode operators.

Each mode carries an operator ``O = O_even + O_odd`` whose two parts act on
the even-occupation and odd-occupation slots of the mode.  The restricted
products are defined recursively,

    P(O_1 .. O_{n+1}) = P(O_1 .. O_n) ⊗ O_even + N(O_1 .. O_n) ⊗ O_odd
    N(O_1 .. O_{n+1}) = N(O_1 .. O_n) ⊗ O_even + P(O_1 .. O_n) ⊗ O_odd

and their traces collapse to

    tr P = (prod tr O_i + prod (tr O_even_i - tr O_odd_i)) / 2
    tr N = (prod tr O_i - prod (tr O_even_i - tr O_odd_i)) / 2.

Basis order inside a block is even slots first: ``|00>, |11>, |01>, |10>``
for a momentum pair and ``|0>, |1>`` for an unpaired mode.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DENSE_LIMIT = 4096
_LOG_THRESHOLD = 1e150


def _even_slots(dim: int) -> np.ndarray:
    if dim == 4:
        return np.array([True, True, False, False])
    if dim == 2:
        return np.array([True, False])
    raise ValueError(f"block dimension must be 2 or 4, got {dim}")


@dataclass(frozen=True)
class GradedTraces:
    tr_full: complex
    tr_even: complex
    tr_odd: complex

    @property
    def tr_diff(self) -> complex:
        return self.tr_even - self.tr_odd


@dataclass(frozen=True)
class GradedBlock:
    """Single-mode operator split into its even and odd parts."""

    even_part: np.ndarray
    odd_part: np.ndarray

    def __post_init__(self):
        ev = np.asarray(self.even_part, dtype=complex)
        od = np.asarray(self.odd_part, dtype=complex)
        if ev.shape != od.shape or ev.ndim != 2 or ev.shape[0] != ev.shape[1]:
            raise ValueError("even and odd parts must be square matrices of equal shape")
        mask = _even_slots(ev.shape[0])
        if np.any(ev[~mask, :]) or np.any(ev[:, ~mask]):
            raise ValueError("even part must vanish on the odd slots")
        if np.any(od[mask, :]) or np.any(od[:, mask]):
            raise ValueError("odd part must vanish on the even slots")
        object.__setattr__(self, "even_part", ev)
        object.__setattr__(self, "odd_part", od)

    @classmethod
    def from_matrix(cls, matrix) -> "GradedBlock":
        """Split a parity-preserving matrix; raises if it mixes the sectors."""
        m = np.asarray(matrix, dtype=complex)
        mask = _even_slots(m.shape[0])
        if np.any(m[np.ix_(mask, ~mask)]) or np.any(m[np.ix_(~mask, mask)]):
            raise ValueError("matrix mixes even and odd slots")
        ev, od = np.zeros_like(m), np.zeros_like(m)
        ev[np.ix_(mask, mask)] = m[np.ix_(mask, mask)]
        od[np.ix_(~mask, ~mask)] = m[np.ix_(~mask, ~mask)]
        return cls(ev, od)

    @property
    def dim(self) -> int:
        return self.even_part.shape[0]

    @property
    def full(self) -> np.ndarray:
        return self.even_part + self.odd_part

    def traces(self) -> GradedTraces:
        te, to = complex(np.trace(self.even_part)), complex(np.trace(self.odd_part))
        return GradedTraces(te + to, te, to)

    def __matmul__(self, other: "GradedBlock") -> "GradedBlock":
        return GradedBlock(self.even_part @ other.even_part, self.odd_part @ other.odd_part)


def _product(values: Sequence[complex]) -> complex:
    mags = [abs(v) for v in values]
    if any(m == 0 for m in mags):
        return 0j
    if all(1.0 / _LOG_THRESHOLD < m < _LOG_THRESHOLD for m in mags):
        out = 1 + 0j
        for v in values:
            out *= v
        return out
    # log-scaled accumulation; only the final exponent can overflow
    log_mag = math.fsum(math.log(m) for m in mags)
    phase = math.fsum(cmath.phase(v) for v in values)
    return cmath.rect(math.exp(log_mag), phase) if log_mag < 709.78 else cmath.rect(math.inf, phase)


def _as_traces(blocks) -> list[GradedTraces]:
    if len(blocks) == 0:
        raise ValueError("at least one block is required")
    return [b if isinstance(b, GradedTraces) else b.traces() for b in blocks]


def restricted_trace_P(blocks: Sequence[GradedBlock | GradedTraces]) -> complex:
    tr = _as_traces(blocks)
    return 0.5 * (_product([t.tr_full for t in tr]) + _product([t.tr_diff for t in tr]))


def restricted_trace_N(blocks: Sequence[GradedBlock | GradedTraces]) -> complex:
    tr = _as_traces(blocks)
    return 0.5 * (_product([t.tr_full for t in tr]) - _product([t.tr_diff for t in tr]))


def dense_restricted(blocks: Sequence[GradedBlock], sector: str) -> np.ndarray:
    """Explicit matrix of the restricted product on the full tensor space."""
    if sector not in ("P", "N"):
        raise ValueError("sector must be 'P' or 'N'")
    if len(blocks) == 0:
        raise ValueError("at least one block is required")
    if math.prod(b.dim for b in blocks) > DENSE_LIMIT:
        raise ValueError(f"total dimension exceeds {DENSE_LIMIT}")
    p, n = blocks[0].even_part, blocks[0].odd_part
    for b in blocks[1:]:
        p, n = (np.kron(p, b.even_part) + np.kron(n, b.odd_part),
                np.kron(n, b.even_part) + np.kron(p, b.odd_part))
    return p if sector == "P" else n


def dense_kron_sum(blocks: Sequence[GradedBlock]) -> np.ndarray:
    """``sum_i 1 ⊗ .. ⊗ O_i ⊗ .. ⊗ 1``, the generator whose exponential factorizes."""
    dims = [b.dim for b in blocks]
    total = math.prod(dims)
    if total > DENSE_LIMIT:
        raise ValueError(f"total dimension exceeds {DENSE_LIMIT}")
    out = np.zeros((total, total), dtype=complex)
    for i, b in enumerate(blocks):
        left, right = math.prod(dims[:i]), math.prod(dims[i + 1:])
        out += np.kron(np.kron(np.eye(left), b.full), np.eye(right))
    return out


def dense_parity_projector(dims: Sequence[int], sector: str) -> np.ndarray:
    """Projector onto total even (``P``) or odd (``N``) occupation."""
    if sector not in ("P", "N"):
        raise ValueError("sector must be 'P' or 'N'")
    parity = np.array([1.0])
    for d in dims:
        parity = np.kron(parity, np.where(_even_slots(d), 1.0, -1.0))
    return np.diag((parity > 0) if sector == "P" else (parity < 0)).astype(float)
