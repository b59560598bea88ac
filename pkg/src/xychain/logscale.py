"""Signed log-magnitude reals for products that overflow float64.

Partition functions of long chains at low temperature are products of
thousands of ``2 cosh`` factors, far outside the float range.  They are
carried as ``sign * exp(log_magnitude)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LogScaledReal:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign == 0`` means the value is exactly zero; ``log_magnitude`` is then
    ``-inf`` and ignored.
    """

    sign: int
    log_magnitude: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0:
            object.__setattr__(self, "log_magnitude", -math.inf)

    @classmethod
    def zero(cls) -> "LogScaledReal":
        return cls(0, -math.inf)

    @classmethod
    def from_value(cls, x: float) -> "LogScaledReal":
        x = float(x)
        if x == 0.0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, log_magnitude: float, sign: int = 1) -> "LogScaledReal":
        if sign == 0 or log_magnitude == -math.inf:
            return cls.zero()
        return cls(int(sign), float(log_magnitude))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.log_magnitude > 709.78:
            return self.sign * math.inf
        return self.sign * math.exp(self.log_magnitude)

    @property
    def value(self) -> float:
        return float(self)

    def __neg__(self) -> "LogScaledReal":
        return LogScaledReal(-self.sign, self.log_magnitude)

    def __add__(self, other: "LogScaledReal") -> "LogScaledReal":
        if not isinstance(other, LogScaledReal):
            return NotImplemented
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        # anchor at the larger magnitude
        big, small = (self, other) if self.log_magnitude >= other.log_magnitude else (other, self)
        d = small.log_magnitude - big.log_magnitude
        if big.sign == small.sign:
            return LogScaledReal(big.sign, big.log_magnitude + math.log1p(math.exp(d)))
        if d == 0.0:
            return LogScaledReal.zero()
        return LogScaledReal(big.sign, big.log_magnitude + math.log(-math.expm1(d)))

    def __sub__(self, other: "LogScaledReal") -> "LogScaledReal":
        if not isinstance(other, LogScaledReal):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LogScaledReal):
            return LogScaledReal.from_log(self.log_magnitude + other.log_magnitude,
                                          self.sign * other.sign)
        return self * LogScaledReal.from_value(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogScaledReal):
            other = LogScaledReal.from_value(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScaledReal")
        return LogScaledReal.from_log(self.log_magnitude - other.log_magnitude,
                                      self.sign * other.sign)

    def ratio(self, other: "LogScaledReal") -> float:
        """Plain float ``self / other``; safe when both are astronomically large."""
        return float(self / other)

    def isclose(self, other: "LogScaledReal", rel_tol: float = 1e-12) -> bool:
        if self.sign != other.sign:
            return False
        if self.sign == 0:
            return True
        return abs(math.expm1(self.log_magnitude - other.log_magnitude)) <= rel_tol

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogScaledReal(0)"
        return f"LogScaledReal({'+' if self.sign > 0 else '-'}exp({self.log_magnitude!r}))"


def product(signs, log_magnitudes) -> LogScaledReal:
    """Product of factors given elementwise as sign arrays and log-magnitudes."""
    signs = np.asarray(signs)
    if signs.size and np.any(signs == 0):
        return LogScaledReal.zero()
    return LogScaledReal.from_log(float(np.sum(log_magnitudes)), int(np.prod(np.sign(signs))))


def log_2cosh(x):
    """``log(2 cosh x)`` without overflow."""
    a = np.abs(np.asarray(x, dtype=float))
    return a + np.log1p(np.exp(-2.0 * a))


def log_abs_2sinh(x):
    """``log|2 sinh x|``; ``-inf`` at ``x == 0``."""
    a = np.abs(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore"):
        return a + np.log(-np.expm1(-2.0 * a))


def log_abs_tanh(x):
    """``log|tanh x|`` accurate also where ``tanh x`` rounds to 1."""
    a = np.abs(np.asarray(x, dtype=float))
    e = np.exp(-2.0 * a)
    with np.errstate(divide="ignore"):
        return np.log1p(-e) - np.log1p(e)


def log_neg_log_tanh(x):
    """``log(-log tanh x)`` for ``x > 0``.

    Uses ``-log tanh x = 2 artanh(exp(-2x))`` so the result stays finite after
    ``exp(-2x)`` underflows.
    """
    a = np.abs(np.asarray(x, dtype=float))
    small = a < 5.0
    e = np.exp(-2.0 * np.where(small, 5.0, a))
    ratio = np.where(e > 1e-8, np.arctanh(e) / np.where(e > 1e-8, e, 1.0), 1.0)
    far = math.log(2.0) + np.log(ratio) - 2.0 * a
    with np.errstate(divide="ignore"):
        near = np.log(-log_abs_tanh(np.where(small, a, 1.0)))
    return np.where(small, near, far)


def log_one_minus_prod_tanh(x) -> tuple[float, bool]:
    """``log(1 - prod tanh x_i)`` for an array of signed arguments.

    Returns ``(log_value, cancelled)`` where ``cancelled`` reports that the
    naive difference ``1 - prod tanh`` is below 1e-12 and would have lost all
    significant digits; the returned value is computed without that loss.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return -math.inf, True
    if np.any(x == 0.0):
        return 0.0, False
    sign = int(np.prod(np.sign(x)))
    if sign < 0:
        # 1 + |prod|
        return math.log1p(math.exp(float(np.sum(log_abs_tanh(x))))), False
    # log(-s) with s = sum log tanh |x_i| <= 0
    log_neg_s = float(np.logaddexp.reduce(log_neg_log_tanh(x)))
    if log_neg_s < -700.0:
        # 1 - exp(s) = -s (1 + O(s))
        return log_neg_s, True
    one_minus = -math.expm1(-math.exp(log_neg_s))
    return math.log(one_minus), one_minus < 1e-12
