"""Random variables over a finite, equally weighted Monte-Carlo sample space.

A :class:`RandomVariable` is either a vector of ``n`` path values or a
deterministic scalar that broadcasts against any ``n``. Values are immutable.

Reductions (:meth:`RandomVariable.expectation`, :meth:`RandomVariable.variance`)
use numpy's pairwise summation, which has a fixed summation tree for a given
length, so repeated runs agree bit for bit.
"""

from __future__ import annotations

import math
from typing import Callable, Union

import numpy as np

from .errors import DomainError, LengthMismatchError

Operand = Union["RandomVariable", float, int]


def _freeze(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


def _is_operand(other) -> bool:
    return isinstance(other, (RandomVariable, int, float, np.floating, np.integer))


class RandomVariable:
    """Path-wise values of a random variable, or a broadcast scalar."""

    __slots__ = ("_values",)

    def __init__(self, values):
        if isinstance(values, RandomVariable):
            self._values = values._values
            return
        if np.ndim(values) == 0:
            if not math.isfinite(values):
                raise DomainError("scalar value must be finite")
            self._values = float(values)
            return
        arr = np.array(values, dtype=np.float64)  # copy: callers keep their buffer
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("samples must be a non-empty one-dimensional sequence")
        if not np.all(np.isfinite(arr)):
            raise DomainError("samples must be finite")
        self._values = _freeze(arr)

    @classmethod
    def _wrap(cls, values) -> "RandomVariable":
        # no-copy constructor for arrays produced internally
        rv = cls.__new__(cls)
        if isinstance(values, np.ndarray):
            rv._values = _freeze(values)
        else:
            rv._values = float(values)
        return rv

    @classmethod
    def constant(cls, value: float) -> "RandomVariable":
        return cls._wrap(float(value))

    # -- inspection -------------------------------------------------------

    @property
    def is_deterministic(self) -> bool:
        return not isinstance(self._values, np.ndarray)

    @property
    def size(self) -> int:
        """Number of paths, or 1 for a scalar."""
        return 1 if self.is_deterministic else self._values.size

    @property
    def values(self):
        """The read-only sample array, or the float for a scalar."""
        return self._values

    def as_array(self, n: int | None = None) -> np.ndarray:
        """Dense samples; a scalar is expanded to length ``n``."""
        if not self.is_deterministic:
            if n is not None and n != self._values.size:
                raise LengthMismatchError(f"expected {n} samples, have {self._values.size}")
            return self._values
        return np.full(1 if n is None else n, self._values)

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        if self.is_deterministic:
            return f"RandomVariable({self._values!r})"
        return f"RandomVariable(n={self.size}, mean={self.expectation():.6g})"

    # -- elementwise arithmetic -------------------------------------------

    def _binary(self, other: Operand, fn: Callable, name: str) -> "RandomVariable":
        if not _is_operand(other):
            return NotImplemented
        b = other._values if isinstance(other, RandomVariable) else float(other)
        a = self._values
        if isinstance(a, np.ndarray) and isinstance(b, np.ndarray) and a.size != b.size:
            raise LengthMismatchError(f"{name}: cannot combine n={a.size} with n={b.size}")
        return RandomVariable._wrap(fn(a, b))

    def __add__(self, other):
        return self._binary(other, np.add, "add")

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract, "sub")

    def __rsub__(self, other):
        if not _is_operand(other):
            return NotImplemented
        return RandomVariable(other)._binary(self, np.subtract, "sub")

    def __mul__(self, other):
        return self._binary(other, np.multiply, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_operand(other):
            return NotImplemented
        divisor = RandomVariable(other)
        if np.any(divisor._values == 0.0):
            raise DomainError("div: divisor has zero samples")
        return self._binary(divisor, np.divide, "div")

    def __rtruediv__(self, other):
        if not _is_operand(other):
            return NotImplemented
        return RandomVariable(other) / self

    def __neg__(self):
        return RandomVariable._wrap(np.negative(self._values))

    def __pow__(self, exponent: float):
        if isinstance(exponent, RandomVariable):
            raise TypeError("only deterministic float exponents are supported")
        return RandomVariable._wrap(np.power(self._values, float(exponent)))

    def exp(self) -> "RandomVariable":
        return RandomVariable._wrap(np.exp(self._values))

    def log(self) -> "RandomVariable":
        if np.any(np.asarray(self._values) <= 0.0):
            raise DomainError("log: argument has non-positive samples")
        return RandomVariable._wrap(np.log(self._values))

    def sqrt(self) -> "RandomVariable":
        if np.any(np.asarray(self._values) < 0.0):
            raise DomainError("sqrt: argument has negative samples")
        return RandomVariable._wrap(np.sqrt(self._values))

    def abs(self) -> "RandomVariable":
        return RandomVariable._wrap(np.abs(self._values))

    def maximum(self, other: Operand) -> "RandomVariable":
        return self._binary(other, np.maximum, "max")

    def minimum(self, other: Operand) -> "RandomVariable":
        return self._binary(other, np.minimum, "min")

    def indicator(self) -> "RandomVariable":
        """``1_{X>0}`` path-wise; ties at exactly 0 map to 0."""
        return RandomVariable._wrap(np.greater(self._values, 0.0).astype(np.float64)
                                    if not self.is_deterministic
                                    else float(self._values > 0.0))

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> "RandomVariable":
        """Apply a vectorized numpy function path-wise."""
        return RandomVariable._wrap(fn(self._values))

    # -- reductions -------------------------------------------------------

    def expectation(self) -> float:
        """Equal-weight mean of the samples."""
        if self.is_deterministic:
            return self._values
        return float(np.mean(self._values))

    def variance(self) -> float:
        """Population variance ``E(Z^2) - E(Z)^2`` (computed around the mean)."""
        if self.is_deterministic:
            return 0.0
        if self._values.size < 2:
            raise ValueError("variance needs at least two samples")
        mean = np.mean(self._values)
        return float(np.mean(np.square(self._values - mean)))

    def standard_deviation(self) -> float:
        return math.sqrt(self.variance())


# module-level spellings used by the valuation code


def indicator(x: RandomVariable) -> RandomVariable:
    return RandomVariable(x).indicator()


def expectation(z: Operand) -> float:
    return RandomVariable(z).expectation()


def variance(z: Operand) -> float:
    return RandomVariable(z).variance()


def standard_deviation(z: Operand) -> float:
    return RandomVariable(z).standard_deviation()
