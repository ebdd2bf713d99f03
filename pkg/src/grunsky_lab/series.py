"""Truncated Laurent series arithmetic on explicit exponent windows.

A series is a finite block of coefficients c[lo..hi] representing
sum_k c_k z^k.  Coefficients outside the window are unknown (truncated),
never implicitly zero, so every operation states the window of its
result and refuses windows it cannot fill.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TruncatedSeries",
    "mul",
    "log_unit",
    "exp_unit",
    "derivative",
    "antiderivative",
]


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficient window [lo, hi] of a Laurent series, coeffs[k - lo] = c_k."""

    lo: int
    hi: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty exponent window [{self.lo}, {self.hi}]")
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size != self.hi - self.lo + 1:
            raise ValueError("coefficient array length does not match window")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, lo: int, hi: int) -> "TruncatedSeries":
        return cls(lo, hi, np.zeros(hi - lo + 1, dtype=complex))

    def coeff(self, k: int) -> complex:
        """Coefficient of z^k.  Raises outside the window: truncated, not zero."""
        if not self.lo <= k <= self.hi:
            raise IndexError(f"exponent {k} outside window [{self.lo}, {self.hi}]")
        return complex(self.coeffs[k - self.lo])

    def window(self, lo: int, hi: int) -> "TruncatedSeries":
        """Restrict to a smaller window."""
        if lo < self.lo or hi > self.hi:
            raise ValueError("window enlargement would invent unknown coefficients")
        return TruncatedSeries(lo, hi, self.coeffs[lo - self.lo : hi - self.lo + 1])

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("windows do not overlap")
        a = self.coeffs[lo - self.lo : hi - self.lo + 1]
        b = other.coeffs[lo - other.lo : hi - other.lo + 1]
        return TruncatedSeries(lo, hi, a + b)

    def scale(self, c: complex) -> "TruncatedSeries":
        return TruncatedSeries(self.lo, self.hi, c * self.coeffs)


def mul(a: TruncatedSeries, b: TruncatedSeries, lo: int | None = None,
        hi: int | None = None) -> TruncatedSeries:
    """Cauchy product of two windows, truncated to [lo, hi].

    Defaults to the full representable window [a.lo+b.lo, a.hi+b.hi].
    Requesting exponents outside that range is a window overflow: those
    coefficients would need data the operands do not carry.
    """
    full_lo = a.lo + b.lo
    full_hi = a.hi + b.hi
    if lo is None:
        lo = full_lo
    if hi is None:
        hi = full_hi
    if lo < full_lo or hi > full_hi:
        raise ValueError(
            f"window overflow: requested [{lo}, {hi}], representable [{full_lo}, {full_hi}]"
        )
    prod = np.convolve(a.coeffs, b.coeffs)
    return TruncatedSeries(lo, hi, prod[lo - full_lo : hi - full_lo + 1])


def log_unit(a: TruncatedSeries) -> TruncatedSeries:
    """log of a series with constant term 1, on the window [0, a.hi].

    Uses the derivative recurrence l_k = a_k - (1/k) sum_{j<k} j l_j a_{k-j},
    which needs no division by the series itself.
    """
    if a.lo != 0:
        raise ValueError("log_unit expects a window starting at exponent 0")
    if abs(a.coeffs[0] - 1.0) > 1e-12:
        raise ValueError(f"constant term must be 1, got {a.coeffs[0]}")
    n = a.hi
    c = a.coeffs
    out = np.zeros(n + 1, dtype=complex)
    for k in range(1, n + 1):
        s = 0.0 + 0.0j
        for j in range(1, k):
            s += j * out[j] * c[k - j]
        out[k] = c[k] - s / k
    return TruncatedSeries(0, n, out)


def exp_unit(a: TruncatedSeries) -> TruncatedSeries:
    """exp of a series with constant term 0, on the window [0, a.hi]."""
    if a.lo != 0:
        raise ValueError("exp_unit expects a window starting at exponent 0")
    if abs(a.coeffs[0]) > 1e-12:
        raise ValueError(f"constant term must be 0, got {a.coeffs[0]}")
    n = a.hi
    c = a.coeffs
    out = np.zeros(n + 1, dtype=complex)
    out[0] = 1.0
    for k in range(1, n + 1):
        s = 0.0 + 0.0j
        for j in range(1, k + 1):
            s += j * c[j] * out[k - j]
        out[k] = s / k
    return TruncatedSeries(0, n, out)


def derivative(a: TruncatedSeries) -> TruncatedSeries:
    """Termwise d/dz; the window shifts down by one."""
    k = np.arange(a.lo, a.hi + 1)
    return TruncatedSeries(a.lo - 1, a.hi - 1, k * a.coeffs)


def antiderivative(a: TruncatedSeries) -> TruncatedSeries:
    """Termwise antiderivative with zero constant; rejects a z^-1 term.

    The z^-1 coefficient has no Laurent antiderivative, so it must be
    absent from the window or exactly zero.
    """
    if a.lo <= -1 <= a.hi and a.coeff(-1) != 0:
        raise ValueError("series has a nonzero z^-1 term; antiderivative is not a Laurent series")
    k = np.arange(a.lo, a.hi + 1).astype(float)
    divisor = np.where(k == -1, 1.0, k + 1)
    out = a.coeffs / divisor
    if a.lo <= -1 <= a.hi:
        out[-1 - a.lo] = 0.0
    return TruncatedSeries(a.lo + 1, a.hi + 1, out)
