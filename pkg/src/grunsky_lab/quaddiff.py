"""Integrable holomorphic quadratic differentials on the unit disk.

The working family is the squares psi_x = omega_x^2 with
omega_x(z) = pi^{-1/2} sum_n sqrt(n) x_n z^{n-1} for a coefficient vector
x, so that the area-L1 norm of psi_x equals ||x||^2 exactly, plus the
boundary-concentrating kernels c (1 - r conj(z0) z)^{-4} used to probe
degeneration towards a boundary point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .disk import BeltramiField, PolarGrid

log = logging.getLogger(__name__)

__all__ = [
    "QuadDifferential",
    "QuadratureError",
    "psi_from_x",
    "a1_norm",
    "concentrating_sequence",
    "truncated_direction",
    "teichmuller_beltrami",
]


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadDifferential:
    """A holomorphic quadratic differential, either polynomial (from a
    coefficient vector x) or a boundary-concentrating kernel.

    omega_coeffs: ascending coefficients of the half-order form omega with
    psi = omega^2, present for polynomial differentials.
    concentration: (z0, r, c) for the kernel c (1 - r conj(z0) z)^-4.
    """

    omega_coeffs: Optional[np.ndarray] = None
    x: Optional[np.ndarray] = None
    concentration: Optional[tuple[complex, float, float]] = None
    label: str = "psi"

    def __post_init__(self):
        if (self.omega_coeffs is None) == (self.concentration is None):
            raise ValueError("exactly one of omega_coeffs / concentration must be set")

    def value(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.concentration is not None:
            z0, r, c = self.concentration
            return c / (1.0 - r * np.conj(z0) * z) ** 4
        w = np.polynomial.polynomial.polyval(z, self.omega_coeffs)
        return w * w

    def omega(self, z: np.ndarray) -> np.ndarray:
        """Half-order form with psi = omega^2."""
        z = np.asarray(z, dtype=complex)
        if self.concentration is not None:
            z0, r, c = self.concentration
            return np.sqrt(c) / (1.0 - r * np.conj(z0) * z) ** 2
        return np.polynomial.polynomial.polyval(z, self.omega_coeffs)


def psi_from_x(x: np.ndarray, label: str = "psi") -> QuadDifferential:
    """Square-form differential of a coefficient vector.

    psi_x(z) = pi^{-1} sum_{m,n>=1} sqrt(mn) x_m x_n z^{m+n-2}, the sum over
    ordered pairs, which factors exactly as omega_x^2.
    """
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("x must be a nonempty vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("x has non-finite entries")
    if np.all(x == 0):
        raise ValueError("zero coefficient vector has no direction")
    n = np.arange(1, x.size + 1)
    omega = np.sqrt(n) * x / np.sqrt(np.pi)
    return QuadDifferential(omega_coeffs=omega, x=x.copy(), label=label)


def a1_norm(psi: QuadDifferential, quad_order: int = 64) -> float:
    """Area integral of |psi| over the disk.

    Polynomial differentials integrate on a polar Gauss x trapezoid grid
    with an order-doubling consistency check; concentrating kernels use the
    exact value pi c / (1 - r^2)^2 (the rotation-invariant angular mean
    (1+a^2)/(1-a^2)^3 integrates in closed form), since no fixed grid
    resolves their peak at large p.
    """
    if psi.concentration is not None:
        _, r, c = psi.concentration
        return float(np.pi * c / (1.0 - r * r) ** 2)

    def on_grid(order):
        grid = PolarGrid(order, max(4 * order, 64))
        vals = np.abs(psi.value(grid.z))
        return float(np.sum(grid.area_weights * vals))

    coarse = on_grid(quad_order)
    fine = on_grid(2 * quad_order)
    if abs(fine - coarse) > 1e-8 * max(1.0, abs(fine)):
        raise QuadratureError(
            f"norm quadrature not converged: order {quad_order} -> {coarse!r}, "
            f"order {2 * quad_order} -> {fine!r}"
        )
    return fine


def concentrating_sequence(z0: complex, p: int) -> QuadDifferential:
    """Unit-norm kernel concentrating at the boundary point z0 as p grows.

    psi_p(z) = c_p (1 - r_p conj(z0) z)^-4 with r_p = 1 - 2^-p and
    c_p = (1 - r_p^2)^2 / pi, the exact normalizer.
    """
    z0 = complex(z0)
    if abs(abs(z0) - 1.0) > 1e-12:
        raise ValueError(f"z0 must lie on the unit circle, |z0| = {abs(z0)}")
    if p < 1:
        raise ValueError("p must be a positive integer")
    r = 1.0 - 0.5 ** p
    c = (1.0 - r * r) ** 2 / np.pi
    return QuadDifferential(concentration=(z0, r, c), label=f"concentrated(p={p})")


def truncated_direction(z0: complex, p: int, n_coeffs: int) -> np.ndarray:
    """Unit coefficient vector of the concentrating kernel, truncated.

    The kernel is psi_x for x_n = sqrt(pi c_p) sqrt(n) (r_p conj(z0))^{n-1};
    the first n_coeffs entries are renormalized to unit length.
    """
    psi = concentrating_sequence(z0, p)
    z0, r, c = psi.concentration
    n = np.arange(1, n_coeffs + 1)
    x = np.sqrt(np.pi * c) * np.sqrt(n) * (r * np.conj(z0)) ** (n - 1)
    return x / np.linalg.norm(x)


def teichmuller_beltrami(psi: QuadDifferential, k: float,
                         grid: PolarGrid | None = None) -> BeltramiField:
    """Coefficient k |psi| / psi: constant modulus k, phase carried by psi.

    Grid points landing exactly on a zero of psi are nudged radially by one
    ulp-scale step; each nudge is logged.
    """
    if not 0.0 < k < 1.0:
        raise ValueError(f"k must lie in (0, 1), got {k}")
    grid = grid or PolarGrid()

    def coefficient(z):
        z = np.asarray(z, dtype=complex)
        vals = psi.value(z)
        bad = vals == 0
        if np.any(bad):
            log.info("teichmuller coefficient: %d samples at zeros of psi, radial ulp nudge",
                     int(np.count_nonzero(bad)))
            znudge = np.where(z == 0, 1e-12 + 0j, z * (1.0 + 4e-16))
            vals = np.where(bad, psi.value(znudge), vals)
            still = vals == 0
            if np.any(still):
                znudge2 = np.where(z == 0, 1e-9 + 0j, z * (1.0 + 1e-9))
                vals = np.where(still, psi.value(znudge2), vals)
        return k * np.abs(vals) / vals

    return BeltramiField(grid, coefficient(grid.z), evaluator=coefficient, tag="teichmuller")
