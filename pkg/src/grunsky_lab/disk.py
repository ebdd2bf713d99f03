"""Polar quadrature grids and sampled coefficient fields on the unit disk."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

log = logging.getLogger(__name__)

__all__ = ["PolarGrid", "BeltramiField", "constant_field", "field_from_function"]


class PolarGrid:
    """Tensor quadrature grid on the disk: Gauss-Legendre radii x uniform angles.

    Area integrals are sum(area_weights * samples); the angular rule is the
    trapezoid on a uniform grid, exact for trigonometric polynomials of
    degree below n_angular.
    """

    def __init__(self, n_radial: int = 64, n_angular: int = 256):
        if n_radial < 2 or n_angular < 4:
            raise ValueError("grid too coarse")
        self.n_radial = int(n_radial)
        self.n_angular = int(n_angular)
        x, w = leggauss(self.n_radial)
        self.r = 0.5 * (x + 1.0)          # nodes on (0, 1)
        self.r_weights = 0.5 * w
        self.theta = 2.0 * np.pi * np.arange(self.n_angular) / self.n_angular
        self.z = self.r[:, None] * np.exp(1j * self.theta)[None, :]
        # dA = r dr dtheta
        self.area_weights = (self.r_weights * self.r)[:, None] * np.full(
            self.n_angular, 2.0 * np.pi / self.n_angular
        )[None, :]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_radial, self.n_angular)

    def integrate(self, samples: np.ndarray) -> complex:
        if samples.shape != self.shape:
            raise ValueError(f"sample shape {samples.shape} does not match grid {self.shape}")
        return complex(np.sum(self.area_weights * samples))

    def same_layout(self, other: "PolarGrid") -> bool:
        return (self.n_radial, self.n_angular) == (other.n_radial, other.n_angular)


@dataclass
class BeltramiField:
    """Measurable coefficient on the disk, sampled on a polar grid.

    evaluator, when present, is the closed form behind the samples; it lets
    pairings against concentrated kernels resample the field on finer grids
    and lets affine composition evaluate off the grid.
    """

    grid: PolarGrid
    samples: np.ndarray
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = None
    tag: str = "sampled"
    sup_norm: float = field(init=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != self.grid.shape:
            raise ValueError("samples do not match grid layout")
        self.sup_norm = float(np.max(np.abs(self.samples)))
        if self.sup_norm >= 1.0:
            raise ValueError(f"coefficient sup norm {self.sup_norm:.6f} is not below 1")

    def at(self, z: np.ndarray) -> np.ndarray:
        """Evaluate at arbitrary points: closed form when known, else nearest sample.

        Points outside the closed disk are clamped radially to the outermost
        grid ring; each clamp is an extrapolation and gets logged.
        """
        z = np.asarray(z, dtype=complex)
        if self.evaluator is not None:
            return np.asarray(self.evaluator(z), dtype=complex)
        r = np.abs(z)
        n_out = int(np.count_nonzero(r > 1.0))
        if n_out:
            log.info("beltrami field '%s': %d points outside the disk, nearest-sample extrapolation", self.tag, n_out)
        ri = np.searchsorted(self.grid.r, np.clip(r, 0.0, self.grid.r[-1]))
        ri = np.clip(ri, 0, self.grid.n_radial - 1)
        step = 2.0 * np.pi / self.grid.n_angular
        ti = np.mod(np.round(np.angle(z) / step).astype(int), self.grid.n_angular)
        return self.samples[ri, ti]


def constant_field(value: complex, grid: PolarGrid | None = None) -> BeltramiField:
    """Spatially constant coefficient; the extremal model case."""
    grid = grid or PolarGrid()
    value = complex(value)
    samples = np.full(grid.shape, value, dtype=complex)
    return BeltramiField(grid, samples, evaluator=lambda z: np.full_like(np.asarray(z, dtype=complex), value),
                         tag="constant")


def field_from_function(fn: Callable[[np.ndarray], np.ndarray], grid: PolarGrid | None = None,
                        tag: str = "function") -> BeltramiField:
    grid = grid or PolarGrid()
    return BeltramiField(grid, np.asarray(fn(grid.z), dtype=complex), evaluator=fn, tag=tag)
