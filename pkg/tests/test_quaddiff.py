"""Tests for square-form quadratic differentials and concentrating kernels."""

import numpy as np
import pytest

from grunsky_lab.disk import PolarGrid
from grunsky_lab.quaddiff import (QuadDifferential, QuadratureError, a1_norm,
                                  concentrating_sequence, psi_from_x,
                                  teichmuller_beltrami, truncated_direction)


def _double_sum(x, z):
    # brute-force ordered-pair sum (1/pi) sum sqrt(mn) x_m x_n z^(m+n-2)
    total = np.zeros_like(np.asarray(z, dtype=complex))
    for m in range(1, x.size + 1):
        for n in range(1, x.size + 1):
            total += np.sqrt(m * n) * x[m - 1] * x[n - 1] * z ** (m + n - 2)
    return total / np.pi


def test_square_form_matches_double_sum():
    rng = np.random.default_rng(5)
    z = 0.9 * np.sqrt(rng.uniform(size=40)) * np.exp(2j * np.pi * rng.uniform(size=40))
    for _ in range(10):
        dim = rng.integers(1, 9)
        x = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi = psi_from_x(x)
        assert np.max(np.abs(psi.value(z) - _double_sum(x, z))) < 1e-12


def test_unit_vector_values():
    z = np.array([0.0, 0.3, -0.5j, 0.7 * np.exp(0.4j)])
    e1 = psi_from_x(np.array([1.0]))
    assert np.max(np.abs(e1.value(z) - 1.0 / np.pi)) < 1e-15
    e2 = psi_from_x(np.array([0.0, 1.0]))
    assert np.max(np.abs(e2.value(z) - 2.0 * z ** 2 / np.pi)) < 1e-15
    mixed = psi_from_x(np.array([1.0, 1.0]) / np.sqrt(2.0))
    want = (1.0 + np.sqrt(2.0) * z) / np.sqrt(2.0 * np.pi)
    assert np.max(np.abs(mixed.omega(z) - want)) < 1e-15


def test_norm_equals_squared_coefficient_length():
    rng = np.random.default_rng(17)
    for _ in range(30):
        dim = rng.integers(1, 17)
        x = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi = psi_from_x(x)
        assert abs(a1_norm(psi) - np.linalg.norm(x) ** 2) < 1e-8


def test_value_is_square_of_omega():
    grid = PolarGrid(16, 64)
    rng = np.random.default_rng(23)
    x = rng.normal(size=6)
    for psi in (psi_from_x(x), concentrating_sequence(1.0, 3)):
        resid = np.abs(psi.value(grid.z) - psi.omega(grid.z) ** 2)
        assert np.max(resid) < 1e-11


def test_concentrating_kernels_have_unit_norm():
    for z0 in (1.0, np.exp(0.7j)):
        for p in range(1, 13):
            assert abs(a1_norm(concentrating_sequence(z0, p)) - 1.0) < 1e-12


def test_concentrating_kernel_mean_value():
    # the kernel is holomorphic, so its area integral is pi * (value at 0)
    grid = PolarGrid(64, 256)
    for p in (1, 2, 3):
        psi = concentrating_sequence(np.exp(0.3j), p)
        _, r, c = psi.concentration
        val = grid.integrate(psi.value(grid.z))
        assert abs(val - np.pi * c) < 1e-9


def test_concentration_escapes_compact_sets():
    zs = 0.5 * np.exp(2j * np.pi * np.arange(256) / 256)
    sups = [np.max(np.abs(concentrating_sequence(1.0, p).value(zs)))
            for p in (4, 8, 12)]
    assert sups[0] > sups[1] > sups[2]
    assert sups[2] < 1e-5


def test_truncated_direction_matches_kernel():
    x = truncated_direction(1.0, 2, 128)
    assert abs(np.linalg.norm(x) - 1.0) < 1e-14
    psi = psi_from_x(x)
    kernel = concentrating_sequence(1.0, 2)
    grid = PolarGrid(32, 128)
    assert np.max(np.abs(psi.value(grid.z) - kernel.value(grid.z))) < 1e-10
    assert abs(a1_norm(psi) - 1.0) < 1e-8


def test_teichmuller_coefficient_modulus_and_phase():
    psi = psi_from_x(np.array([0.0, 1.0]))  # psi proportional to z^2
    mu = teichmuller_beltrami(psi, 0.5)
    assert abs(mu.sup_norm - 0.5) < 1e-14
    zs = np.array([0.3, 0.6j, 0.8 * np.exp(1.1j), 0.2 * np.exp(-2.5j)])
    vals = mu.at(zs)
    # constant modulus k with phase exp(-2i arg z)
    assert np.max(np.abs(vals - 0.5 * np.exp(-2j * np.angle(zs)))) < 1e-12
    # mu * psi is positive real wherever psi is nonzero
    prod = vals * psi.value(zs)
    assert np.max(np.abs(prod - 0.5 * np.abs(psi.value(zs)))) < 1e-14


def test_teichmuller_coefficient_survives_zeros():
    psi = psi_from_x(np.array([0.0, 1.0]))
    mu = teichmuller_beltrami(psi, 0.3)
    val = mu.at(np.array([0.0]))[0]
    assert np.isfinite(val)
    assert abs(abs(val) - 0.3) < 1e-12
    with pytest.raises(ValueError):
        teichmuller_beltrami(psi, 1.0)
    with pytest.raises(ValueError):
        teichmuller_beltrami(psi, 0.0)


def test_construction_validation():
    with pytest.raises(ValueError):
        psi_from_x(np.zeros(4))
    with pytest.raises(ValueError):
        psi_from_x(np.array([]))
    with pytest.raises(ValueError):
        psi_from_x(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        concentrating_sequence(0.5, 3)
    with pytest.raises(ValueError):
        concentrating_sequence(1.0, 0)
    with pytest.raises(ValueError):
        QuadDifferential()
    with pytest.raises(ValueError):
        QuadDifferential(omega_coeffs=np.array([1.0]),
                         concentration=(1.0, 0.5, 0.1))
    assert issubclass(QuadratureError, RuntimeError)
