"""Tests for Grunsky matrices, norms, and the dilatation-pairing bound."""

import numpy as np
import pytest
from scipy.special import binom

from grunsky_lab.grunsky import (GrunskyMatrix, convergence_report,
                                 grunsky_form, grunsky_matrix, grunsky_norm,
                                 grunsky_norm_bound, tail_coefficients,
                                 takagi_max_vector)
from grunsky_lab.series import TruncatedSeries


def _pad(b, order):
    out = np.zeros(2 * order - 1, dtype=complex)
    out[:len(b)] = b
    return out


def _square_tail(order):
    # tail of the monic exterior square map: b_{4m-1} = (-1)^m C(1/2, m) / (1 - 4m)
    b = np.zeros(2 * order - 1, dtype=complex)
    m = 1
    while 4 * m - 1 <= b.size:
        b[4 * m - 2] = (-1) ** m * binom(0.5, m) / (1 - 4 * m)
        m += 1
    return b


def _contour_alpha(b, order, n_samples=64, r1=3.0, r2=2.0):
    # direct double-contour extraction of alpha_mn from the log-difference
    # quotient of the map F(z) = z + sum_j b_j z^-j, independent of any
    # series recurrence
    def fmap(z):
        total = np.asarray(z, dtype=complex).copy()
        for j, bj in enumerate(b, start=1):
            total += bj * z ** (-j)
        return total

    a = np.arange(n_samples)
    z = r1 * np.exp(2j * np.pi * a / n_samples)
    w = r2 * np.exp(2j * np.pi * a / n_samples)
    zz, ww = np.meshgrid(z, w, indexing="ij")
    g = np.log((fmap(zz) - fmap(ww)) / (zz - ww))
    alpha = np.empty((order, order), dtype=complex)
    for m in range(1, order + 1):
        for n in range(1, order + 1):
            kern = np.outer(z ** m, w ** n)
            alpha[m - 1, n - 1] = -np.sum(g * kern) / n_samples ** 2
    return alpha


def test_ellipse_matrix_is_diagonal():
    for b1 in (0.2, -0.35, 0.15 + 0.4j):
        for order in (1, 2, 5, 12):
            bmat = grunsky_matrix(_pad([b1], order), order).matrix
            want = np.diag([b1 ** m for m in range(1, order + 1)])
            assert np.max(np.abs(bmat - want)) < 1e-12
            assert abs(grunsky_norm(bmat) - abs(b1)) < 1e-12


def test_matrix_matches_contour_extraction():
    rng = np.random.default_rng(19)
    order = 8
    b = (rng.normal(size=2 * order - 1) + 1j * rng.normal(size=2 * order - 1))
    b *= 0.1 / np.arange(1, b.size + 1) ** 2
    alpha = _contour_alpha(b, order)
    idx = np.arange(1, order + 1, dtype=float)
    want = np.sqrt(np.outer(idx, idx)) * alpha
    got = grunsky_matrix(b, order).matrix
    assert np.max(np.abs(got - want)) < 1e-10


def test_square_tail_sparsity():
    order = 8
    bmat = grunsky_matrix(_square_tail(order), order).matrix
    m, n = np.meshgrid(np.arange(1, order + 1), np.arange(1, order + 1),
                       indexing="ij")
    off_lattice = (m + n) % 4 != 0
    assert np.max(np.abs(bmat[off_lattice])) < 1e-12
    assert abs(bmat[0, 2]) > 1e-3  # the (1,3) entry carries weight
    assert np.max(np.abs(bmat - bmat.T)) < 1e-13


def test_takagi_vector_attains_norm():
    rng = np.random.default_rng(29)
    for _ in range(20):
        n = rng.integers(2, 12)
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        sym = (a + a.T) / 2
        x, top = takagi_max_vector(sym)
        assert abs(np.linalg.norm(x) - 1.0) < 1e-12
        assert abs(top - grunsky_norm(sym)) < 1e-12
        assert abs(abs(x @ sym @ x) - top) < 1e-10 * max(1.0, top)


def test_quadratic_form_bounded_by_norm():
    rng = np.random.default_rng(31)
    bmat = grunsky_matrix(_square_tail(6), 6)
    top = grunsky_norm(bmat)
    for _ in range(25):
        x = rng.normal(size=6) + 1j * rng.normal(size=6)
        x /= np.linalg.norm(x)
        assert abs(grunsky_form(bmat, x)) <= top + 1e-12
    with pytest.raises(ValueError):
        grunsky_form(bmat, 2.0 * x)
    with pytest.raises(ValueError):
        grunsky_form(bmat, np.ones(7) / np.sqrt(7.0))


def test_norm_bound_values_and_validation():
    assert abs(grunsky_norm_bound(0.5, 0.5) - 0.5) < 1e-15
    assert abs(grunsky_norm_bound(0.5, 0.0) - 0.25) < 1e-15
    # strictly below k whenever alpha < k
    for k in (0.2, 0.6, 0.9):
        for alpha in (0.0, 0.3 * k, 0.9 * k):
            assert grunsky_norm_bound(k, alpha) < k
        assert abs(grunsky_norm_bound(k, k) - k) < 1e-15
    with pytest.raises(ValueError):
        grunsky_norm_bound(1.0, 0.5)
    with pytest.raises(ValueError):
        grunsky_norm_bound(-0.1, 0.0)
    with pytest.raises(ValueError):
        grunsky_norm_bound(0.5, 0.6)
    with pytest.raises(ValueError):
        grunsky_norm_bound(0.5, -0.1)


def test_convergence_report_constant_sequence():
    rep = convergence_report(_pad([0.4], 16), [2, 4, 8, 16])
    assert np.max(np.abs(np.array(rep["kappa"]) - 0.4)) < 1e-12
    assert rep["monotone"]
    assert abs(rep["extrapolated"] - 0.4) < 1e-12
    assert rep["uncertainty"] < 1e-12
    assert np.isnan(rep["delta"][0])
    with pytest.raises(ValueError):
        convergence_report(_pad([0.4], 4), [])
    with pytest.raises(ValueError):
        convergence_report(_pad([0.4], 4), [0, 2])


def test_tail_extraction_from_series():
    series = TruncatedSeries(-3, 1, np.array([0.05j, 0.0, 0.2, 0.0, 1.0]))
    tail = tail_coefficients(series)
    assert np.allclose(tail, [0.2, 0.0, 0.05j])
    with pytest.raises(ValueError):
        tail_coefficients(TruncatedSeries(-3, 1,
                                          np.array([0.05j, 0.0, 0.2, 0.0, 2.0])))
    with pytest.raises(ValueError):
        tail_coefficients(np.ones((2, 2)))


def test_matrix_construction_validation():
    with pytest.raises(ValueError):
        grunsky_matrix(np.array([0.2, 0.0]), 2)  # needs b_1..b_3
    with pytest.raises(ValueError):
        grunsky_matrix(np.array([0.2]), 0)
    with pytest.raises(ValueError):
        GrunskyMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        GrunskyMatrix(np.zeros((2, 3)))
    block = grunsky_matrix(_pad([0.3], 4), 4)
    assert block.order == 4
    assert block.principal(2).order == 2
    with pytest.raises(ValueError):
        block.principal(5)
